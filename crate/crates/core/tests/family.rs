mod common;

use std::collections::HashMap;

use common::*;
use pfam_core::family::{
    linear_growth_constant, truncate, verify_family_axioms, Axiom, Base, Factor, FamilyExpr,
};
use pfam_core::monomial::{MonomialIdeal, Prime};
use proptest::prelude::*;

fn p(n: u64) -> Prime {
    Prime::new(n).unwrap()
}

/// `J_{p^a,p^e}` from the recursive definition: `J_{p^e}` up to `a`, then
/// the sum of `J_{p^a,p^i}^{[p^{e-i}]}` over `i < e`.
fn truncation_oracle(
    f: &FamilyExpr,
    a: u32,
    e: u32,
    p: Prime,
    memo: &mut HashMap<u32, MonomialIdeal>,
) -> MonomialIdeal {
    if let Some(x) = memo.get(&e) {
        return x.clone();
    }
    let out = if e <= a {
        f.evaluate(p, e).unwrap()
    } else {
        let mut acc = MonomialIdeal::zero(f.dim().unwrap());
        for i in 0..e {
            let inner = truncation_oracle(f, a, i, p, memo);
            let q = p.get().pow(e - i);
            acc = acc.sum(&inner.frobenius_unchecked(q).unwrap()).unwrap();
        }
        acc
    };
    memo.insert(e, out.clone());
    out
}

fn builtins(i: MonomialIdeal) -> Vec<FamilyExpr> {
    vec![
        FamilyExpr::frobenius(i.clone()),
        FamilyExpr::ordinary_power(i.clone()),
        FamilyExpr::closed_power(i.clone()),
        FamilyExpr::constant(i.clone()),
        FamilyExpr::table(vec![i.clone(), i.ordinary_power(2).unwrap()]),
        truncate(&FamilyExpr::ordinary_power(i.clone()), 1),
        FamilyExpr::shifted_product(vec![(FamilyExpr::ordinary_power(i.clone()), 1), (FamilyExpr::frobenius(i), 0)], Base::Live),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn builtins_are_p_families(i in arb_ideal(2, 3, 4), prime in prop::sample::select(vec![2u64, 3])) {
        for f in builtins(i) {
            let r = verify_family_axioms(&f, p(prime), 3).unwrap();
            prop_assert!(r.p_family_ok, "{:?}", r.failures);
        }
    }

    #[test]
    fn truncation_matches_recursive_definition(i in arb_ideal(2, 3, 4), a in 0u32..3) {
        let f = FamilyExpr::ordinary_power(i);
        let t = truncate(&f, a);
        let mut memo = HashMap::new();
        for e in 0..=5 {
            prop_assert_eq!(t.evaluate(p(2), e).unwrap(), truncation_oracle(&f, a, e, p(2), &mut memo));
        }
    }

    #[test]
    fn truncation_agrees_below_and_is_contained(i in arb_ideal(2, 3, 4), a in 0u32..3) {
        let f = FamilyExpr::closed_power(i);
        let t = truncate(&f, a);
        for e in 0..=5 {
            let (te, fe) = (t.evaluate(p(2), e).unwrap(), f.evaluate(p(2), e).unwrap());
            if e <= a {
                prop_assert_eq!(&te, &fe);
            }
            prop_assert!(te.is_subset(&fe));
        }
    }

    #[test]
    fn truncation_of_truncation(i in arb_ideal(2, 3, 4), a in 0u32..3, b in 0u32..3) {
        let f = FamilyExpr::ordinary_power(i);
        let twice = truncate(&truncate(&f, a), b);
        let once = truncate(&f, a.min(b));
        for e in 0..=5 {
            prop_assert_eq!(twice.evaluate(p(2), e).unwrap(), once.evaluate(p(2), e).unwrap());
        }
    }

    #[test]
    fn truncation_threshold_at_most_a(i in arb_ideal(2, 3, 4), a in 0u32..3) {
        let t = truncate(&FamilyExpr::ordinary_power(i), a);
        let r = verify_family_axioms(&t, p(2), 5).unwrap();
        let th = r.finite_type_threshold.expect("finite type on the horizon");
        prop_assert!(th <= a);
    }

    #[test]
    fn frozen_frobenius_collapses(i in arb_ideal(2, 3, 4), b in 0u32..3, n in 0u32..2) {
        let frob = FamilyExpr::frobenius(i);
        let frozen = FamilyExpr::shifted_product(vec![(frob.clone(), n)], Base::Frozen(b));
        let live = FamilyExpr::shifted_product(vec![(frob, n)], Base::Live);
        for e in 0..=3 {
            prop_assert_eq!(frozen.evaluate(p(2), e).unwrap(), live.evaluate(p(2), e + b).unwrap());
        }
    }
}

#[test]
fn evaluate_examples() {
    let f = FamilyExpr::frobenius(ideal(&[&[1, 0], &[0, 2]]));
    assert_eq!(f.evaluate(p(2), 3).unwrap(), ideal(&[&[8, 0], &[0, 16]]));
    let s = FamilyExpr::ShiftedProduct {
        base_b: Base::Frozen(0),
        factors: vec![Factor { family: FamilyExpr::frobenius(MonomialIdeal::maximal(2)), shift: 1 }],
    };
    assert_eq!(s.evaluate(p(2), 1).unwrap(), ideal(&[&[4, 0], &[0, 4]]));
    let o = FamilyExpr::ordinary_power(MonomialIdeal::maximal(2));
    assert_eq!(o.evaluate(p(2), 2).unwrap().gens().len(), 5);
}

#[test]
fn truncate_examples() {
    let m = MonomialIdeal::maximal(2);
    let i = ideal(&[&[2, 0], &[1, 1], &[0, 3]]);
    let fr = FamilyExpr::frobenius(i.clone());
    for a in 0..3 {
        for e in 0..6 {
            assert_eq!(truncate(&fr, a).evaluate(p(3), e).unwrap(), fr.evaluate(p(3), e).unwrap());
        }
    }
    let pow = FamilyExpr::ordinary_power(m.clone());
    for e in 0..5 {
        let expect = m.frobenius_unchecked(2u64.pow(e)).unwrap();
        assert_eq!(truncate(&pow, 0).evaluate(p(2), e).unwrap(), expect);
    }
    assert_eq!(truncate(&pow, 1).evaluate(p(2), 2).unwrap(), ideal(&[&[4, 0], &[2, 2], &[0, 4]]));
}

#[test]
fn axiom_examples() {
    let r = verify_family_axioms(&FamilyExpr::ordinary_power(ideal(&[&[1, 0], &[0, 2]])), p(2), 4).unwrap();
    assert!(r.p_family_ok && r.condition_41_ok);
    let r = verify_family_axioms(&FamilyExpr::frobenius(MonomialIdeal::maximal(2)), p(2), 3).unwrap();
    assert!(r.p_family_ok && !r.condition_41_ok);
    assert_eq!(r.finite_type_threshold, Some(0));
    assert_eq!(r.first_failure(Axiom::Condition41).unwrap().witness.coords(), &[1, 1]);
    let at_two = r.failures.iter().find(|f| f.axiom == Axiom::Condition41 && f.e == 1).unwrap();
    assert_eq!(at_two.witness.coords(), &[2, 2]);
}

#[test]
fn linear_growth_examples() {
    let unit = FamilyExpr::constant(MonomialIdeal::unit(2));
    let frob = FamilyExpr::frobenius(MonomialIdeal::maximal(2));
    assert_eq!(linear_growth_constant(&unit, &frob, p(2), 10, 5).unwrap(), Some(2));
    assert_eq!(linear_growth_constant(&frob, &frob, p(2), 10, 5).unwrap(), Some(1));
    assert!(linear_growth_constant(&frob, &unit, p(2), 10, 5).is_err());
    let x = FamilyExpr::frobenius(ideal(&[&[1, 0]]));
    assert_eq!(linear_growth_constant(&unit, &x, p(2), 10, 3).unwrap(), None);
}
