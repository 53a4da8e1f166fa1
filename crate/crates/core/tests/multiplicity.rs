mod common;

use common::*;
use num_bigint::BigInt;
use pfam_core::family::FamilyExpr;
use pfam_core::monomial::{MonomialIdeal, Prime};
use pfam_core::multiplicity::{e_vs_ehk_check, hilbert_kunz, mixed_dim2, samuel, verma_rhs, CrossSum};
use pfam_core::polytope::integral_closure;
use proptest::prelude::*;

fn complete(i: &MonomialIdeal) -> MonomialIdeal {
    integral_closure(i).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closure_matches_oracle(i in arb_ideal(2, 4, 7)) {
        prop_assert_eq!(complete(&i), brute_closure_2d(&i));
    }

    #[test]
    fn samuel_matches_oracle(i in arb_ideal(2, 4, 7)) {
        let e = Q::from_integer(samuel(&i).unwrap());
        prop_assert_eq!(e, q(2) * brute_np_covolume(&i));
    }

    #[test]
    fn hilbert_kunz_matches_enumeration(i in arb_ideal(2, 4, 7)) {
        prop_assert_eq!(hilbert_kunz(&i).unwrap(), q(brute_colength(&i) as i64));
    }

    #[test]
    fn mixed_is_symmetric_and_diagonal(a in arb_ideal(2, 3, 6), b in arb_ideal(2, 3, 6)) {
        prop_assert_eq!(mixed_dim2(&a, &b).unwrap().mixed, mixed_dim2(&b, &a).unwrap().mixed);
        let diag = mixed_dim2(&a, &a).unwrap();
        prop_assert_eq!(diag.mixed, Q::from_integer(samuel(&a).unwrap()));
    }

    #[test]
    fn mixed_is_bilinear(a in arb_ideal(2, 3, 4), b in arb_ideal(2, 3, 4), s in 1u64..4, t in 1u64..4) {
        let (a, b) = (complete(&a), complete(&b));
        let base = mixed_dim2(&a, &b).unwrap().mixed;
        let scaled = mixed_dim2(&a.ordinary_power(s).unwrap(), &b.ordinary_power(t).unwrap()).unwrap().mixed;
        prop_assert_eq!(scaled, base * q((s * t) as i64));
    }

    #[test]
    fn samuel_scales_under_frobenius(i in arb_ideal(2, 4, 6), k in 1u64..9) {
        let e = samuel(&i).unwrap();
        prop_assert_eq!(samuel(&i.frobenius_unchecked(k).unwrap()).unwrap(), e * BigInt::from(k * k));
    }

    #[test]
    fn verma_identity_on_complete_pairs(a in arb_ideal(2, 3, 4), b in arb_ideal(2, 3, 4)) {
        let pair = [complete(&a), complete(&b)];
        for r1 in 0..=3u64 {
            for r2 in 0..=3u64 {
                let prod = pair[0].ordinary_power(r1).unwrap().product(&pair[1].ordinary_power(r2).unwrap()).unwrap();
                let lhs = BigInt::from(brute_colength(&prod));
                prop_assert_eq!(verma_rhs(&pair, &[r1, r2], CrossSum::Strict).unwrap(), lhs);
            }
        }
    }
}

#[test]
fn verma_powers_of_m_reject_inclusive_reading() {
    let m = MonomialIdeal::maximal(2);
    for r in 0..6u64 {
        let lhs = BigInt::from(brute_colength(&m.ordinary_power(r).unwrap()));
        assert_eq!(verma_rhs(&[m.clone()], &[r], CrossSum::Strict).unwrap(), lhs);
        let inclusive = verma_rhs(&[m.clone()], &[r], CrossSum::Inclusive).unwrap();
        assert_eq!(inclusive - &lhs, BigInt::from(r * r));
    }
}

#[test]
fn e_vs_ehk_gap_shrinks() {
    let p = Prime::new(2).unwrap();
    for i in [ideal(&[&[2, 0], &[1, 1], &[0, 3]]), ideal(&[&[3, 0], &[1, 1], &[0, 2]]), ideal(&[&[4, 0], &[1, 2], &[0, 3]])] {
        let e = Q::from_integer(samuel(&i).unwrap());
        for f in [FamilyExpr::ordinary_power(i.clone()), FamilyExpr::closed_power(i.clone())] {
            let rep = e_vs_ehk_check(&f, p, 6).unwrap();
            assert!(rep.gap_nonincreasing);
            let last = rep.rows.last().unwrap();
            assert!(last.gap <= &e * qf(5, 100));
            // e(I_q)/q^2 is e(I) for both families
            assert!(rep.rows.iter().all(|r| r.samuel == e));
        }
    }
}
