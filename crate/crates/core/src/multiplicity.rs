//! Samuel, Hilbert–Kunz and mixed multiplicities of monomial ideals, with
//! Verma's length formula in dimension two and its family version.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::counting::colength;
use crate::error::{Error, Result};
use crate::family::{verify_family_axioms, Axiom, FamilyExpr};
use crate::monomial::{MonomialIdeal, Prime};
use crate::polytope::NewtonPolyhedron;
use crate::rational::{self, Q};

fn require_m_primary(i: &MonomialIdeal) -> Result<()> {
    if i.is_m_primary() {
        Ok(())
    } else {
        Err(Error::NotMPrimary)
    }
}

fn require_dim2(i: &MonomialIdeal) -> Result<()> {
    if i.dim() == 2 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "mixed multiplicities need d = 2, got d = {}",
            i.dim()
        )))
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `e_HK(I)`. For a monomial ideal `λ(R/I^{[q]}) = q^d λ(R/I)`, so this is
/// the staircase covolume.
pub fn hilbert_kunz(i: &MonomialIdeal) -> Result<Q> {
    require_m_primary(i)?;
    Ok(rational::q_big(&colength(i)?))
}

/// `e(I) = d! · covol(NP(I))`.
pub fn samuel(i: &MonomialIdeal) -> Result<BigInt> {
    require_m_primary(i)?;
    let v = NewtonPolyhedron::of_ideal(i)?.covolume()? * Q::from_integer(factorial(i.dim()));
    if !v.is_integer() {
        return Err(Error::Invalid(format!(
            "non-integer multiplicity {}",
            rational::render_q(&v)
        )));
    }
    Ok(v.to_integer())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityReport {
    #[serde(with = "rational::int_string")]
    pub e_i: BigInt,
    #[serde(with = "rational::int_string")]
    pub e_j: BigInt,
    #[serde(with = "rational::int_string")]
    pub e_ij: BigInt,
    #[serde(with = "rational::as_string")]
    pub e_hk_i: Q,
    #[serde(with = "rational::as_string")]
    pub e_hk_j: Q,
    /// `e(I|J)`
    #[serde(with = "rational::as_string")]
    pub mixed: Q,
    #[serde(with = "rational::int_string")]
    pub length_ij: BigUint,
    /// `λ(R/IJ) − λ(R/I) − λ(R/J) − e(I|J)`
    #[serde(with = "rational::as_string")]
    pub r_residual: Q,
}

impl MultiplicityReport {
    pub fn r_vanishes(&self) -> bool {
        self.r_residual.is_zero()
    }
}

/// `e(I|J) = (e(IJ) − e(I) − e(J))/2` and the r-residual, for `d = 2`.
pub fn mixed_dim2(i: &MonomialIdeal, j: &MonomialIdeal) -> Result<MultiplicityReport> {
    require_dim2(i)?;
    require_dim2(j)?;
    let ij = i.product(j)?;
    let (e_i, e_j, e_ij) = (samuel(i)?, samuel(j)?, samuel(&ij)?);
    let (e_hk_i, e_hk_j) = (hilbert_kunz(i)?, hilbert_kunz(j)?);
    let mixed = Q::new(&e_ij - &e_i - &e_j, BigInt::from(2));
    let length_ij = colength(&ij)?;
    let r_residual = rational::q_big(&length_ij) - &e_hk_i - &e_hk_j - &mixed;
    Ok(MultiplicityReport {
        e_i,
        e_j,
        e_ij,
        e_hk_i,
        e_hk_j,
        mixed,
        length_ij,
        r_residual,
    })
}

/// Which index pairs enter the cross term of Verma's formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossSum {
    /// `i < j`
    #[default]
    Strict,
    /// `i <= j`, as printed; kept for comparison only.
    Inclusive,
}

impl CrossSum {
    fn pairs(self, n: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..n).flat_map(move |i| {
            let start = if self == CrossSum::Strict { i + 1 } else { i };
            (start..n).map(move |j| (i, j))
        })
    }
}

/// Pairwise multiplicity data for a list of ideals, checking `r(I_i|I_j) = 0`
/// for every `i <= j`.
struct PairTable {
    e: Vec<BigInt>,
    length: Vec<Q>,
    mixed: Vec<Vec<Q>>,
}

fn pair_table(ideals: &[MonomialIdeal]) -> Result<PairTable> {
    let n = ideals.len();
    let mut mixed = vec![vec![Q::zero(); n]; n];
    let mut e = Vec::with_capacity(n);
    let mut length = Vec::with_capacity(n);
    for i in ideals {
        require_dim2(i)?;
        e.push(samuel(i)?);
        length.push(hilbert_kunz(i)?);
    }
    for a in 0..n {
        for b in a..n {
            let ab = ideals[a].product(&ideals[b])?;
            let m = Q::new(samuel(&ab)? - &e[a] - &e[b], BigInt::from(2));
            let residual = rational::q_big(&colength(&ab)?) - &length[a] - &length[b] - &m;
            if !residual.is_zero() {
                return Err(Error::Precondition(format!(
                    "r(I_{a}|I_{b}) = {} is nonzero",
                    rational::render_q(&residual)
                )));
            }
            mixed[a][b] = m.clone();
            mixed[b][a] = m;
        }
    }
    Ok(PairTable { e, length, mixed })
}

fn choose2(r: &Q) -> Q {
    r * (r - Q::one()) / rational::q_int(2)
}

fn verma_sum(t: &PairTable, r: &[Q], cross: CrossSum) -> Q {
    let mut total = Q::zero();
    for i in 0..r.len() {
        total += Q::from_integer(t.e[i].clone()) * choose2(&r[i]) + &t.length[i] * &r[i];
    }
    for (i, j) in cross.pairs(r.len()) {
        total += &t.mixed[i][j] * &r[i] * &r[j];
    }
    total
}

/// Right side of Verma's formula for `λ(R/I_1^{r_1}⋯I_s^{r_s})`.
pub fn verma_rhs(ideals: &[MonomialIdeal], r: &[u64], cross: CrossSum) -> Result<BigInt> {
    if ideals.len() != r.len() {
        return Err(Error::DimensionMismatch {
            expected: ideals.len(),
            found: r.len(),
        });
    }
    let table = pair_table(ideals)?;
    let rq: Vec<Q> = r.iter().map(|&x| rational::q_u(x)).collect();
    Ok(verma_sum(&table, &rq, cross).to_integer())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RhsEntry {
    pub b: u32,
    #[serde(with = "rational::as_string")]
    pub value: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyRhs {
    pub entries: Vec<RhsEntry>,
    /// Value at the largest `b`.
    #[serde(with = "rational::as_string")]
    pub extrapolated: Q,
    /// `|RHS(b_max) − RHS(b_max − 1)|`
    #[serde(with = "rational::as_string")]
    pub cauchy: Q,
}

fn require_condition_41(families: &[FamilyExpr], p: Prime, e_max: u32) -> Result<()> {
    for (k, f) in families.iter().enumerate() {
        let report = verify_family_axioms(f, p, e_max.max(1))?;
        if let Some(fail) = report.first_failure(Axiom::Condition41) {
            return Err(Error::Precondition(format!(
                "family {k} fails I_q^p ⊆ I_pq at e = {}: {} is missing",
                fail.e, fail.witness
            )));
        }
    }
    Ok(())
}

/// The dimension-two family formula evaluated at `b = 0..=b_max`:
/// `Σ_i (e(I(i)_{p^b}) C(p^{m_i},2) + e_HK(I(i)_{p^b}) p^{m_i}) / p^{2b}`
/// plus the cross term `Σ e(I(i)_{p^b}|I(j)_{p^b}) p^{m_i} p^{m_j} / p^{2b}`.
pub fn dim2_family_rhs(
    families: &[FamilyExpr],
    shifts: &[u32],
    p: Prime,
    b_max: u32,
    cross: CrossSum,
) -> Result<FamilyRhs> {
    if families.is_empty() || families.len() != shifts.len() {
        return Err(Error::DimensionMismatch {
            expected: families.len(),
            found: shifts.len(),
        });
    }
    require_condition_41(families, p, b_max)?;
    let r: Vec<Q> = shifts
        .iter()
        .map(|&m| p.pow(m).map(rational::q_u))
        .collect::<Result<_>>()?;
    let mut entries = Vec::new();
    for b in 0..=b_max {
        let ideals = families
            .iter()
            .map(|f| f.evaluate(p, b))
            .collect::<Result<Vec<_>>>()?;
        let table = pair_table(&ideals).map_err(|e| match e {
            Error::Precondition(msg) => Error::Precondition(format!("{msg} at b = {b}")),
            other => other,
        })?;
        let norm = rational::q_pow(p.get(), 2 * b);
        entries.push(RhsEntry {
            b,
            value: verma_sum(&table, &r, cross) / norm,
        });
    }
    let last = entries.last().unwrap().value.clone();
    let cauchy = match entries.len() {
        n if n >= 2 => rational::abs_diff(&last, &entries[n - 2].value),
        _ => Q::zero(),
    };
    Ok(FamilyRhs {
        entries,
        extrapolated: last,
        cauchy,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvsEhkRow {
    pub e: u32,
    pub q: u64,
    /// `e(I_q)/q^d`
    #[serde(with = "rational::as_string")]
    pub samuel: Q,
    /// `d! · e_HK(I_q)/q^d`
    #[serde(with = "rational::as_string")]
    pub scaled_hk: Q,
    #[serde(with = "rational::as_string")]
    pub gap: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvsEhkReport {
    pub rows: Vec<EvsEhkRow>,
    pub gap_nonincreasing: bool,
}

/// Tabulates `e(I_q)/q^d` against `d! · e_HK(I_q)/q^d` for `q <= p^{e_max}`.
pub fn e_vs_ehk_check(f: &FamilyExpr, p: Prime, e_max: u32) -> Result<EvsEhkReport> {
    require_condition_41(std::slice::from_ref(f), p, e_max)?;
    let d = f.dim()?;
    let dfact = Q::from_integer(factorial(d));
    let mut rows: Vec<EvsEhkRow> = Vec::new();
    for e in 0..=e_max {
        let ideal = f.evaluate(p, e)?;
        let q = p.pow(e)?;
        let qd = rational::q_pow(q, d as u32);
        let samuel = Q::from_integer(samuel(&ideal)?) / &qd;
        let scaled_hk = &dfact * hilbert_kunz(&ideal)? / &qd;
        let gap = rational::abs_diff(&samuel, &scaled_hk);
        rows.push(EvsEhkRow {
            e,
            q,
            samuel,
            scaled_hk,
            gap,
        });
    }
    let gap_nonincreasing = rows.windows(2).all(|w| w[1].gap <= w[0].gap);
    Ok(EvsEhkReport {
        rows,
        gap_nonincreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q_frac, q_int};

    fn ideal(rows: &[&[u64]]) -> MonomialIdeal {
        MonomialIdeal::from_rows(rows[0].len(), rows).unwrap()
    }

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    #[test]
    fn hilbert_kunz_examples() {
        assert_eq!(hilbert_kunz(&MonomialIdeal::maximal(2)).unwrap(), q_int(1));
        assert_eq!(hilbert_kunz(&ideal(&[&[2, 0], &[0, 3]])).unwrap(), q_int(6));
        assert_eq!(hilbert_kunz(&ideal(&[&[2, 0], &[1, 1], &[0, 3]])).unwrap(), q_int(4));
        assert_eq!(hilbert_kunz(&ideal(&[&[2, 0], &[1, 1]])), Err(Error::NotMPrimary));
    }

    #[test]
    fn samuel_examples() {
        assert_eq!(samuel(&MonomialIdeal::maximal(2)).unwrap(), BigInt::from(1));
        assert_eq!(samuel(&ideal(&[&[2, 0], &[1, 1], &[0, 3]])).unwrap(), BigInt::from(5));
        assert_eq!(samuel(&ideal(&[&[2, 0], &[0, 3]])).unwrap(), BigInt::from(6));
        assert_eq!(samuel(&MonomialIdeal::maximal(3)).unwrap(), BigInt::from(1));
    }

    #[test]
    fn mixed_examples() {
        let m = MonomialIdeal::maximal(2);
        let r = mixed_dim2(&m, &m).unwrap();
        assert_eq!((r.mixed.clone(), r.r_residual.clone()), (q_int(1), Q::zero()));
        let r = mixed_dim2(&ideal(&[&[2, 0], &[0, 1]]), &ideal(&[&[1, 0], &[0, 2]])).unwrap();
        assert_eq!((r.mixed.clone(), r.r_residual.clone()), (q_int(1), Q::zero()));
        let j = ideal(&[&[2, 0], &[1, 2], &[0, 3]]);
        let r = mixed_dim2(&m, &j).unwrap();
        assert_eq!(r.mixed, q_int(2));
        assert_eq!(r.e_ij, BigInt::from(11));
        assert_eq!(r.length_ij, BigUint::from(8u32));
        assert!(r.r_vanishes());
        assert!(mixed_dim2(&MonomialIdeal::maximal(3), &MonomialIdeal::maximal(3)).is_err());
    }

    #[test]
    fn verma_examples() {
        let m = MonomialIdeal::maximal(2);
        assert_eq!(verma_rhs(&[m.clone()], &[3], CrossSum::Strict).unwrap(), BigInt::from(6));
        let j = ideal(&[&[2, 0], &[1, 2], &[0, 3]]);
        let pair = [m.clone(), j];
        assert_eq!(verma_rhs(&pair, &[1, 1], CrossSum::Strict).unwrap(), BigInt::from(8));
        assert_eq!(verma_rhs(&pair, &[0, 0], CrossSum::Strict).unwrap(), BigInt::zero());
        // r((x^2, y^2)|m) = 6 - 4 - 1 - 2 = -1
        let bad = ideal(&[&[2, 0], &[0, 2]]);
        assert!(matches!(
            verma_rhs(&[bad, m], &[1, 1], CrossSum::Strict),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn family_rhs_powers_of_m() {
        let f = FamilyExpr::ordinary_power(MonomialIdeal::maximal(2));
        let rhs = dim2_family_rhs(&[f.clone()], &[0], p2(), 5, CrossSum::Strict).unwrap();
        for entry in &rhs.entries {
            let k = rational::q_pow(2, entry.b);
            assert_eq!(entry.value, (Q::one() + Q::one() / k) / q_int(2));
        }
        assert_eq!(rhs.cauchy, q_frac(1, 64));
        let inclusive = dim2_family_rhs(&[f], &[0], p2(), 5, CrossSum::Inclusive).unwrap();
        assert_eq!(&inclusive.extrapolated - &rhs.extrapolated, q_int(1));
    }

    #[test]
    fn family_rhs_closed_power_tends_to_half_e() {
        let f = FamilyExpr::closed_power(ideal(&[&[2, 0], &[0, 3]]));
        let rhs = dim2_family_rhs(&[f], &[0], p2(), 6, CrossSum::Strict).unwrap();
        let err = rational::abs_diff(&rhs.extrapolated, &q_int(3));
        assert!(err < q_frac(1, 8));
    }

    #[test]
    fn family_rhs_rejects_frobenius() {
        let f = FamilyExpr::frobenius(MonomialIdeal::maximal(2));
        assert!(matches!(
            dim2_family_rhs(&[f], &[0], p2(), 2, CrossSum::Strict),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn e_vs_ehk_examples() {
        let i = ideal(&[&[2, 0], &[1, 1], &[0, 3]]);
        let rep = e_vs_ehk_check(&FamilyExpr::ordinary_power(i), p2(), 6).unwrap();
        assert!(rep.rows.iter().all(|r| r.samuel == q_int(5)));
        assert!(rep.gap_nonincreasing);
        assert!(rep.rows.last().unwrap().gap < q_frac(1, 4));
        let rep = e_vs_ehk_check(&FamilyExpr::ordinary_power(MonomialIdeal::maximal(2)), p2(), 4).unwrap();
        for r in &rep.rows {
            assert_eq!(r.samuel, q_int(1));
            assert_eq!(r.scaled_hk, Q::one() + Q::one() / rational::q_u(r.q));
        }
        let frob = FamilyExpr::frobenius(MonomialIdeal::maximal(2));
        assert!(e_vs_ehk_check(&frob, p2(), 2).is_err());
    }
}
