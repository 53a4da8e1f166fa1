//! Normalized length sequences `λ(𝐉/𝐈𝐉)/q^d` for live and frozen-base
//! shifted products, and the double-limit comparison table.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::relative_colength;
use crate::error::{Error, Result};
use crate::family::{linear_growth_constant, verify_family_axioms, Axiom, Base, Factor, FamilyExpr};
use crate::monomial::{Exponent, MonomialIdeal, Prime};
use crate::rational::{self, Q};

/// Default PASS tolerance, relative: `2^-5`.
pub fn default_tolerance() -> Q {
    rational::q_frac(1, 32)
}

/// Largest linear-growth constant searched for.
const GROWTH_CAP: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `1/q^d`
    PerQd,
    /// `1/(p^{bd} q^d)`
    PerPbdQd,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeqEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u32>,
    pub e: u32,
    pub q: u64,
    #[serde(with = "rational::as_string")]
    pub value: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitSequence {
    pub entries: Vec<SeqEntry>,
    pub normalization: Normalization,
    /// `|v_last − v_prev|`
    #[serde(with = "rational::as_string")]
    pub cauchy: Q,
    /// Value at the largest index.
    #[serde(with = "rational::as_string")]
    pub extrapolated: Q,
}

impl LimitSequence {
    fn from_entries(entries: Vec<SeqEntry>, normalization: Normalization) -> Self {
        let n = entries.len();
        let extrapolated = entries.last().map(|x| x.value.clone()).unwrap_or_else(Q::zero);
        let cauchy = if n >= 2 {
            rational::abs_diff(&entries[n - 1].value, &entries[n - 2].value)
        } else {
            Q::zero()
        };
        LimitSequence {
            entries,
            normalization,
            cauchy,
            extrapolated,
        }
    }

    /// One Richardson step assuming an `O(1/q)` error:
    /// `(p·v_e − v_{e−1})/(p − 1)`.
    pub fn richardson(&self, p: Prime) -> Option<Q> {
        let n = self.entries.len();
        if n < 2 {
            return None;
        }
        let pq = rational::q_u(p.get());
        let one = rational::q_int(1);
        Some((&pq * &self.entries[n - 1].value - &self.entries[n - 2].value) / (pq - one))
    }
}

/// A side of the comparison: `∏ F_k` at shifted indices.
fn product_family(factors: &[Factor], base: Base, dim: usize) -> FamilyExpr {
    if factors.is_empty() {
        FamilyExpr::constant(MonomialIdeal::unit(dim))
    } else {
        FamilyExpr::ShiftedProduct {
            base_b: base,
            factors: factors.to_vec(),
        }
    }
}

fn common_dim(j: &[Factor], i: &[Factor]) -> Result<usize> {
    let mut dim = None;
    for f in j.iter().chain(i) {
        let d = f.family.dim()?;
        match dim {
            None => dim = Some(d),
            Some(x) if x != d => return Err(Error::DimensionMismatch { expected: x, found: d }),
            _ => {}
        }
    }
    dim.ok_or_else(|| Error::Invalid("at least one I-family is required".into()))
}

/// `λ(𝐉_q/𝐈_q𝐉_q)` normalized, for one index.
fn normalized_length(
    jfam: &FamilyExpr,
    ifam: &FamilyExpr,
    p: Prime,
    b: Option<u32>,
    e: u32,
    dim: usize,
) -> Result<Q> {
    let run = || -> Result<Q> {
        let i = ifam.evaluate(p, e)?;
        if !i.is_m_primary() {
            return Err(Error::NotMPrimary);
        }
        let j = jfam.evaluate(p, e)?;
        let h = i.product(&j)?;
        let len = relative_colength(&j, &h)?;
        let q = p.pow(e)?;
        let mut norm = rational::q_pow(q, dim as u32);
        if let Some(b) = b {
            norm *= rational::q_pow(p.pow(b)?, dim as u32);
        }
        Ok(rational::q_big(&len) / norm)
    };
    run().map_err(|err| err.at(b, e))
}

/// The sequence `e ↦ λ(𝐉_q/𝐈_q𝐉_q)/q^d` (live base) or
/// `λ(𝐉(p^b)^{qn̄}/𝐈(p^b)^{qm̄}𝐉(p^b)^{qn̄})/(p^{bd} q^d)` (frozen base).
/// An empty `j` stands for the unit ideal.
pub fn length_sequence(j: &[Factor], i: &[Factor], p: Prime, base: Base, e_max: u32) -> Result<LimitSequence> {
    if i.is_empty() {
        return Err(Error::Invalid("at least one I-family is required".into()));
    }
    let dim = common_dim(j, i)?;
    let jfam = product_family(j, base, dim);
    let ifam = product_family(i, base, dim);
    let (b, normalization) = match base {
        Base::Live => (None, Normalization::PerQd),
        Base::Frozen(b) => (Some(b), Normalization::PerPbdQd),
    };
    let values = (0..=e_max)
        .into_par_iter()
        .map(|e| normalized_length(&jfam, &ifam, p, b, e, dim))
        .collect::<Result<Vec<Q>>>()?;
    let entries = values
        .into_iter()
        .enumerate()
        .map(|(e, value)| {
            let e = e as u32;
            Ok(SeqEntry {
                b,
                e,
                q: p.pow(e)?,
                value,
            })
        })
        .collect::<Result<_>>()?;
    Ok(LimitSequence::from_entries(entries, normalization))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    J,
    I,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// A family breaks the p-family axiom; no equality is claimed.
    AxiomFailure {
        side: Side,
        family: usize,
        e: u32,
        witness: Exponent,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoubleLimitReport {
    /// `lhs[b][e]`, frozen base `b`.
    #[serde(serialize_with = "matrix_as_string")]
    pub lhs: Vec<Vec<Q>>,
    /// `rhs[e]`, live base.
    #[serde(with = "rational::vec_as_string")]
    pub rhs: Vec<Q>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_q")]
    pub difference: Option<Q>,
    #[serde(with = "rational::as_string")]
    pub tolerance: Q,
    /// Smallest `c` with `m^{cq} ∩ 𝐉_q = m^{cq} ∩ 𝐈_q𝐉_q` on the horizon.
    pub linear_growth: Option<u64>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

fn matrix_as_string<S: serde::Serializer>(m: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(rational::render_q).collect()).collect();
    serde::Serialize::serialize(&rows, s)
}

fn opt_q<S: serde::Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.serialize_str(&rational::render_q(q)),
        None => s.serialize_none(),
    }
}

/// Whether `|lhs − rhs| <= τ·|rhs|`, or `<= τ` when `rhs = 0`.
pub fn within_tolerance(lhs: &Q, rhs: &Q, tol: &Q) -> bool {
    let diff = rational::abs_diff(lhs, rhs);
    if rhs.is_zero() {
        diff <= *tol
    } else {
        diff <= tol * rhs.abs()
    }
}

/// Frozen-base lengths `LHS(b, e)` against live lengths `RHS(e)`. The
/// verdict compares `LHS(b_max, e_max)` with `RHS(e_max)`.
pub fn double_limit_table(
    j: &[Factor],
    i: &[Factor],
    p: Prime,
    b_max: u32,
    e_max: u32,
    tol: &Q,
) -> Result<DoubleLimitReport> {
    let dim = common_dim(j, i)?;
    let max_shift = j.iter().chain(i).map(|f| f.shift).max().unwrap_or(0);
    let horizon = b_max.max(e_max + max_shift).max(1);
    for (side, list) in [(Side::J, j), (Side::I, i)] {
        for (k, f) in list.iter().enumerate() {
            let report = verify_family_axioms(&f.family, p, horizon)?;
            if let Some(fail) = report.first_failure(Axiom::PFamily) {
                return Ok(DoubleLimitReport {
                    lhs: Vec::new(),
                    rhs: Vec::new(),
                    difference: None,
                    tolerance: tol.clone(),
                    linear_growth: None,
                    verdict: Verdict::AxiomFailure {
                        side,
                        family: k,
                        e: fail.e,
                        witness: fail.witness.clone(),
                    },
                });
            }
        }
    }

    let jlive = product_family(j, Base::Live, dim);
    let ilive = product_family(i, Base::Live, dim);
    let both: Vec<Factor> = j.iter().chain(i).cloned().collect();
    let hlive = product_family(&both, Base::Live, dim);
    let linear_growth = linear_growth_constant(&jlive, &hlive, p, GROWTH_CAP, e_max)?;

    let cells: Vec<(u32, u32)> = (0..=b_max).flat_map(|b| (0..=e_max).map(move |e| (b, e))).collect();
    let flat = cells
        .par_iter()
        .map(|&(b, e)| {
            let jb = product_family(j, Base::Frozen(b), dim);
            let ib = product_family(i, Base::Frozen(b), dim);
            normalized_length(&jb, &ib, p, Some(b), e, dim)
        })
        .collect::<Result<Vec<Q>>>()?;
    let lhs: Vec<Vec<Q>> = flat.chunks(e_max as usize + 1).map(|c| c.to_vec()).collect();
    let rhs = (0..=e_max)
        .into_par_iter()
        .map(|e| normalized_length(&jlive, &ilive, p, None, e, dim))
        .collect::<Result<Vec<Q>>>()?;

    let last_l = &lhs[b_max as usize][e_max as usize];
    let last_r = &rhs[e_max as usize];
    let verdict = if within_tolerance(last_l, last_r, tol) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(DoubleLimitReport {
        difference: Some(rational::abs_diff(last_l, last_r)),
        lhs,
        rhs,
        tolerance: tol.clone(),
        linear_growth,
        verdict,
    })
}
