//! Symbolic p-families `q = p^e ↦ I_q`, their truncations and shifted
//! products, and horizon-bounded checks of the family axioms.

use serde::{Deserialize, Serialize};

use crate::counting::max_degree_of_difference;
use crate::error::{Error, Result};
use crate::monomial::{Exponent, MonomialIdeal, Prime};
use crate::polytope::closed_power;

/// Index base of a [`FamilyExpr::ShiftedProduct`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Base {
    /// `𝐈_{qm̄} = ∏ I(i)_{q·p^{m_i}}`.
    Live,
    /// `𝐈(p^b)^{qm̄} = ∏ I(i)_{p^b}^{[q·p^{m_i}]}`.
    Frozen(u32),
}

/// One factor of a shifted product: a family and its shift exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub family: FamilyExpr,
    pub shift: u32,
}

/// A rule producing a monomial ideal for every `q = p^e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum FamilyExpr {
    /// `I_q = I^{[q]}`
    Frobenius { ideal: MonomialIdeal },
    /// `I_q = I^q`
    OrdinaryPower { ideal: MonomialIdeal },
    /// `I_q = closure(I^q)`
    ClosedPower { ideal: MonomialIdeal },
    /// `I_q = I`
    Constant { ideal: MonomialIdeal },
    /// Explicit ideals for `e = 0..len`; later terms are Frobenius powers of
    /// the last entry.
    Table { ideals: Vec<MonomialIdeal> },
    /// The `p^a`-th truncation of `arg`.
    #[serde(rename = "truncate")]
    Truncation { a: u32, arg: Box<FamilyExpr> },
    ShiftedProduct {
        #[serde(with = "base_serde", default = "live")]
        base_b: Base,
        factors: Vec<Factor>,
    },
}

fn live() -> Base {
    Base::Live
}

mod base_serde {
    use super::Base;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(b: &Base, s: S) -> Result<S::Ok, S::Error> {
        match b {
            Base::Live => "live".serialize(s),
            Base::Frozen(b) => b.serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Base, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Null => Ok(Base::Live),
            serde_json::Value::String(s) if s == "live" => Ok(Base::Live),
            serde_json::Value::Number(n) => n
                .as_u64()
                .and_then(|v| u32::try_from(v).ok())
                .map(Base::Frozen)
                .ok_or_else(|| serde::de::Error::custom("base_b must be a nonnegative integer")),
            other => Err(serde::de::Error::custom(format!("invalid base_b: {other}"))),
        }
    }
}

impl FamilyExpr {
    pub fn frobenius(ideal: MonomialIdeal) -> Self {
        FamilyExpr::Frobenius { ideal }
    }

    pub fn ordinary_power(ideal: MonomialIdeal) -> Self {
        FamilyExpr::OrdinaryPower { ideal }
    }

    pub fn closed_power(ideal: MonomialIdeal) -> Self {
        FamilyExpr::ClosedPower { ideal }
    }

    pub fn constant(ideal: MonomialIdeal) -> Self {
        FamilyExpr::Constant { ideal }
    }

    pub fn table(ideals: Vec<MonomialIdeal>) -> Self {
        FamilyExpr::Table { ideals }
    }

    pub fn shifted_product(factors: Vec<(FamilyExpr, u32)>, base: Base) -> Self {
        FamilyExpr::ShiftedProduct {
            base_b: base,
            factors: factors
                .into_iter()
                .map(|(family, shift)| Factor { family, shift })
                .collect(),
        }
    }

    /// Ambient dimension, validating that all constituents agree.
    pub fn dim(&self) -> Result<usize> {
        match self {
            FamilyExpr::Frobenius { ideal }
            | FamilyExpr::OrdinaryPower { ideal }
            | FamilyExpr::ClosedPower { ideal }
            | FamilyExpr::Constant { ideal } => Ok(ideal.dim()),
            FamilyExpr::Table { ideals } => {
                let first = ideals
                    .first()
                    .ok_or_else(|| Error::Invalid("table family needs at least one ideal".into()))?;
                same_dim(first.dim(), ideals.iter().map(|i| Ok(i.dim())))
            }
            FamilyExpr::Truncation { arg, .. } => arg.dim(),
            FamilyExpr::ShiftedProduct { factors, .. } => {
                let first = factors
                    .first()
                    .ok_or_else(|| Error::Invalid("shifted product needs at least one factor".into()))?;
                same_dim(first.family.dim()?, factors.iter().map(|f| f.family.dim()))
            }
        }
    }

    /// The ideal at index `q = p^e`.
    pub fn evaluate(&self, p: Prime, e: u32) -> Result<MonomialIdeal> {
        match self {
            FamilyExpr::Frobenius { ideal } => ideal.frobenius_unchecked(p.pow(e)?),
            FamilyExpr::OrdinaryPower { ideal } => ideal.ordinary_power(p.pow(e)?),
            FamilyExpr::ClosedPower { ideal } => closed_power(ideal, p.pow(e)?),
            FamilyExpr::Constant { ideal } => Ok(ideal.clone()),
            FamilyExpr::Table { ideals } => {
                let last = ideals.len().checked_sub(1).ok_or(Error::TableIndex(e))? as u32;
                if e <= last {
                    Ok(ideals[e as usize].clone())
                } else {
                    ideals[last as usize].frobenius_unchecked(p.pow(e - last)?)
                }
            }
            FamilyExpr::Truncation { a, arg } => {
                if e <= *a {
                    return arg.evaluate(p, e);
                }
                // J_{p^a,p^e} = J_1^{[p^e]} + J_p^{[p^{e-1}]} + ... + J_{p^a}^{[p^{e-a}]}
                let mut acc = MonomialIdeal::zero(self.dim()?);
                for i in 0..=*a {
                    let term = arg.evaluate(p, i)?.frobenius_unchecked(p.pow(e - i)?)?;
                    acc = acc.sum(&term)?;
                }
                Ok(acc)
            }
            FamilyExpr::ShiftedProduct { base_b, factors } => {
                let mut acc = MonomialIdeal::unit(self.dim()?);
                for f in factors {
                    let term = match base_b {
                        Base::Live => f.family.evaluate(p, e + f.shift)?,
                        Base::Frozen(b) => f
                            .family
                            .evaluate(p, *b)?
                            .frobenius_unchecked(p.pow(e + f.shift)?)?,
                    };
                    acc = acc.product(&term)?;
                }
                Ok(acc)
            }
        }
    }

    /// Upper bound on the finite-type threshold read off the expression
    /// itself, or `None` when the expression gives no guarantee.
    pub fn structural_threshold(&self) -> Option<u32> {
        let trivial = |i: &MonomialIdeal| i.is_zero() || i.gens().len() == 1;
        match self {
            FamilyExpr::Frobenius { .. } => Some(0),
            FamilyExpr::OrdinaryPower { ideal } | FamilyExpr::ClosedPower { ideal } => {
                trivial(ideal).then_some(0)
            }
            FamilyExpr::Constant { ideal } => (ideal.is_zero() || ideal.is_unit()).then_some(0),
            FamilyExpr::Table { ideals } => Some(ideals.len().saturating_sub(1) as u32),
            FamilyExpr::Truncation { a, arg } => {
                Some(arg.structural_threshold().map_or(*a, |t| t.min(*a)))
            }
            FamilyExpr::ShiftedProduct { base_b, factors } => match base_b {
                Base::Frozen(_) => Some(0),
                Base::Live => factors.iter().try_fold(0u32, |acc, f| {
                    let t = f.family.structural_threshold()?;
                    Some(acc.max(t.saturating_sub(f.shift)))
                }),
            },
        }
    }
}

fn same_dim(expected: usize, dims: impl Iterator<Item = Result<usize>>) -> Result<usize> {
    for d in dims {
        let d = d?;
        if d != expected {
            return Err(Error::DimensionMismatch { expected, found: d });
        }
    }
    Ok(expected)
}

/// The `p^a`-th truncated family of `f`.
pub fn truncate(f: &FamilyExpr, a: u32) -> FamilyExpr {
    FamilyExpr::Truncation {
        a,
        arg: Box::new(f.clone()),
    }
}

/// Which family axiom a [`AxiomFailure`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// `I_q^{[p]} ⊆ I_{pq}`
    PFamily,
    /// `I_q^p ⊆ I_{pq}`
    Condition41,
}

/// A failed containment at index `q = p^e`, with a generator of the left
/// side that is missing from `I_{pq}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    pub axiom: Axiom,
    pub e: u32,
    pub witness: Exponent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub p_family_ok: bool,
    pub condition_41_ok: bool,
    pub finite_type_threshold: Option<u32>,
    pub checked_up_to: u32,
    pub failures: Vec<AxiomFailure>,
}

impl FamilyReport {
    pub fn first_failure(&self, axiom: Axiom) -> Option<&AxiomFailure> {
        self.failures.iter().find(|f| f.axiom == axiom)
    }
}

/// Checks the p-family axiom, the power condition `I_q^p ⊆ I_{pq}` and finite type for
/// `e <= e_max`. Failures are collected, never thrown.
pub fn verify_family_axioms(f: &FamilyExpr, p: Prime, e_max: u32) -> Result<FamilyReport> {
    if e_max == 0 {
        return Err(Error::Invalid("e_max must be at least 1".into()));
    }
    let terms: Vec<MonomialIdeal> = (0..=e_max).map(|e| f.evaluate(p, e)).collect::<Result<_>>()?;
    let mut failures = Vec::new();
    for e in 0..e_max {
        let (cur, next) = (&terms[e as usize], &terms[e as usize + 1]);
        let frob = cur.frobenius_unchecked(p.get())?;
        if let Some(w) = frob.not_contained_witness(next) {
            failures.push(AxiomFailure {
                axiom: Axiom::PFamily,
                e,
                witness: w.clone(),
            });
        }
        let pow = cur.ordinary_power(p.get())?;
        if let Some(w) = pow.not_contained_witness(next) {
            failures.push(AxiomFailure {
                axiom: Axiom::Condition41,
                e,
                witness: w.clone(),
            });
        }
    }
    let threshold = (0..e_max).find(|&a| {
        (1..=e_max - a).all(|k| {
            p.pow(k)
                .and_then(|q| terms[a as usize].frobenius_unchecked(q))
                .map(|lhs| lhs == terms[(a + k) as usize])
                .unwrap_or(false)
        })
    });
    Ok(FamilyReport {
        p_family_ok: failures.iter().all(|x| x.axiom != Axiom::PFamily),
        condition_41_ok: failures.iter().all(|x| x.axiom != Axiom::Condition41),
        finite_type_threshold: threshold,
        checked_up_to: e_max,
        failures,
    })
}

/// Smallest `c` in `1..=c_max` with `m^{cq} ∩ J_q = m^{cq} ∩ I_q` for every
/// `q = p^e`, `e <= e_max`.
///
/// Since `I_q ⊆ J_q`, the equality says every monomial of `J_q \ I_q` has
/// degree below `cq`, so the bound comes from the top degree of the
/// difference.
pub fn linear_growth_constant(
    jfam: &FamilyExpr,
    ifam: &FamilyExpr,
    p: Prime,
    c_max: u64,
    e_max: u32,
) -> Result<Option<u64>> {
    let mut c: u64 = 1;
    for e in 0..=e_max {
        let j = jfam.evaluate(p, e)?;
        let i = ifam.evaluate(p, e)?;
        if let Some(w) = i.not_contained_witness(&j) {
            return Err(Error::NotContained(format!(
                "I_q ⊄ J_q at e = {e}: generator {w} of I_q"
            )));
        }
        let q = p.pow(e)? as u128;
        match max_degree_of_difference(&j, &i) {
            Ok(None) => {}
            Ok(Some(top)) => {
                let need = top / q + 1;
                c = c.max(u64::try_from(need).map_err(|_| Error::Overflow("linear growth"))?);
            }
            Err(Error::InfiniteLength) => return Ok(None),
            Err(other) => return Err(other),
        }
        if c > c_max {
            return Ok(None);
        }
    }
    Ok(Some(c))
}
