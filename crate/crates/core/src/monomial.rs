//! Exponent vectors and monomial ideals in `d` variables.
//!
//! A monomial ideal is stored by its minimal generators, kept sorted in
//! lexicographic order so that structural equality is ideal equality. The
//! empty generator list is the zero ideal; the single generator `0` is the
//! unit ideal.

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Exponent vector of a monomial; componentwise order is divisibility.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(pub SmallVec<[u64; 4]>);

impl Exponent {
    pub fn new(coords: &[u64]) -> Self {
        Exponent(SmallVec::from_slice(coords))
    }

    pub fn zero(dim: usize) -> Self {
        Exponent(SmallVec::from_elem(0, dim))
    }

    /// `k`-th power of the `axis`-th variable.
    pub fn pure(dim: usize, axis: usize, k: u64) -> Self {
        let mut e = Self::zero(dim);
        e.0[axis] = k;
        e
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn degree(&self) -> u128 {
        self.0.iter().map(|&c| c as u128).sum()
    }

    /// Componentwise `self <= other`, i.e. `x^self` divides `x^other`.
    pub fn divides(&self, other: &Exponent) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn checked_add(&self, other: &Exponent) -> Result<Exponent> {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.checked_add(*b))
            .collect::<Option<SmallVec<_>>>()
            .map(Exponent)
            .ok_or(Error::Overflow("exponent sum"))
    }

    pub fn checked_scale(&self, k: u64) -> Result<Exponent> {
        self.0
            .iter()
            .map(|a| a.checked_mul(k))
            .collect::<Option<SmallVec<_>>>()
            .map(Exponent)
            .ok_or(Error::Overflow("exponent scaling"))
    }

    pub fn lcm(&self, other: &Exponent) -> Exponent {
        Exponent(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// `max(self - other, 0)` componentwise: the generator of `(x^self) : x^other`.
    pub fn saturating_sub(&self, other: &Exponent) -> Exponent {
        Exponent(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a.saturating_sub(*b))
                .collect(),
        )
    }

    /// Axis on which this is a pure power, if any (`None` for the zero vector).
    pub fn pure_axis(&self) -> Option<usize> {
        let mut nz = self.0.iter().enumerate().filter(|(_, &c)| c > 0);
        match (nz.next(), nz.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Reduces a set of points to its minimal elements under the componentwise
/// order. Works for any totally ordered coordinate type; the result is sorted
/// lexicographically and free of duplicates.
pub fn minimal_elements<T: Ord + Clone>(mut pts: Vec<Vec<T>>) -> Vec<Vec<T>> {
    pts.sort();
    pts.dedup();
    let Some(first) = pts.first() else {
        return pts;
    };
    match first.len() {
        0 | 1 => {
            pts.truncate(1);
            pts
        }
        2 => {
            // In lex order a dominating point always comes earlier, so a
            // point survives iff its y is below every y seen so far.
            let mut out: Vec<Vec<T>> = Vec::new();
            for p in pts {
                if out.last().map_or(true, |q| p[1] < q[1]) {
                    out.push(p);
                }
            }
            out
        }
        _ => {
            let mut out: Vec<Vec<T>> = Vec::new();
            for p in pts {
                if !out.iter().any(|q| q.iter().zip(&p).all(|(a, b)| a <= b)) {
                    out.push(p);
                }
            }
            out
        }
    }
}

/// Which binary operation [`combine`] performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    Sum,
    Product,
    Intersection,
    Colon,
}

/// Ordinary or Frobenius power for [`MonomialIdeal::power`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMode {
    Ordinary,
    /// Frobenius power in characteristic `p`; the exponent must be a power of `p`.
    Frobenius { p: Prime },
}

/// A validated prime characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut k = 2u64;
        while k.saturating_mul(k) <= p {
            if p % k == 0 {
                return Err(Error::NotPrime(p));
            }
            k += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^e`, with overflow reported.
    pub fn pow(self, e: u32) -> Result<u64> {
        self.0.checked_pow(e).ok_or(Error::Overflow("p^e"))
    }

    /// Returns `e` with `n = p^e`, if `n` is a power of `p`.
    pub fn log(self, mut n: u64) -> Option<u32> {
        if n == 0 {
            return None;
        }
        let mut e = 0;
        while n % self.0 == 0 {
            n /= self.0;
            e += 1;
        }
        (n == 1).then_some(e)
    }
}

/// A monomial ideal given by its minimal generators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MonomialIdeal {
    dim: usize,
    gens: Vec<Exponent>,
}

impl MonomialIdeal {
    /// Builds the ideal generated by `gens`, minimalizing them.
    pub fn new(dim: usize, gens: Vec<Exponent>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if let Some(bad) = gens.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self::from_unchecked(dim, gens))
    }

    /// Convenience constructor from integer rows.
    pub fn from_rows(dim: usize, rows: &[&[u64]]) -> Result<Self> {
        Self::new(dim, rows.iter().map(|r| Exponent::new(r)).collect())
    }

    pub(crate) fn from_unchecked(dim: usize, gens: Vec<Exponent>) -> Self {
        let pts = gens.into_iter().map(|g| g.0.to_vec()).collect();
        let gens = minimal_elements(pts)
            .into_iter()
            .map(|v| Exponent(SmallVec::from_vec(v)))
            .collect();
        MonomialIdeal { dim, gens }
    }

    pub fn zero(dim: usize) -> Self {
        MonomialIdeal { dim, gens: vec![] }
    }

    pub fn unit(dim: usize) -> Self {
        MonomialIdeal {
            dim,
            gens: vec![Exponent::zero(dim)],
        }
    }

    /// The maximal ideal `(x_1, ..., x_d)`.
    pub fn maximal(dim: usize) -> Self {
        Self::from_unchecked(dim, (0..dim).map(|i| Exponent::pure(dim, i, 1)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[Exponent] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.gens.len() == 1 && self.gens[0].0.iter().all(|&c| c == 0)
    }

    pub fn contains(&self, u: &Exponent) -> bool {
        self.gens.iter().any(|g| g.divides(u))
    }

    /// Returns a generator of `self` outside `other`, if `self ⊄ other`.
    pub fn not_contained_witness(&self, other: &MonomialIdeal) -> Option<&Exponent> {
        self.gens.iter().find(|g| !other.contains(g))
    }

    pub fn is_subset(&self, other: &MonomialIdeal) -> bool {
        self.not_contained_witness(other).is_none()
    }

    /// True iff every variable has a pure power among the generators.
    pub fn is_m_primary(&self) -> bool {
        if self.is_unit() {
            return true;
        }
        let mut seen = vec![false; self.dim];
        for g in &self.gens {
            if let Some(i) = g.pure_axis() {
                seen[i] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Exponent of the pure power of `x_axis` among the generators.
    pub fn pure_power(&self, axis: usize) -> Option<u64> {
        self.gens
            .iter()
            .filter(|g| g.0.iter().enumerate().all(|(i, &c)| i == axis || c == 0))
            .map(|g| g.0[axis])
            .min()
    }

    fn check_dim(&self, other: &MonomialIdeal) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        self.check_dim(other)?;
        let gens = self.gens.iter().chain(&other.gens).cloned().collect();
        Ok(Self::from_unchecked(self.dim, gens))
    }

    pub fn product(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        self.check_dim(other)?;
        let mut gens = Vec::with_capacity(self.gens.len() * other.gens.len());
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a.checked_add(b)?);
            }
        }
        Ok(Self::from_unchecked(self.dim, gens))
    }

    pub fn intersection(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        self.check_dim(other)?;
        let mut gens = Vec::with_capacity(self.gens.len() * other.gens.len());
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a.lcm(b));
            }
        }
        Ok(Self::from_unchecked(self.dim, gens))
    }

    /// `self : x^m`.
    pub fn colon_monomial(&self, m: &Exponent) -> Result<MonomialIdeal> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.dim(),
            });
        }
        let gens = self.gens.iter().map(|g| g.saturating_sub(m)).collect();
        Ok(Self::from_unchecked(self.dim, gens))
    }

    /// `self : other`, the intersection of the colons by each generator.
    pub fn colon(&self, other: &MonomialIdeal) -> Result<MonomialIdeal> {
        self.check_dim(other)?;
        let mut acc = MonomialIdeal::unit(self.dim);
        for m in &other.gens {
            acc = acc.intersection(&self.colon_monomial(m)?)?;
        }
        Ok(acc)
    }

    /// `I^{[q]}` without validating `q` against a characteristic.
    pub fn frobenius_unchecked(&self, q: u64) -> Result<MonomialIdeal> {
        let gens = self
            .gens
            .iter()
            .map(|g| g.checked_scale(q))
            .collect::<Result<Vec<_>>>()?;
        // Scaling preserves the antichain and lex order.
        Ok(MonomialIdeal {
            dim: self.dim,
            gens,
        })
    }

    pub fn ordinary_power(&self, mut n: u64) -> Result<MonomialIdeal> {
        let mut acc = MonomialIdeal::unit(self.dim);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.product(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.product(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn power(&self, n: u64, mode: PowerMode) -> Result<MonomialIdeal> {
        match mode {
            PowerMode::Ordinary => self.ordinary_power(n),
            PowerMode::Frobenius { p } => {
                if p.log(n).is_none() {
                    return Err(Error::NotPowerOfP { n, p: p.get() });
                }
                self.frobenius_unchecked(n)
            }
        }
    }

    /// Largest coordinate of any generator along `axis`.
    pub fn max_coord(&self, axis: usize) -> u64 {
        self.gens.iter().map(|g| g.0[axis]).max().unwrap_or(0)
    }
}

/// Returns the antichain generating the same ideal as `gens`.
pub fn minimalize(gens: Vec<Exponent>) -> Result<MonomialIdeal> {
    let dim = match gens.first() {
        Some(g) => g.dim(),
        None => return Err(Error::Invalid("cannot infer dimension of an empty generator set".into())),
    };
    MonomialIdeal::new(dim, gens)
}

pub fn combine(a: &MonomialIdeal, b: &MonomialIdeal, kind: Combine) -> Result<MonomialIdeal> {
    match kind {
        Combine::Sum => a.sum(b),
        Combine::Product => a.product(b),
        Combine::Intersection => a.intersection(b),
        Combine::Colon => a.colon(b),
    }
}

/// Product of a list of ideals; the empty product is the unit ideal.
pub fn product_all<'a>(
    dim: usize,
    ideals: impl IntoIterator<Item = &'a MonomialIdeal>,
) -> Result<MonomialIdeal> {
    let mut acc = MonomialIdeal::unit(dim);
    for i in ideals {
        acc = acc.product(i)?;
    }
    Ok(acc)
}

impl fmt::Debug for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonomialIdeal(d={}, {:?})", self.dim, self.gens)
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct IdealJson {
    dim: usize,
    gens: Vec<Vec<u64>>,
}

impl Serialize for MonomialIdeal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IdealJson {
            dim: self.dim,
            gens: self.gens.iter().map(|g| g.0.to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MonomialIdeal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = IdealJson::deserialize(d)?;
        MonomialIdeal::new(
            raw.dim,
            raw.gens.iter().map(|g| Exponent::new(g)).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}
