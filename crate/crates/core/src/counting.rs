//! Exact lattice-point counting for monomial ideals: colengths, relative
//! colengths and counts below a truncating halfspace.

use std::ops::{Add, Mul};

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::{minimal_elements, Exponent, MonomialIdeal};
use crate::rational::{self, Q};

/// Upper limit on the number of grid cells a sweep may visit.
pub const CELL_CAP: u128 = 100_000_000;

/// Upper limit on `#gens(J)` for [`relative_colength_inclusion_exclusion`].
pub const INCLUSION_EXCLUSION_CAP: usize = 20;

/// Open halfspace `{u : <u, normal> < bound}` with a strictly positive normal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HalfspaceJson", into = "HalfspaceJson")]
pub struct Halfspace {
    normal: Vec<Q>,
    bound: Q,
}

#[derive(Serialize, Deserialize)]
struct HalfspaceJson {
    #[serde(with = "rational::vec_as_string")]
    normal: Vec<Q>,
    #[serde(with = "rational::as_string")]
    bound: Q,
}

impl TryFrom<HalfspaceJson> for Halfspace {
    type Error = Error;
    fn try_from(h: HalfspaceJson) -> Result<Self> {
        Halfspace::new(h.normal, h.bound)
    }
}

impl From<Halfspace> for HalfspaceJson {
    fn from(h: Halfspace) -> Self {
        HalfspaceJson {
            normal: h.normal,
            bound: h.bound,
        }
    }
}

impl Halfspace {
    pub fn new(normal: Vec<Q>, bound: Q) -> Result<Self> {
        if normal.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if normal.iter().any(|a| !a.is_positive()) {
            return Err(Error::Invalid("halfspace normal must be strictly positive".into()));
        }
        Ok(Halfspace { normal, bound })
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn normal(&self) -> &[Q] {
        &self.normal
    }

    pub fn bound(&self) -> &Q {
        &self.bound
    }

    /// The halfspace `qH`, i.e. the bound multiplied by `q`.
    pub fn scaled(&self, q: &Q) -> Halfspace {
        Halfspace {
            normal: self.normal.clone(),
            bound: &self.bound * q,
        }
    }

    pub fn contains(&self, u: &[Q]) -> bool {
        let s: Q = u.iter().zip(&self.normal).map(|(x, a)| x * a).sum();
        s < self.bound
    }
}

/// Sweeps the grid spanned by the coordinates of several point sets, each
/// describing an up-closed union of orthants, and accumulates
/// `span`-weighted cells whose membership pattern satisfies `pred`.
///
/// Cell membership is that of its lower corner, so the sum is exact both
/// for lattice counts over integer generators and for volumes over rational
/// apexes. A selected cell that is unbounded yields [`Error::InfiniteLength`].
pub(crate) fn grid_sweep<T, A>(
    sets: &[Vec<Vec<T>>],
    dim: usize,
    origin: &T,
    pred: &dyn Fn(&[bool]) -> bool,
    span: &dyn Fn(&T, &T) -> A,
) -> Result<A>
where
    T: Ord + Clone,
    A: Zero + One + Clone + Add<Output = A> + Mul<Output = A>,
{
    let mut cells: u128 = 1;
    for axis in 0..dim {
        let mut c: Vec<&T> = sets.iter().flatten().map(|p| &p[axis]).collect();
        c.sort();
        c.dedup();
        cells = cells.saturating_mul(c.len() as u128 + 1);
    }
    if cells > CELL_CAP {
        return Err(Error::TooManyCells {
            cells,
            cap: CELL_CAP,
        });
    }
    sweep_rec(sets, dim, origin, pred, span)
}

fn sweep_rec<T, A>(
    sets: &[Vec<Vec<T>>],
    dim: usize,
    origin: &T,
    pred: &dyn Fn(&[bool]) -> bool,
    span: &dyn Fn(&T, &T) -> A,
) -> Result<A>
where
    T: Ord + Clone,
    A: Zero + One + Clone + Add<Output = A> + Mul<Output = A>,
{
    if dim == 0 {
        let member: Vec<bool> = sets.iter().map(|s| !s.is_empty()).collect();
        return Ok(if pred(&member) { A::one() } else { A::zero() });
    }
    let mut sorted: Vec<Vec<&Vec<T>>> = sets
        .iter()
        .map(|s| {
            let mut v: Vec<&Vec<T>> = s.iter().collect();
            v.sort_by(|a, b| a[0].cmp(&b[0]));
            v
        })
        .collect();
    let mut breaks: Vec<&T> = sets.iter().flatten().map(|p| &p[0]).collect();
    breaks.push(origin);
    breaks.sort();
    breaks.dedup();
    // Coordinates below the origin cannot occur for points in the orthant.
    let breaks: Vec<T> = breaks.into_iter().filter(|b| *b >= origin).cloned().collect();

    let mut cursor = vec![0usize; sets.len()];
    let mut sections: Vec<Vec<Vec<T>>> = vec![Vec::new(); sets.len()];
    let mut total = A::zero();
    for (k, lo) in breaks.iter().enumerate() {
        for (i, s) in sorted.iter_mut().enumerate() {
            let start = cursor[i];
            while cursor[i] < s.len() && s[cursor[i]][0] <= *lo {
                cursor[i] += 1;
            }
            if cursor[i] > start {
                let mut sec = std::mem::take(&mut sections[i]);
                sec.extend(s[start..cursor[i]].iter().map(|p| p[1..].to_vec()));
                sections[i] = minimal_elements(sec);
            }
        }
        let inner = sweep_rec(&sections, dim - 1, origin, pred, span)?;
        if inner.is_zero() {
            continue;
        }
        match breaks.get(k + 1) {
            Some(hi) => total = total + span(lo, hi) * inner,
            None => return Err(Error::InfiniteLength),
        }
    }
    Ok(total)
}

fn as_points(i: &MonomialIdeal) -> Vec<Vec<u64>> {
    i.gens().iter().map(|g| g.coords().to_vec()).collect()
}

fn count_span(lo: &u64, hi: &u64) -> BigUint {
    BigUint::from(hi - lo)
}

/// `λ(R/I)`: the number of monomials outside `I`.
pub fn colength(i: &MonomialIdeal) -> Result<BigUint> {
    if !i.is_m_primary() {
        return Err(Error::NotMPrimary);
    }
    grid_sweep(&[as_points(i)], i.dim(), &0, &|m| !m[0], &count_span)
}

fn check_contained(j: &MonomialIdeal, k: &MonomialIdeal) -> Result<()> {
    if j.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            found: k.dim(),
        });
    }
    if let Some(w) = k.not_contained_witness(j) {
        return Err(Error::NotContained(format!("generator {w} of K is not in J")));
    }
    Ok(())
}

/// `λ(J/K) = #(Exp(J) \ Exp(K))` for `K ⊆ J`, by a grid sweep over the
/// generators of both ideals.
pub fn relative_colength(j: &MonomialIdeal, k: &MonomialIdeal) -> Result<BigUint> {
    check_contained(j, k)?;
    grid_sweep(
        &[as_points(j), as_points(k)],
        j.dim(),
        &0,
        &|m| m[0] && !m[1],
        &count_span,
    )
}

/// `λ(J/K)` by inclusion–exclusion over the generators of `J`:
/// `Σ_{∅≠S} (−1)^{|S|+1} λ(R/(K : lcm(g_S)))`.
pub fn relative_colength_inclusion_exclusion(
    j: &MonomialIdeal,
    k: &MonomialIdeal,
) -> Result<BigUint> {
    check_contained(j, k)?;
    let gens = j.gens();
    if gens.len() > INCLUSION_EXCLUSION_CAP {
        return Err(Error::TooManyGenerators {
            count: gens.len(),
            cap: INCLUSION_EXCLUSION_CAP,
        });
    }
    let mut plus = BigUint::zero();
    let mut minus = BigUint::zero();
    for mask in 1u32..(1u32 << gens.len()) {
        let mut l = Exponent::zero(j.dim());
        for (bit, g) in gens.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                l = l.lcm(g);
            }
        }
        let c = colength(&k.colon_monomial(&l)?).map_err(|e| match e {
            Error::NotMPrimary => Error::InfiniteLength,
            other => other,
        })?;
        if mask.count_ones() % 2 == 1 {
            plus += c;
        } else {
            minus += c;
        }
    }
    Ok(plus - minus)
}

/// `#{u ∈ Exp(I) : <u, a> < α}`.
pub fn count_below(i: &MonomialIdeal, h: &Halfspace) -> Result<BigUint> {
    if h.dim() != i.dim() {
        return Err(Error::DimensionMismatch {
            expected: i.dim(),
            found: h.dim(),
        });
    }
    if !h.bound.is_positive() || i.is_zero() {
        return Ok(BigUint::zero());
    }
    let gens: Vec<&Exponent> = i.gens().iter().collect();
    if let Some((normal, bound)) = integer_halfspace(h) {
        return Ok(BigUint::from(count_below_int(&gens, 0, bound, &normal)));
    }
    count_below_rec(&gens, 0, &Q::zero(), h)
}

/// Clears denominators, if the result fits in `i128`.
fn integer_halfspace(h: &Halfspace) -> Option<(Vec<i128>, i128)> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let lcm = h
        .normal
        .iter()
        .chain(std::iter::once(&h.bound))
        .fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let scale = |x: &Q| (x.numer() * (&lcm / x.denom())).to_i128();
    let normal = h.normal.iter().map(scale).collect::<Option<Vec<_>>>()?;
    let bound = scale(&h.bound)?;
    // keep headroom for `room + a - 1` and the running total
    let cap = i128::MAX / 4;
    (bound < cap && normal.iter().all(|a| *a < cap)).then_some((normal, bound))
}

fn count_below_int(gens: &[&Exponent], axis: usize, room: i128, normal: &[i128]) -> u128 {
    let a = normal[axis];
    if room <= 0 {
        return 0;
    }
    let limit = ((room + a - 1) / a) as u128;
    if axis + 1 == normal.len() {
        return match gens.iter().map(|g| g.coords()[axis] as u128).min() {
            Some(t) if t < limit => limit - t,
            _ => 0,
        };
    }
    let mut sorted: Vec<&Exponent> = gens.to_vec();
    sorted.sort_by_key(|g| g.coords()[axis]);
    let mut total = 0u128;
    let mut active = 0usize;
    for v in 0..limit {
        while active < sorted.len() && sorted[active].coords()[axis] as u128 <= v {
            active += 1;
        }
        if active > 0 {
            total += count_below_int(&sorted[..active], axis + 1, room - a * v as i128, normal);
        }
    }
    total
}

fn count_below_rec(gens: &[&Exponent], axis: usize, partial: &Q, h: &Halfspace) -> Result<BigUint> {
    let a = &h.normal[axis];
    let room = &h.bound - partial;
    // number of integers v >= 0 with a*v < room
    let limit = rational::ceil_to_u64(&(&room / a))?;
    if axis + 1 == h.dim() {
        let threshold = gens.iter().map(|g| g.coords()[axis]).min();
        return Ok(match threshold {
            Some(t) if t < limit => BigUint::from(limit - t),
            _ => BigUint::zero(),
        });
    }
    let mut sorted: Vec<&Exponent> = gens.to_vec();
    sorted.sort_by_key(|g| g.coords()[axis]);
    let mut total = BigUint::zero();
    let mut active: usize = 0;
    for v in 0..limit {
        while active < sorted.len() && sorted[active].coords()[axis] <= v {
            active += 1;
        }
        if active == 0 {
            continue;
        }
        let next = partial + a * Q::from_integer(v.into());
        total += count_below_rec(&sorted[..active], axis + 1, &next, h)?;
    }
    Ok(total)
}

/// Largest total degree of a monomial in `J \ K`, or `None` if the
/// difference is empty. Fails with [`Error::InfiniteLength`] when unbounded.
pub fn max_degree_of_difference(j: &MonomialIdeal, k: &MonomialIdeal) -> Result<Option<u128>> {
    check_contained(j, k)?;
    let dim = j.dim();
    // Collect, per axis, the breakpoints; a selected cell [lo, hi) contributes
    // its top corner hi - 1.
    let sets = [as_points(j), as_points(k)];
    let mut best: Option<u128> = None;
    max_degree_rec(&sets, dim, 0, &mut best)?;
    Ok(best)
}

fn max_degree_rec(
    sets: &[Vec<Vec<u64>>],
    dim: usize,
    acc: u128,
    best: &mut Option<u128>,
) -> Result<()> {
    if dim == 0 {
        if !sets[0].is_empty() && sets[1].is_empty() {
            *best = Some(best.map_or(acc, |b| b.max(acc)));
        }
        return Ok(());
    }
    let mut breaks: Vec<u64> = sets.iter().flatten().map(|p| p[0]).collect();
    breaks.push(0);
    breaks.sort_unstable();
    breaks.dedup();
    for (k, &lo) in breaks.iter().enumerate() {
        let sections: Vec<Vec<Vec<u64>>> = sets
            .iter()
            .map(|s| {
                minimal_elements(s.iter().filter(|p| p[0] <= lo).map(|p| p[1..].to_vec()).collect())
            })
            .collect();
        let before = *best;
        let top = match breaks.get(k + 1) {
            Some(&hi) => hi - 1,
            None => u64::MAX,
        };
        max_degree_rec(&sections, dim - 1, acc + top as u128, best)?;
        if top == u64::MAX && *best != before {
            return Err(Error::InfiniteLength);
        }
    }
    Ok(())
}

pub fn to_u128(n: &BigUint) -> Option<u128> {
    n.to_u128()
}
