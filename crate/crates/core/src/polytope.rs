//! Exact polyhedral geometry over the rationals: lower hulls in the plane,
//! brute-force facet enumeration, polytope volumes and Newton polyhedra.
//!
//! All routines are exact. Facet enumeration tries every `d`-subset of the
//! generating points and recession rays, which is fine for the small
//! generator counts this crate deals with.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::monomial::{minimal_elements, Exponent, MonomialIdeal};
use crate::rational::{self, Q};

/// Inequality `<normal, u> >= offset` (or `<=` for bounded polytopes,
/// depending on the caller).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Facet {
    pub normal: Vec<Q>,
    pub offset: Q,
}

impl Facet {
    pub fn eval(&self, u: &[Q]) -> Q {
        dot(&self.normal, u)
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Scales a nonzero vector to a primitive integer vector with the same
/// direction.
pub fn primitive(v: &[Q]) -> Vec<Q> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

/// One-dimensional null space of `rows` (each of length `n`), if the rows
/// have rank exactly `n - 1`.
pub fn null_vector(rows: &[Vec<Q>], n: usize) -> Option<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..n {
                    let d = &f * &m[r][k];
                    m[i][k] = &m[i][k] - d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    if pivots.len() + 1 != n {
        return None;
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut v = vec![Q::zero(); n];
    v[free] = Q::one();
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[row][free].clone();
    }
    Some(v)
}

fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Vertices of the lower-left boundary of `conv(points) + R^2_{>=0}`,
/// sorted by increasing x (hence decreasing y).
pub fn lower_hull_2d(points: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let pts = minimal_elements(points.to_vec());
    let mut hull: Vec<Vec<Q>> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            let cross = (&b[0] - &a[0]) * (&p[1] - &b[1]) - (&b[1] - &a[1]) * (&p[0] - &b[0]);
            if cross.is_positive() {
                break;
            }
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

/// Area under the lower hull of a cobounded planar region.
pub fn covolume_2d(hull: &[Vec<Q>]) -> Result<Q> {
    let (Some(first), Some(last)) = (hull.first(), hull.last()) else {
        return Err(Error::Unbounded);
    };
    if !first[0].is_zero() || !last[1].is_zero() {
        return Err(Error::Unbounded);
    }
    let two = rational::q_int(2);
    Ok(hull
        .windows(2)
        .map(|w| (&w[1][0] - &w[0][0]) * (&w[0][1] + &w[1][1]) / &two)
        .sum())
}

/// Facets `<n, u> >= c` (with `n >= 0`) of `conv(points) + R^d_{>=0}`.
pub fn newton_facets(points: &[Vec<Q>], dim: usize) -> Vec<Facet> {
    let pts = minimal_elements(points.to_vec());
    if pts.is_empty() {
        return vec![];
    }
    if dim == 2 {
        return facets_from_hull_2d(&lower_hull_2d(&pts));
    }
    newton_facets_brute(&pts, dim)
}

/// Facet enumeration by brute force over `d`-subsets of points and rays.
pub fn newton_facets_brute(points: &[Vec<Q>], dim: usize) -> Vec<Facet> {
    let pts = minimal_elements(points.to_vec());
    let n = pts.len();
    let mut out: Vec<Facet> = Vec::new();
    if dim == 1 {
        return vec![Facet {
            normal: vec![Q::one()],
            offset: pts[0][0].clone(),
        }];
    }
    // elements 0..n are points, n..n+dim are unit rays
    combinations(n + dim, dim, |idx| {
        let chosen_pts: Vec<usize> = idx.iter().copied().filter(|&i| i < n).collect();
        let Some(&anchor) = chosen_pts.first() else {
            return;
        };
        let mut rows: Vec<Vec<Q>> = Vec::with_capacity(dim - 1);
        for &i in idx {
            if i == anchor {
                continue;
            }
            if i < n {
                rows.push(sub(&pts[i], &pts[anchor]));
            } else {
                let mut e = vec![Q::zero(); dim];
                e[i - n] = Q::one();
                rows.push(e);
            }
        }
        let Some(v) = null_vector(&rows, dim) else {
            return;
        };
        let v = if v.iter().any(|x| x.is_negative()) {
            v.iter().map(|x| -x).collect::<Vec<_>>()
        } else {
            v
        };
        if v.iter().any(|x| x.is_negative()) {
            return;
        }
        let v = primitive(&v);
        let c = dot(&v, &pts[anchor]);
        if pts.iter().all(|p| dot(&v, p) >= c) {
            let f = Facet { normal: v, offset: c };
            if !out.contains(&f) {
                out.push(f);
            }
        }
    });
    out.sort();
    out
}

fn facets_from_hull_2d(hull: &[Vec<Q>]) -> Vec<Facet> {
    let mut out = Vec::new();
    let first = &hull[0];
    let last = &hull[hull.len() - 1];
    out.push(Facet {
        normal: vec![Q::one(), Q::zero()],
        offset: first[0].clone(),
    });
    out.push(Facet {
        normal: vec![Q::zero(), Q::one()],
        offset: last[1].clone(),
    });
    for w in hull.windows(2) {
        let n = primitive(&[&w[0][1] - &w[1][1], &w[1][0] - &w[0][0]]);
        let c = dot(&n, &w[0]);
        out.push(Facet { normal: n, offset: c });
    }
    out.sort();
    out
}

/// Volume of the bounded polytope `conv(points)` in `R^k`; zero if it is
/// not full-dimensional.
pub fn polytope_volume(points: &[Vec<Q>]) -> Q {
    let Some(k) = points.first().map(|p| p.len()) else {
        return Q::zero();
    };
    match k {
        0 => Q::zero(),
        1 => {
            let lo = points.iter().map(|p| &p[0]).min().unwrap();
            let hi = points.iter().map(|p| &p[0]).max().unwrap();
            hi - lo
        }
        2 => convex_polygon_area(points),
        _ => polytope_volume_rec(points, k),
    }
}

fn convex_polygon_area(points: &[Vec<Q>]) -> Q {
    let mut pts: Vec<Vec<Q>> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return Q::zero();
    }
    let cross = |o: &Vec<Q>, a: &Vec<Q>, b: &Vec<Q>| {
        (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
    };
    let mut lower: Vec<Vec<Q>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<Q>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let n = lower.len();
    let twice: Q = (0..n)
        .map(|i| {
            let a = &lower[i];
            let b = &lower[(i + 1) % n];
            &a[0] * &b[1] - &b[0] * &a[1]
        })
        .sum();
    twice.abs() / rational::q_int(2)
}

/// Divergence-style recursion: `vol(P) = (1/k) Σ_F h_F vol(F)`, with the
/// facet volume measured through a coordinate projection so everything
/// stays rational.
fn polytope_volume_rec(points: &[Vec<Q>], k: usize) -> Q {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let n = pts.len();
    if n <= k {
        return Q::zero();
    }
    let mut facets: Vec<Facet> = Vec::new();
    combinations(n, k, |idx| {
        let rows: Vec<Vec<Q>> = idx[1..].iter().map(|&i| sub(&pts[i], &pts[idx[0]])).collect();
        let Some(v) = null_vector(&rows, k) else {
            return;
        };
        let v = primitive(&v);
        let c = dot(&v, &pts[idx[0]]);
        let (le, ge) = pts.iter().fold((true, true), |(le, ge), p| {
            let s = dot(&v, p);
            (le && s <= c, ge && s >= c)
        });
        let f = if le {
            Facet { normal: v, offset: c }
        } else if ge {
            Facet {
                normal: v.iter().map(|x| -x).collect(),
                offset: -c,
            }
        } else {
            return;
        };
        if !facets.contains(&f) {
            facets.push(f);
        }
    });
    let v0 = &pts[0];
    let mut total = Q::zero();
    for f in &facets {
        let h = (&f.offset - dot(&f.normal, v0)).abs();
        if h.is_zero() {
            continue;
        }
        let j = f.normal.iter().position(|x| !x.is_zero()).unwrap();
        let proj: Vec<Vec<Q>> = pts
            .iter()
            .filter(|p| dot(&f.normal, p) == f.offset)
            .map(|p| p.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, x)| x.clone()).collect())
            .collect();
        total += h * polytope_volume(&proj) / f.normal[j].abs();
    }
    total / rational::q_u(k as u64)
}

/// `conv(points) + R^d_{>=0}` for a finite set of rational points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolyhedron {
    dim: usize,
    points: Vec<Vec<Q>>,
    facets: Vec<Facet>,
}

impl NewtonPolyhedron {
    pub fn new(dim: usize, points: &[Vec<Q>]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if points.is_empty() {
            return Err(Error::ZeroIdeal);
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        let points = if dim == 2 {
            lower_hull_2d(points)
        } else {
            minimal_elements(points.to_vec())
        };
        let facets = newton_facets(&points, dim);
        Ok(NewtonPolyhedron { dim, points, facets })
    }

    pub fn of_ideal(i: &MonomialIdeal) -> Result<Self> {
        Self::new(i.dim(), &exponents_to_q(i.gens()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Generating points: hull vertices in the plane, dominance-minimal
    /// points otherwise.
    pub fn points(&self) -> &[Vec<Q>] {
        &self.points
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn contains(&self, u: &[Q]) -> bool {
        u.iter().all(|x| !x.is_negative()) && self.facets.iter().all(|f| f.eval(u) >= f.offset)
    }

    pub fn is_cobounded(&self) -> bool {
        (0..self.dim).all(|axis| {
            self.points
                .iter()
                .any(|p| p.iter().enumerate().all(|(i, x)| i == axis || x.is_zero()))
        })
    }

    pub fn scaled(&self, t: &Q) -> NewtonPolyhedron {
        let points: Vec<Vec<Q>> = self.points.iter().map(|p| p.iter().map(|x| x * t).collect()).collect();
        if t.is_zero() {
            return NewtonPolyhedron::new(self.dim, &[vec![Q::zero(); self.dim]]).unwrap();
        }
        let facets = self
            .facets
            .iter()
            .map(|f| Facet {
                normal: f.normal.clone(),
                offset: &f.offset * t,
            })
            .collect();
        NewtonPolyhedron {
            dim: self.dim,
            points,
            facets,
        }
    }

    /// Volume of the orthant minus the polyhedron.
    pub fn covolume(&self) -> Result<Q> {
        if !self.is_cobounded() {
            return Err(Error::Unbounded);
        }
        match self.dim {
            1 => Ok(self.points[0][0].clone()),
            2 => covolume_2d(&self.points),
            d => {
                // The complement is star-shaped from the origin and splits
                // into pyramids over the facets with positive offset.
                let mut total = Q::zero();
                for f in self.facets.iter().filter(|f| f.offset.is_positive()) {
                    let on: Vec<Vec<Q>> = self
                        .points
                        .iter()
                        .filter(|p| f.eval(p) == f.offset)
                        .map(|p| p[..d - 1].to_vec())
                        .collect();
                    total += &f.offset * polytope_volume(&on) / &f.normal[d - 1];
                }
                Ok(total / rational::q_u(d as u64))
            }
        }
    }

    /// Lattice points of `scale * self` as a monomial ideal.
    pub fn lattice_ideal(&self, scale: u64) -> Result<MonomialIdeal> {
        let d = self.dim;
        let s = rational::q_u(scale);
        let facets: Vec<Facet> = self
            .facets
            .iter()
            .map(|f| Facet {
                normal: f.normal.clone(),
                offset: &f.offset * &s,
            })
            .collect();
        let bounds: Vec<u64> = (0..d)
            .map(|axis| {
                let m = self.points.iter().map(|p| p[axis].clone()).max().unwrap_or_else(Q::zero);
                rational::ceil_to_u64(&(m * &s))
            })
            .collect::<Result<_>>()?;
        let mut gens: Vec<Exponent> = Vec::new();
        let mut prefix = vec![0u64; d - 1];
        loop {
            if let Some(last) = min_last_coord(&facets, &prefix)? {
                let mut g = prefix.clone();
                g.push(last);
                gens.push(Exponent::new(&g));
            }
            // odometer over the box of prefixes
            let mut axis = 0;
            loop {
                if axis == d - 1 {
                    return MonomialIdeal::new(d, gens);
                }
                if prefix[axis] < bounds[axis] {
                    prefix[axis] += 1;
                    break;
                }
                prefix[axis] = 0;
                axis += 1;
            }
        }
    }
}

fn min_last_coord(facets: &[Facet], prefix: &[u64]) -> Result<Option<u64>> {
    let d = prefix.len() + 1;
    let pre: Vec<Q> = prefix.iter().map(|&x| rational::q_u(x)).collect();
    let mut lo = Q::zero();
    for f in facets {
        let partial = dot(&f.normal[..d - 1], &pre);
        let nd = &f.normal[d - 1];
        if nd.is_zero() {
            if partial < f.offset {
                return Ok(None);
            }
        } else {
            let need = (&f.offset - partial) / nd;
            if need > lo {
                lo = need;
            }
        }
    }
    rational::ceil_to_u64(&lo).map(Some)
}

pub fn exponents_to_q(gens: &[Exponent]) -> Vec<Vec<Q>> {
    gens.iter()
        .map(|g| g.coords().iter().map(|&c| rational::q_u(c)).collect())
        .collect()
}

/// Integral closure of a nonzero monomial ideal: the lattice points of its
/// Newton polyhedron.
pub fn integral_closure(i: &MonomialIdeal) -> Result<MonomialIdeal> {
    if i.is_zero() {
        return Err(Error::ZeroIdeal);
    }
    NewtonPolyhedron::of_ideal(i)?.lattice_ideal(1)
}

/// `closure(I^n)`, computed as the lattice points of `n * NP(I)`.
pub fn closed_power(i: &MonomialIdeal, n: u64) -> Result<MonomialIdeal> {
    if i.is_zero() {
        return Err(Error::ZeroIdeal);
    }
    if n == 0 {
        return Ok(MonomialIdeal::unit(i.dim()));
    }
    NewtonPolyhedron::of_ideal(i)?.lattice_ideal(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q_frac, q_int};

    fn pts(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| q_int(x)).collect()).collect()
    }

    fn ideal(rows: &[&[u64]]) -> MonomialIdeal {
        MonomialIdeal::from_rows(rows[0].len(), rows).unwrap()
    }

    fn gens(i: &MonomialIdeal) -> Vec<Vec<u64>> {
        i.gens().iter().map(|g| g.coords().to_vec()).collect()
    }

    #[test]
    fn hull_drops_points_above() {
        let h = lower_hull_2d(&pts(&[&[0, 3], &[1, 2], &[2, 0], &[1, 1]]));
        assert_eq!(h, pts(&[&[0, 3], &[1, 1], &[2, 0]]));
        let h = lower_hull_2d(&pts(&[&[0, 3], &[1, 2], &[2, 0]]));
        assert_eq!(h, pts(&[&[0, 3], &[2, 0]]));
        assert_eq!(covolume_2d(&h).unwrap(), q_int(3));
    }

    #[test]
    fn closure_examples() {
        let c = integral_closure(&ideal(&[&[2, 0], &[0, 3]])).unwrap();
        assert_eq!(gens(&c), vec![vec![0, 3], vec![1, 2], vec![2, 0]]);
        let m = MonomialIdeal::maximal(2);
        assert_eq!(integral_closure(&m).unwrap(), m);
        let x3 = ideal(&[&[3]]);
        assert_eq!(integral_closure(&x3).unwrap(), x3);
        assert_eq!(integral_closure(&MonomialIdeal::zero(2)), Err(Error::ZeroIdeal));
        let xy = ideal(&[&[1, 1]]);
        assert_eq!(integral_closure(&xy).unwrap(), xy);
    }

    #[test]
    fn closure_membership_oracle() {
        // (1,1) fails 1/2 + 1/3 >= 1 while (1,2) passes
        let np = NewtonPolyhedron::of_ideal(&ideal(&[&[2, 0], &[0, 3]])).unwrap();
        assert!(!np.contains(&[q_int(1), q_int(1)]));
        assert!(np.contains(&[q_int(1), q_int(2)]));
    }

    #[test]
    fn brute_facets_match_hull_in_the_plane() {
        let p = pts(&[&[0, 5], &[1, 3], &[2, 2], &[4, 1], &[7, 0], &[3, 3]]);
        let a = newton_facets(&p, 2);
        let b = newton_facets_brute(&p, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn covolume_in_three_dims() {
        // simplex x/a + y/b + z/c >= 1 has covolume abc/6
        let np = NewtonPolyhedron::new(3, &pts(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 4]])).unwrap();
        assert_eq!(np.covolume().unwrap(), q_int(4));
        let m = NewtonPolyhedron::of_ideal(&MonomialIdeal::maximal(3)).unwrap();
        assert_eq!(m.covolume().unwrap(), q_frac(1, 6));
        let m4 = NewtonPolyhedron::of_ideal(&MonomialIdeal::maximal(4)).unwrap();
        assert_eq!(m4.covolume().unwrap(), q_frac(1, 24));
    }

    #[test]
    fn polytope_volumes() {
        let cube = pts(&[
            &[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1],
            &[1, 1, 0], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1],
        ]);
        assert_eq!(polytope_volume(&cube), q_int(1));
        let tri = pts(&[&[0, 0], &[2, 0], &[0, 2], &[1, 1]]);
        assert_eq!(polytope_volume(&tri), q_int(2));
        let flat = pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 0]]);
        assert_eq!(polytope_volume(&flat), Q::zero());
    }

    #[test]
    fn unbounded_covolume() {
        let np = NewtonPolyhedron::of_ideal(&ideal(&[&[1, 0]])).unwrap();
        assert_eq!(np.covolume(), Err(Error::Unbounded));
    }

    #[test]
    fn closed_powers_scale() {
        let j = ideal(&[&[2, 0], &[1, 2], &[0, 3]]);
        let direct = integral_closure(&j.ordinary_power(3).unwrap()).unwrap();
        assert_eq!(closed_power(&j, 3).unwrap(), direct);
        let j3 = ideal(&[&[2, 0, 0], &[0, 2, 1], &[0, 0, 3], &[0, 3, 0], &[1, 1, 1]]);
        let direct = integral_closure(&j3.ordinary_power(2).unwrap()).unwrap();
        assert_eq!(closed_power(&j3, 2).unwrap(), direct);
    }
}
