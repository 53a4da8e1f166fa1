//! Brute-force oracles shared by the integration tests. Everything here
//! enumerates lattice points or evaluates formulas directly and never calls
//! into the counting or polytope code under test.

#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, Zero};
use pfam_core::monomial::{Exponent, MonomialIdeal};
use proptest::prelude::*;
use rand::Rng;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn ideal(rows: &[&[u64]]) -> MonomialIdeal {
    MonomialIdeal::from_rows(rows[0].len(), rows).unwrap()
}

pub fn in_ideal(gens: &[Vec<u64>], u: &[u64]) -> bool {
    gens.iter().any(|g| g.iter().zip(u).all(|(a, b)| a <= b))
}

pub fn raw(i: &MonomialIdeal) -> Vec<Vec<u64>> {
    i.gens().iter().map(|g| g.coords().to_vec()).collect()
}

/// Visits every point of the box `[0, bound_0) × … × [0, bound_{d-1})`.
pub fn for_box(bounds: &[u64], mut f: impl FnMut(&[u64])) {
    if bounds.iter().any(|&b| b == 0) {
        return;
    }
    let mut u = vec![0u64; bounds.len()];
    loop {
        f(&u);
        let mut k = 0;
        loop {
            if k == u.len() {
                return;
            }
            u[k] += 1;
            if u[k] < bounds[k] {
                break;
            }
            u[k] = 0;
            k += 1;
        }
    }
}

/// Pure-power bound per axis, the box outside which an m-primary ideal
/// contains everything.
pub fn pure_bounds(gens: &[Vec<u64>], dim: usize) -> Vec<u64> {
    (0..dim)
        .map(|axis| {
            gens.iter()
                .filter(|g| g.iter().enumerate().all(|(i, &x)| i == axis || x == 0))
                .map(|g| g[axis])
                .min()
                .expect("ideal is not m-primary")
        })
        .collect()
}

/// `λ(R/I)` by enumeration.
pub fn brute_colength(i: &MonomialIdeal) -> u64 {
    let gens = raw(i);
    let mut n = 0;
    for_box(&pure_bounds(&gens, i.dim()), |u| {
        if !in_ideal(&gens, u) {
            n += 1;
        }
    });
    n
}

/// `λ(J/K)` by enumeration, for `K ⊆ J` with `K` m-primary.
pub fn brute_relative(j: &MonomialIdeal, k: &MonomialIdeal) -> u64 {
    let (jg, kg) = (raw(j), raw(k));
    let mut n = 0;
    for_box(&pure_bounds(&kg, k.dim()), |u| {
        if in_ideal(&jg, u) && !in_ideal(&kg, u) {
            n += 1;
        }
    });
    n
}

/// `#{u ∈ I : <u, a> < α}` for an integer normal, by enumeration.
pub fn brute_count_below(i: &MonomialIdeal, a: &[u64], alpha: u64) -> u64 {
    let gens = raw(i);
    let bounds: Vec<u64> = a.iter().map(|&x| alpha.div_ceil(x)).collect();
    let mut n = 0;
    for_box(&bounds, |u| {
        let s: u64 = u.iter().zip(a).map(|(x, y)| x * y).sum();
        if s < alpha && in_ideal(&gens, u) {
            n += 1;
        }
    });
    n
}

/// Lower boundary of the Newton polygon of a planar m-primary ideal at
/// `x`: the least height over all chords between generators spanning `x`
/// and all generators left of `x`.
pub fn np_height(gens: &[Vec<u64>], x: &Q) -> Option<Q> {
    let pts: Vec<(Q, Q)> = gens.iter().map(|g| (q(g[0] as i64), q(g[1] as i64))).collect();
    let mut best: Option<Q> = None;
    let mut offer = |v: Q| {
        if best.as_ref().map_or(true, |b| v < *b) {
            best = Some(v);
        }
    };
    for (gx, gy) in &pts {
        if gx <= x {
            offer(gy.clone());
        }
    }
    for (ax, ay) in &pts {
        for (bx, by) in &pts {
            if ax < x && x < bx {
                let t = (x - ax) / (bx - ax);
                offer(ay + t * (by - ay));
            }
        }
    }
    best
}

/// `covol(NP(I))` for a planar m-primary ideal by trapezoids between
/// consecutive generator abscissae.
pub fn brute_np_covolume(i: &MonomialIdeal) -> Q {
    let gens = raw(i);
    let mut xs: Vec<u64> = gens.iter().map(|g| g[0]).collect();
    xs.sort();
    xs.dedup();
    let mut area = Q::zero();
    for w in xs.windows(2) {
        let (a, b) = (q(w[0] as i64), q(w[1] as i64));
        let (ha, hb) = (np_height(&gens, &a).unwrap(), np_height(&gens, &b).unwrap());
        area += (ha + hb) * (b - a) / q(2);
    }
    area
}

/// Integral closure of a planar m-primary ideal: all lattice points on or
/// above the Newton boundary.
pub fn brute_closure_2d(i: &MonomialIdeal) -> MonomialIdeal {
    let gens = raw(i);
    let b = pure_bounds(&gens, 2);
    let mut out = Vec::new();
    for x in 0..=b[0] {
        let h = np_height(&gens, &q(x as i64)).unwrap();
        let y = h.ceil().to_integer();
        out.push(Exponent::new(&[x, u64::try_from(y).unwrap()]));
    }
    MonomialIdeal::new(2, out).unwrap()
}

/// Random m-primary ideal: pure powers on every axis plus up to
/// `extra` mixed generators, exponents at most `max_exp`.
pub fn random_ideal<R: Rng>(rng: &mut R, dim: usize, extra: usize, max_exp: u64) -> MonomialIdeal {
    let mut gens = Vec::new();
    for axis in 0..dim {
        gens.push(Exponent::pure(dim, axis, rng.gen_range(1..=max_exp)));
    }
    let n = rng.gen_range(0..=extra);
    for _ in 0..n {
        let v: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..=max_exp)).collect();
        if v.iter().any(|&x| x > 0) {
            gens.push(Exponent::new(&v));
        }
    }
    MonomialIdeal::new(dim, gens).unwrap()
}

pub fn arb_ideal(dim: usize, extra: usize, max_exp: u64) -> impl Strategy<Value = MonomialIdeal> {
    let pure = proptest::collection::vec(1..=max_exp, dim);
    let mixed = proptest::collection::vec(proptest::collection::vec(0..=max_exp, dim), 0..=extra);
    (pure, mixed).prop_map(move |(pure, mixed)| {
        let mut gens: Vec<Exponent> = pure
            .iter()
            .enumerate()
            .map(|(axis, &k)| Exponent::pure(dim, axis, k))
            .collect();
        gens.extend(mixed.iter().filter(|v| v.iter().any(|&x| x > 0)).map(|v| Exponent::new(v)));
        MonomialIdeal::new(dim, gens).unwrap()
    })
}

/// Any monomial ideal, possibly not m-primary, never zero.
pub fn arb_any_ideal(dim: usize, max_gens: usize, max_exp: u64) -> impl Strategy<Value = MonomialIdeal> {
    proptest::collection::vec(proptest::collection::vec(0..=max_exp, dim), 1..=max_gens).prop_map(move |rows| {
        MonomialIdeal::new(dim, rows.iter().map(|r| Exponent::new(r)).collect()).unwrap()
    })
}

pub fn one() -> Q {
    Q::one()
}
