//! Exact fitting of homogeneous polynomials to sampled lengths, the
//! `p`-power sample basis, and coefficient limits along a base `b`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::counting::colength;
use crate::error::{Error, Result};
use crate::family::FamilyExpr;
use crate::monomial::{product_all, Prime};
use crate::rational::{self, Q};

/// Largest number of tuples `basis_search` will inspect.
pub const SEARCH_CAP: usize = 100_000;

/// Exponent vectors of length `s` summing to `d`, with `x_1^d` first.
pub fn monomials(s: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(s: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if s == 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=d).rev() {
            prefix.push(k);
            rec(s - 1, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if s > 0 {
        rec(s, d, &mut Vec::new(), &mut out);
    }
    out
}

fn n_monomials(s: usize, d: u32) -> usize {
    monomials(s, d).len()
}

/// Rank by fraction-free elimination.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    bareiss(rows.to_vec()).0
}

/// Determinant of a square matrix by fraction-free elimination.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let (r, last, sign) = bareiss(m.to_vec());
    if r < n {
        BigInt::zero()
    } else {
        last * sign
    }
}

/// Returns rank, last pivot-product and row-swap sign.
fn bareiss(mut a: Vec<Vec<BigInt>>) -> (usize, BigInt, BigInt) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pivot) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if pivot != r {
            a.swap(pivot, r);
            sign = -sign;
        }
        for i in r + 1..rows {
            for k in c + 1..cols {
                let v = &a[r][c] * &a[i][k] - &a[i][c] * &a[r][k];
                a[i][k] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    (r, prev, sign)
}

/// Rows of rationals scaled to integers, for rank tests.
fn integer_rows(rows: &[Vec<Q>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

/// Solves a nonsingular square system over the rationals.
fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = a.len();
    for c in 0..n {
        let pivot = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(pivot, c);
        b.swap(pivot, c);
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for k in c..n {
                    let v = &f * &a[c][k];
                    a[i][k] -= v;
                }
                let v = &f * &b[c];
                b[i] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Row of all degree-`d` monomials evaluated at `t`.
fn monomial_row(t: &[Q], mons: &[Vec<u32>]) -> Vec<Q> {
    mons.iter()
        .map(|m| {
            t.iter().zip(m).fold(Q::one(), |acc, (x, &k)| {
                let mut v = acc;
                for _ in 0..k {
                    v *= x;
                }
                v
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Basis {
    pub tuples: Vec<Vec<u32>>,
    #[serde(serialize_with = "int_matrix")]
    pub matrix: Vec<Vec<BigInt>>,
    #[serde(with = "rational::int_string")]
    pub determinant: BigInt,
}

fn int_matrix<S: Serializer>(m: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    rows.serialize(s)
}

/// Tuples `n̄` in degree-then-lex order: `(0,0), (1,0), (0,1), (2,0), …`.
fn tuple_stream(s: usize) -> impl Iterator<Item = Vec<u32>> {
    (0u32..).flat_map(move |k| monomials(s, k))
}

fn basis_row(p: Prime, n: &[u32], mons: &[Vec<u32>]) -> Vec<BigInt> {
    let pb = BigInt::from(p.get());
    mons.iter()
        .map(|m| pb.pow(n.iter().zip(m).map(|(a, b)| a * b).sum::<u32>()))
        .collect()
}

/// Greedily collects `C(s-1+d, s-1)` tuples whose monomial matrix in
/// `(p^{n_1}, …, p^{n_s})` is nonsingular.
pub fn basis_search(s: usize, d: u32, p: Prime) -> Result<Basis> {
    if s == 0 || d == 0 {
        return Err(Error::Invalid("basis search needs s >= 1 and d >= 1".into()));
    }
    let mons = monomials(s, d);
    let a = mons.len();
    let mut tuples = Vec::new();
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (seen, n) in tuple_stream(s).enumerate() {
        if rows.len() == a {
            break;
        }
        if seen >= SEARCH_CAP {
            return Err(Error::SearchCap(SEARCH_CAP));
        }
        rows.push(basis_row(p, &n, &mons));
        if rank(&rows) == rows.len() {
            tuples.push(n);
        } else {
            rows.pop();
        }
    }
    Ok(Basis {
        determinant: determinant(&rows),
        tuples,
        matrix: rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    #[serde(with = "rational::vec_as_string")]
    pub point: Vec<Q>,
    #[serde(with = "rational::as_string")]
    pub value: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Residual {
    #[serde(with = "rational::vec_as_string")]
    pub point: Vec<Q>,
    #[serde(with = "rational::as_string")]
    pub actual: Q,
    #[serde(with = "rational::as_string")]
    pub predicted: Q,
    /// `actual − predicted`
    #[serde(with = "rational::as_string")]
    pub residual: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolynomialFit {
    pub degree: u32,
    pub nvars: usize,
    #[serde(serialize_with = "coefficient_map")]
    pub coefficients: Vec<(Vec<u32>, Q)>,
    pub basis: Vec<Sample>,
    pub residuals: Vec<Residual>,
}

fn coefficient_map<S: Serializer>(c: &[(Vec<u32>, Q)], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(c.len()))?;
    for (idx, v) in c {
        let key: Vec<String> = idx.iter().map(|k| k.to_string()).collect();
        map.serialize_entry(&key.join(","), &rational::render_q(v))?;
    }
    map.end()
}

impl PolynomialFit {
    pub fn evaluate(&self, t: &[Q]) -> Q {
        let mons: Vec<Vec<u32>> = self.coefficients.iter().map(|(m, _)| m.clone()).collect();
        monomial_row(t, &mons)
            .iter()
            .zip(&self.coefficients)
            .map(|(x, (_, c))| x * c)
            .sum()
    }

    pub fn coefficient(&self, index: &[u32]) -> Option<&Q> {
        self.coefficients.iter().find(|(m, _)| m == index).map(|(_, c)| c)
    }

    /// True when every held-out sample is reproduced exactly.
    pub fn is_consistent(&self) -> bool {
        self.residuals.iter().all(|r| r.residual.is_zero())
    }
}

/// Fits `Σ b_ī t^ī` of degree `d` exactly through the first spanning subset
/// of `samples` and reports residuals at the rest.
pub fn fit_homogeneous(d: u32, samples: &[Sample]) -> Result<PolynomialFit> {
    let s = samples
        .first()
        .map(|x| x.point.len())
        .ok_or(Error::Singular { rank: 0, needed: 1 })?;
    if let Some(bad) = samples.iter().find(|x| x.point.len() != s) {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: bad.point.len(),
        });
    }
    let mons = monomials(s, d);
    let a = mons.len();
    let mut basis: Vec<&Sample> = Vec::new();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rest: Vec<&Sample> = Vec::new();
    for x in samples {
        if rows.len() < a {
            rows.push(monomial_row(&x.point, &mons));
            if rank(&integer_rows(&rows)) == rows.len() {
                basis.push(x);
                continue;
            }
            rows.pop();
        }
        rest.push(x);
    }
    if rows.len() < a {
        return Err(Error::Singular {
            rank: rows.len(),
            needed: a,
        });
    }
    let values: Vec<Q> = basis.iter().map(|x| x.value.clone()).collect();
    let coeffs = solve(rows, values).ok_or(Error::Singular { rank: a - 1, needed: a })?;
    let mut fit = PolynomialFit {
        degree: d,
        nvars: s,
        coefficients: mons.into_iter().zip(coeffs).collect(),
        basis: basis.into_iter().cloned().collect(),
        residuals: Vec::new(),
    };
    fit.residuals = rest
        .iter()
        .map(|x| {
            let predicted = fit.evaluate(&x.point);
            Residual {
                point: x.point.clone(),
                residual: &x.value - &predicted,
                actual: x.value.clone(),
                predicted,
            }
        })
        .collect();
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FitAtBase {
    pub b: u32,
    pub fit: PolynomialFit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiveCheck {
    pub tuple: Vec<u32>,
    /// `λ(R/𝐈_{qn̄})/q^d` at the largest `q` checked.
    #[serde(with = "rational::as_string")]
    pub live: Q,
    #[serde(with = "rational::as_string")]
    pub predicted: Q,
    #[serde(with = "rational::as_string")]
    pub difference: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientLimits {
    pub basis: Vec<Vec<u32>>,
    pub held_out: Vec<Vec<u32>>,
    pub per_b: Vec<FitAtBase>,
    /// False when some base `b` leaves a nonzero residual.
    pub polynomial_ok: bool,
    /// Fit at `b_max`, present only when `polynomial_ok`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<PolynomialFit>,
    /// Per coefficient, `|b_ī(p^{b_max}) − b_ī(p^{b_max−1})|`.
    #[serde(with = "rational::vec_as_string")]
    pub cauchy: Vec<Q>,
    pub live_check: Vec<LiveCheck>,
}

/// `λ(R/∏ I(i)_{p^b}^{[p^{n_i}]})/p^{bd}`, the `q`-limit at frozen base `b`.
fn frozen_value(fams: &[FamilyExpr], p: Prime, b: u32, n: &[u32], dim: usize) -> Result<Q> {
    let factors = fams
        .iter()
        .zip(n)
        .map(|(f, &k)| f.evaluate(p, b)?.frobenius_unchecked(p.pow(k)?))
        .collect::<Result<Vec<_>>>()?;
    let prod = product_all(dim, factors.iter())?;
    Ok(rational::q_big(&colength(&prod)?) / rational::q_pow(p.pow(b)?, dim as u32))
}

/// `λ(R/∏ I(i)_{q p^{n_i}})/q^d` at `q = p^e`.
fn live_value(fams: &[FamilyExpr], p: Prime, e: u32, n: &[u32], dim: usize) -> Result<Q> {
    let factors = fams
        .iter()
        .zip(n)
        .map(|(f, &k)| f.evaluate(p, e + k))
        .collect::<Result<Vec<_>>>()?;
    let prod = product_all(dim, factors.iter())?;
    Ok(rational::q_big(&colength(&prod)?) / rational::q_pow(p.pow(e)?, dim as u32))
}

fn tuple_point(p: Prime, n: &[u32]) -> Result<Vec<Q>> {
    n.iter().map(|&k| p.pow(k).map(rational::q_u)).collect()
}

/// Fits the degree-`d` polynomial `𝒫_{𝐈(p^b)}` for `b = 0..=b_max` on the
/// basis tuples, checks it on as many held-out tuples, and compares the
/// `b_max` fit with live lengths at `q = p^{e_live}`.
pub fn coefficient_limits(fams: &[FamilyExpr], p: Prime, b_max: u32, e_live: u32) -> Result<CoefficientLimits> {
    let s = fams.len();
    let dim = fams
        .first()
        .ok_or_else(|| Error::Invalid("at least one family is required".into()))?
        .dim()?;
    for f in fams {
        if f.dim()? != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: f.dim()?,
            });
        }
    }
    let d = dim as u32;
    let basis = basis_search(s, d, p)?.tuples;
    let held_out: Vec<Vec<u32>> = tuple_stream(s)
        .filter(|n| !basis.contains(n))
        .take(n_monomials(s, d))
        .collect();
    let tuples: Vec<&Vec<u32>> = basis.iter().chain(&held_out).collect();

    let mut per_b = Vec::new();
    for b in 0..=b_max {
        let samples = tuples
            .iter()
            .map(|n| {
                Ok(Sample {
                    point: tuple_point(p, n)?,
                    value: frozen_value(fams, p, b, n, dim).map_err(|e| e.at(Some(b), 0))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        per_b.push(FitAtBase {
            b,
            fit: fit_homogeneous(d, &samples)?,
        });
    }
    let polynomial_ok = per_b.iter().all(|x| x.fit.is_consistent());
    let last = &per_b.last().unwrap().fit;
    let cauchy = match per_b.len() {
        n if n >= 2 => last
            .coefficients
            .iter()
            .zip(&per_b[n - 2].fit.coefficients)
            .map(|((_, x), (_, y))| rational::abs_diff(x, y))
            .collect(),
        _ => vec![Q::zero(); last.coefficients.len()],
    };
    let (limit, live_check) = if polynomial_ok {
        let checks = basis
            .iter()
            .map(|n| {
                let live = live_value(fams, p, e_live, n, dim).map_err(|e| e.at(None, e_live))?;
                let predicted = last.evaluate(&tuple_point(p, n)?);
                Ok(LiveCheck {
                    tuple: n.clone(),
                    difference: rational::abs_diff(&live, &predicted),
                    live,
                    predicted,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        (Some(last.clone()), checks)
    } else {
        (None, Vec::new())
    };
    Ok(CoefficientLimits {
        basis,
        held_out,
        per_b,
        polynomial_ok,
        limit,
        cauchy,
        live_check,
    })
}
