//! Staircases, Newton polyhedra and p-bodies, with exact covolumes,
//! Minkowski combinations and halfspace-truncated volumes.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::counting::{count_below, grid_sweep, Halfspace};
use crate::error::{Error, Result};
use crate::family::FamilyExpr;
use crate::monomial::{minimal_elements, Exponent, MonomialIdeal, Prime};
use crate::polytope::{exponents_to_q, NewtonPolyhedron};
use crate::rational::{self, Q};

/// A closed, orthant-stable region in `R^d_{>=0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Region {
    /// Union of `apex + R^d_{>=0}` over an antichain of apexes.
    Staircase { dim: usize, apexes: Vec<Vec<Q>> },
    /// `conv(points) + R^d_{>=0}`.
    Convex(NewtonPolyhedron),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    Slab,
    Shoelace,
    HullTriangulation,
    LatticeEstimate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CovolumeResult {
    #[serde(with = "rational::as_string")]
    pub value: Q,
    pub decimal: String,
    pub method: VolumeMethod,
    pub cobounded: bool,
    /// Lattice resolution `q`, for estimates only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<u64>,
    /// Bound on `|estimate - volume|`, for estimates only.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_q")]
    pub envelope: Option<Q>,
}

fn opt_q<S: serde::Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.serialize_str(&rational::render_q(q)),
        None => s.serialize_none(),
    }
}

impl CovolumeResult {
    fn exact(value: Q, method: VolumeMethod, cobounded: bool) -> Self {
        CovolumeResult {
            decimal: rational::decimal12(&value),
            value,
            method,
            cobounded,
            resolution: None,
            envelope: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionProperties {
    pub convex: bool,
    pub cobounded: bool,
}

impl Region {
    pub fn from_apexes(dim: usize, apexes: Vec<Vec<Q>>) -> Result<Region> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if apexes.is_empty() {
            return Err(Error::ZeroIdeal);
        }
        if let Some(a) = apexes.iter().find(|a| a.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: a.len(),
            });
        }
        if apexes.iter().flatten().any(|x| x.is_negative()) {
            return Err(Error::Invalid("apex coordinates must be nonnegative".into()));
        }
        Ok(Region::Staircase {
            dim,
            apexes: minimal_elements(apexes),
        })
    }

    pub fn convex(dim: usize, points: Vec<Vec<Q>>) -> Result<Region> {
        if points.iter().flatten().any(|x| x.is_negative()) {
            return Err(Error::Invalid("points must lie in the orthant".into()));
        }
        Ok(Region::Convex(NewtonPolyhedron::new(dim, &points)?))
    }

    /// Newton polyhedron of an ideal as a convex region.
    pub fn newton(i: &MonomialIdeal) -> Result<Region> {
        Ok(Region::Convex(NewtonPolyhedron::of_ideal(i)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Staircase { dim, .. } => *dim,
            Region::Convex(np) => np.dim(),
        }
    }

    /// Apexes (staircase) or generating points (convex).
    pub fn points(&self) -> &[Vec<Q>] {
        match self {
            Region::Staircase { apexes, .. } => apexes,
            Region::Convex(np) => np.points(),
        }
    }

    pub fn contains(&self, u: &[Q]) -> bool {
        match self {
            Region::Staircase { apexes, .. } => {
                apexes.iter().any(|a| a.iter().zip(u).all(|(x, y)| x <= y))
            }
            Region::Convex(np) => np.contains(u),
        }
    }

    fn scaled(&self, t: &Q) -> Region {
        match self {
            Region::Staircase { dim, apexes } => Region::Staircase {
                dim: *dim,
                apexes: minimal_elements(
                    apexes.iter().map(|a| a.iter().map(|x| x * t).collect()).collect(),
                ),
            },
            Region::Convex(np) => Region::Convex(np.scaled(t)),
        }
    }

    pub fn is_cobounded(&self) -> bool {
        let pts = self.points();
        (0..self.dim()).all(|axis| {
            pts.iter()
                .any(|p| p.iter().enumerate().all(|(i, x)| i == axis || x.is_zero()))
        })
    }
}

/// The staircase `∪ (g + R^d_{>=0})` over the generators of `I`.
pub fn staircase(i: &MonomialIdeal) -> Result<Region> {
    if i.is_zero() {
        return Err(Error::ZeroIdeal);
    }
    Ok(Region::Staircase {
        dim: i.dim(),
        apexes: exponents_to_q(i.gens()),
    })
}

/// A p-body approximation together with whether it is already exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PBody {
    pub region: Region,
    pub q_max: u64,
    /// True when `q_max` reaches the family's finite-type threshold, so
    /// that larger `q` add no new apexes.
    pub exact: bool,
}

/// `∪_{q <= q_max} (1/q) T_q + R^d_{>=0}` for the family `f`.
pub fn pbody(f: &FamilyExpr, p: Prime, q_max: u64) -> Result<PBody> {
    let e_max = p.log(q_max).ok_or(Error::NotPowerOfP {
        n: q_max,
        p: p.get(),
    })?;
    let dim = f.dim()?;
    let mut apexes: Vec<Vec<Q>> = Vec::new();
    for e in 0..=e_max {
        let ideal = f.evaluate(p, e)?;
        if ideal.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        let q = rational::q_u(p.pow(e)?);
        apexes.extend(
            ideal
                .gens()
                .iter()
                .map(|g| g.coords().iter().map(|&c| rational::q_u(c) / &q).collect()),
        );
        apexes = minimal_elements(apexes);
    }
    let exact = match f.structural_threshold() {
        Some(t) => p.pow(t).map(|qt| q_max >= qt).unwrap_or(false),
        None => false,
    };
    Ok(PBody {
        region: Region::Staircase { dim, apexes },
        q_max,
        exact,
    })
}

/// `Σ λ_i R_i` for regions of one kind.
pub fn minkowski_scale_sum(parts: &[(Region, Q)]) -> Result<Region> {
    let (first, _) = parts
        .first()
        .ok_or_else(|| Error::Invalid("empty Minkowski sum".into()))?;
    let dim = first.dim();
    let staircase_kind = matches!(first, Region::Staircase { .. });
    let mut acc: Vec<Vec<Q>> = vec![vec![Q::zero(); dim]];
    for (r, t) in parts {
        if r.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.dim(),
            });
        }
        if matches!(r, Region::Staircase { .. }) != staircase_kind {
            return Err(Error::MixedRegionKinds);
        }
        if t.is_negative() {
            return Err(Error::Invalid("Minkowski scale must be nonnegative".into()));
        }
        let scaled = r.scaled(t);
        let mut next = Vec::with_capacity(acc.len() * scaled.points().len());
        for a in &acc {
            for b in scaled.points() {
                next.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        acc = if staircase_kind {
            minimal_elements(next)
        } else {
            // Convex sums are pruned to hull vertices (or dominance-minimal
            // points above the plane).
            NewtonPolyhedron::new(dim, &next)?.points().to_vec()
        };
    }
    if staircase_kind {
        Ok(Region::Staircase { dim, apexes: acc })
    } else {
        Region::convex(dim, acc)
    }
}

/// Volume of the orthant minus the region.
pub fn covolume(r: &Region) -> Result<CovolumeResult> {
    match r {
        Region::Staircase { dim, apexes } => {
            let zero = Q::zero();
            let v = grid_sweep(&[apexes.clone()], *dim, &zero, &|m| !m[0], &|lo: &Q, hi: &Q| hi - lo)
                .map_err(|e| match e {
                    Error::InfiniteLength => Error::Unbounded,
                    other => other,
                })?;
            Ok(CovolumeResult::exact(v, VolumeMethod::Slab, true))
        }
        Region::Convex(np) => {
            let method = if np.dim() <= 2 {
                VolumeMethod::Shoelace
            } else {
                VolumeMethod::HullTriangulation
            };
            Ok(CovolumeResult::exact(np.covolume()?, method, true))
        }
    }
}

/// Convexity test by apex count: a staircase is convex iff it has one apex.
pub fn staircase_convex_by_count(apexes: &[Vec<Q>]) -> bool {
    apexes.len() <= 1
}

/// Convexity test by midpoints: every midpoint of two apexes lies in the
/// staircase.
pub fn staircase_convex_by_midpoints(apexes: &[Vec<Q>]) -> bool {
    let half = rational::q_frac(1, 2);
    apexes.iter().enumerate().all(|(i, a)| {
        apexes[i + 1..].iter().all(|b| {
            let mid: Vec<Q> = a.iter().zip(b).map(|(x, y)| (x + y) * &half).collect();
            apexes.iter().any(|c| c.iter().zip(&mid).all(|(x, y)| x <= y))
        })
    })
}

pub fn region_properties(r: &Region) -> RegionProperties {
    let convex = match r {
        Region::Staircase { apexes, .. } => staircase_convex_by_midpoints(apexes),
        Region::Convex(_) => true,
    };
    RegionProperties {
        convex,
        cobounded: r.is_cobounded(),
    }
}

/// `Vol(R ∩ H)`: exact for `d <= 2`, a lattice estimate above.
pub fn volume_below(r: &Region, h: &Halfspace) -> Result<CovolumeResult> {
    if h.dim() != r.dim() {
        return Err(Error::DimensionMismatch {
            expected: r.dim(),
            found: h.dim(),
        });
    }
    let method = match r {
        Region::Staircase { .. } => VolumeMethod::Slab,
        Region::Convex(_) => VolumeMethod::Shoelace,
    };
    let cobounded = r.is_cobounded();
    if !h.bound().is_positive() {
        return Ok(CovolumeResult::exact(Q::zero(), method, cobounded));
    }
    match r.dim() {
        1 => {
            let start = r.points().iter().map(|p| p[0].clone()).min().unwrap_or_else(Q::zero);
            let end = h.bound() / &h.normal()[0];
            let v = if end > start { end - start } else { Q::zero() };
            Ok(CovolumeResult::exact(v, method, cobounded))
        }
        2 => Ok(CovolumeResult::exact(volume_below_2d(r, h), method, cobounded)),
        _ => volume_below_lattice(r, h),
    }
}

/// Piece of the complement's height profile over `[x0, x1)`:
/// `None` means the whole vertical line is outside the region.
struct Piece {
    x0: Q,
    x1: Option<Q>,
    height: Option<(Q, Q)>, // h(x) = c0 + c1 x
}

fn height_profile(r: &Region) -> Vec<Piece> {
    let pts = r.points();
    let mut out = vec![Piece {
        x0: Q::zero(),
        x1: Some(pts[0][0].clone()),
        height: None,
    }];
    match r {
        Region::Staircase { .. } => {
            for (i, a) in pts.iter().enumerate() {
                out.push(Piece {
                    x0: a[0].clone(),
                    x1: pts.get(i + 1).map(|b| b[0].clone()),
                    height: Some((a[1].clone(), Q::zero())),
                });
            }
        }
        Region::Convex(_) => {
            for w in pts.windows(2) {
                let slope = (&w[1][1] - &w[0][1]) / (&w[1][0] - &w[0][0]);
                let c0 = &w[0][1] - &slope * &w[0][0];
                out.push(Piece {
                    x0: w[0][0].clone(),
                    x1: Some(w[1][0].clone()),
                    height: Some((c0, slope)),
                });
            }
            let last = pts.last().unwrap();
            out.push(Piece {
                x0: last[0].clone(),
                x1: None,
                height: Some((last[1].clone(), Q::zero())),
            });
        }
    }
    out
}

/// `∫_a^b (c0 + c1 x) dx`
fn integrate_linear(c0: &Q, c1: &Q, a: &Q, b: &Q) -> Q {
    let two = rational::q_int(2);
    c0 * (b - a) + c1 * (b * b - a * a) / two
}

/// `∫_a^b min(f, g)` for linear `f`, `g`.
fn integrate_min(f: &(Q, Q), g: &(Q, Q), a: &Q, b: &Q) -> Q {
    let at = |l: &(Q, Q), x: &Q| &l.0 + &l.1 * x;
    let diff_a = at(f, a) - at(g, a);
    let diff_b = at(f, b) - at(g, b);
    if !diff_a.is_positive() && !diff_b.is_positive() {
        return integrate_linear(&f.0, &f.1, a, b);
    }
    if !diff_a.is_negative() && !diff_b.is_negative() {
        return integrate_linear(&g.0, &g.1, a, b);
    }
    let x = (&g.0 - &f.0) / (&f.1 - &g.1);
    let (first, second) = if diff_a.is_negative() { (f, g) } else { (g, f) };
    integrate_linear(&first.0, &first.1, a, &x) + integrate_linear(&second.0, &second.1, &x, b)
}

fn volume_below_2d(r: &Region, h: &Halfspace) -> Q {
    let (a1, a2) = (&h.normal()[0], &h.normal()[1]);
    let alpha = h.bound();
    let x_end = alpha / a1;
    let line = (alpha / a2, -(a1 / a2));
    let triangle = alpha * alpha / (rational::q_int(2) * a1 * a2);
    let mut outside = Q::zero();
    for piece in height_profile(r) {
        if piece.x0 >= x_end {
            break;
        }
        let hi = match &piece.x1 {
            Some(x1) if *x1 < x_end => x1.clone(),
            _ => x_end.clone(),
        };
        if hi <= piece.x0 {
            continue;
        }
        outside += match &piece.height {
            None => integrate_linear(&line.0, &line.1, &piece.x0, &hi),
            Some(f) => integrate_min(f, &line, &piece.x0, &hi),
        };
    }
    triangle - outside
}

/// Lattice budget for estimates in dimension three and up.
const LATTICE_BUDGET: f64 = 2.0e6;

fn volume_below_lattice(r: &Region, h: &Halfspace) -> Result<CovolumeResult> {
    let d = r.dim();
    let reach = h
        .normal()
        .iter()
        .map(|a| h.bound() / a)
        .max()
        .unwrap_or_else(Q::zero);
    let reach_f = rational::to_f64(&reach).max(1e-9);
    let mut q: u64 = 1;
    while q < 4096 && ((2 * q) as f64 * reach_f + 1.0).powi(d as i32 - 1) <= LATTICE_BUDGET {
        q *= 2;
    }
    let qq = rational::q_u(q);
    let ideal = match r {
        Region::Staircase { apexes, .. } => {
            let gens = apexes
                .iter()
                .map(|a| {
                    a.iter()
                        .map(|x| rational::ceil_to_u64(&(x * &qq)))
                        .collect::<Result<Vec<u64>>>()
                        .map(|v| Exponent::new(&v))
                })
                .collect::<Result<Vec<_>>>()?;
            MonomialIdeal::new(d, gens)?
        }
        Region::Convex(np) => np.lattice_ideal(q)?,
    };
    let count = count_below(&ideal, &h.scaled(&qq))?;
    let qd = Q::from_integer(BigInt::from(q).pow(d as u32));
    let value = Q::from_integer(BigInt::from(count)) / &qd;
    let side = &reach * &qq + Q::one();
    let mut boundary = Q::one();
    for _ in 0..d - 1 {
        boundary = boundary * &side;
    }
    let envelope = rational::q_u(2 * d as u64) * boundary / &qd;
    Ok(CovolumeResult {
        decimal: rational::decimal12(&value),
        value,
        method: VolumeMethod::LatticeEstimate,
        cobounded: r.is_cobounded(),
        resolution: Some(q),
        envelope: Some(envelope),
    })
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RegionJson {
    Staircase {
        dim: usize,
        apexes: Vec<Vec<String>>,
    },
    Convex {
        dim: usize,
        points: Vec<Vec<String>>,
    },
}

fn parse_rows(rows: &[Vec<String>]) -> Result<Vec<Vec<Q>>> {
    rows.iter()
        .map(|r| r.iter().map(|s| rational::parse_q(s)).collect())
        .collect()
}

fn render_rows(rows: &[Vec<Q>]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| r.iter().map(rational::render_q).collect())
        .collect()
}

impl Serialize for Region {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Region::Staircase { dim, apexes } => RegionJson::Staircase {
                dim: *dim,
                apexes: render_rows(apexes),
            },
            Region::Convex(np) => RegionJson::Convex {
                dim: np.dim(),
                points: render_rows(np.points()),
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RegionJson::deserialize(d)?;
        let r = match raw {
            RegionJson::Staircase { dim, apexes } => {
                parse_rows(&apexes).and_then(|a| Region::from_apexes(dim, a))
            }
            RegionJson::Convex { dim, points } => {
                parse_rows(&points).and_then(|p| Region::convex(dim, p))
            }
        };
        r.map_err(serde::de::Error::custom)
    }
}
