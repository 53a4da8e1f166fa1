//! `pfam`: parses ideals, families and regions given as JSON, runs one
//! library operation per subcommand and prints the result as JSON or CSV.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use pfam_core::counting::{colength, count_below, relative_colength, Halfspace};
use pfam_core::family::{linear_growth_constant, truncate, verify_family_axioms, Base, Factor, FamilyExpr};
use pfam_core::fit::{basis_search, coefficient_limits, fit_homogeneous, Sample};
use pfam_core::limits::{double_limit_table, length_sequence, Verdict};
use pfam_core::monomial::{combine, Combine, MonomialIdeal, PowerMode, Prime};
use pfam_core::multiplicity::{
    dim2_family_rhs, e_vs_ehk_check, hilbert_kunz, mixed_dim2, samuel, verma_rhs, CrossSum,
};
use pfam_core::polytope::{closed_power, integral_closure};
use pfam_core::rational::{self, Q};
use pfam_core::region::{
    covolume, minkowski_scale_sum, pbody, region_properties, staircase, volume_below, Region,
};
use pfam_core::Error;

pub const MAX_DIM: usize = 4;
pub const MAX_EMAX: u32 = 12;
pub const MAX_BMAX: u32 = 10;

/// Library operation and the subcommand that runs it.
pub const OPERATIONS: &[(&str, &str)] = &[
    ("minimalize", "ideal"),
    ("combine", "ideal"),
    ("power", "ideal"),
    ("is_m_primary", "ideal"),
    ("integral_closure", "closure"),
    ("colength", "length"),
    ("relative_colength", "length"),
    ("count_below", "count-below"),
    ("evaluate", "eval"),
    ("truncate", "truncate"),
    ("verify_family_axioms", "verify-family"),
    ("linear_growth_constant", "linear-growth"),
    ("staircase", "staircase"),
    ("pbody", "pbody"),
    ("minkowski_scale_sum", "minkowski"),
    ("covolume", "covol"),
    ("region_properties", "region-props"),
    ("volume_below", "volume-below"),
    ("hilbert_kunz", "hk"),
    ("samuel", "mult"),
    ("mixed_dim2", "mixed"),
    ("verma_rhs", "verma"),
    ("dim2_family_rhs", "dim2-rhs"),
    ("e_vs_ehk_check", "e-vs-ehk"),
    ("length_sequence", "limits"),
    ("double_limit_table", "double-limit"),
    ("basis_search", "basis"),
    ("fit_homogeneous", "fit"),
    ("coefficient_limits", "coeff-limits"),
];

#[derive(Debug, Parser)]
#[command(name = "pfam", version, about = "Lengths, multiplicities and limits for p-families of monomial ideals")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Characteristic p
    #[arg(short = 'p', long = "prime", global = true, default_value_t = 2)]
    pub p: u64,
    /// Largest Frobenius exponent e (q = p^e)
    #[arg(long, global = true, default_value_t = 8)]
    pub emax: u32,
    /// Largest base exponent b
    #[arg(long, global = true, default_value_t = 6)]
    pub bmax: u32,
    /// Relative PASS tolerance
    #[arg(long, global = true, default_value = "1/32")]
    pub tol: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Lift the caps on d, e_max and b_max
    #[arg(long = "unsafe-large", global = true)]
    pub unsafe_large: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Sum,
    Product,
    Intersection,
    Colon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Ordinary,
    Frobenius,
}

/// Inputs are inline JSON or `@path`.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimalize an ideal, combine it with another, or raise it to a power
    Ideal {
        #[arg(long)]
        ideal: String,
        #[arg(long, value_enum, requires = "other")]
        op: Option<Op>,
        #[arg(long)]
        other: Option<String>,
        #[arg(long, requires = "mode")]
        power: Option<u64>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// λ(R/I), or λ(J/I) with --top J
    Length {
        #[arg(long)]
        ideal: String,
        #[arg(long)]
        top: Option<String>,
    },
    /// Integral closure of I, or of I^n with --power n
    Closure {
        #[arg(long)]
        ideal: String,
        #[arg(long)]
        power: Option<u64>,
    },
    /// #{u ∈ I : <u, a> < α}
    CountBelow {
        #[arg(long)]
        ideal: String,
        #[arg(long)]
        halfspace: String,
    },
    /// Hilbert–Kunz multiplicity
    Hk {
        #[arg(long)]
        ideal: String,
    },
    /// Samuel multiplicity
    Mult {
        #[arg(long)]
        ideal: String,
    },
    /// Mixed multiplicity e(I|J) and the r-residual (d = 2)
    Mixed {
        #[arg(long)]
        ideal: String,
        #[arg(long)]
        other: String,
    },
    /// Right side of Verma's length formula (d = 2)
    Verma {
        /// JSON list of ideals
        #[arg(long)]
        ideals: String,
        /// JSON list of exponents r_i
        #[arg(long)]
        r: String,
        #[arg(long)]
        inclusive: bool,
    },
    /// Right side of the dimension-two family formula for b <= bmax
    Dim2Rhs {
        #[arg(long)]
        families: String,
        #[arg(long)]
        shifts: String,
        #[arg(long)]
        inclusive: bool,
    },
    /// e(I_q)/q^d against d!·e_HK(I_q)/q^d for e <= emax
    EVsEhk {
        #[arg(long)]
        family: String,
    },
    /// Ideals of a family for e <= emax
    Eval {
        #[arg(long)]
        family: String,
    },
    /// The p^a-th truncation of a family
    Truncate {
        #[arg(long)]
        family: String,
        #[arg(long)]
        a: u32,
    },
    /// Check the p-family axiom, the power condition I_q^p ⊆ I_{pq} and finite type for e <= emax
    VerifyFamily {
        #[arg(long)]
        family: String,
    },
    /// Smallest c with m^{cq} ∩ J_q = m^{cq} ∩ I_q for e <= emax
    LinearGrowth {
        #[arg(long)]
        j: String,
        #[arg(long)]
        i: String,
        #[arg(long, default_value_t = 1024)]
        cmax: u64,
    },
    /// Staircase region of an ideal
    Staircase {
        #[arg(long)]
        ideal: String,
    },
    /// Covolume of a region
    Covol {
        #[arg(long)]
        region: String,
    },
    /// p-body of a family up to q = p^emax
    Pbody {
        #[arg(long)]
        family: String,
    },
    /// Σ λ_i R_i; parts are [{"region": …, "scale": "λ"}, …]
    Minkowski {
        #[arg(long)]
        parts: String,
    },
    /// Convexity and coboundedness of a region
    RegionProps {
        #[arg(long)]
        region: String,
    },
    /// Volume of a region below a halfspace
    VolumeBelow {
        #[arg(long)]
        region: String,
        #[arg(long)]
        halfspace: String,
    },
    /// Normalized lengths λ(𝐉_q/𝐈_q𝐉_q)/q^d for e <= emax
    Limits {
        /// JSON list of {"family", "shift"} factors; empty for the unit ideal
        #[arg(long, default_value = "[]")]
        j: String,
        #[arg(long)]
        i: String,
        /// Frozen base b; live when omitted
        #[arg(long)]
        base: Option<u32>,
    },
    /// Frozen-base table against live lengths, with a PASS/FAIL verdict
    DoubleLimit {
        #[arg(long, default_value = "[]")]
        j: String,
        #[arg(long)]
        i: String,
    },
    /// Nonsingular p-power sample basis for degree-d forms in s variables
    Basis {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        d: u32,
    },
    /// Exact homogeneous fit; samples are [{"point": [...], "value": "..."}, …]
    Fit {
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        samples: String,
    },
    /// Fitted polynomial coefficients for b <= bmax and their limit
    CoeffLimits {
        #[arg(long)]
        families: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ideal { .. } => "ideal",
            Command::Length { .. } => "length",
            Command::Closure { .. } => "closure",
            Command::CountBelow { .. } => "count-below",
            Command::Hk { .. } => "hk",
            Command::Mult { .. } => "mult",
            Command::Mixed { .. } => "mixed",
            Command::Verma { .. } => "verma",
            Command::Dim2Rhs { .. } => "dim2-rhs",
            Command::EVsEhk { .. } => "e-vs-ehk",
            Command::Eval { .. } => "eval",
            Command::Truncate { .. } => "truncate",
            Command::VerifyFamily { .. } => "verify-family",
            Command::LinearGrowth { .. } => "linear-growth",
            Command::Staircase { .. } => "staircase",
            Command::Covol { .. } => "covol",
            Command::Pbody { .. } => "pbody",
            Command::Minkowski { .. } => "minkowski",
            Command::RegionProps { .. } => "region-props",
            Command::VolumeBelow { .. } => "volume-below",
            Command::Limits { .. } => "limits",
            Command::DoubleLimit { .. } => "double-limit",
            Command::Basis { .. } => "basis",
            Command::Fit { .. } => "fit",
            Command::CoeffLimits { .. } => "coeff-limits",
        }
    }
}

/// A failed run, carrying its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// Malformed input (exit 2).
    Parse(String),
    /// Bad parameter values (exit 3).
    Validation(String),
    /// Inputs of different dimensions (exit 4).
    Dimension(String),
    /// The computation itself failed (exit 5).
    Math(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Validation(_) => 3,
            Failure::Dimension(_) => 4,
            Failure::Math(_) => 5,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Validation(m) | Failure::Dimension(m) | Failure::Math(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e.root() {
            Error::DimensionMismatch { .. } => Failure::Dimension(msg),
            Error::NotPrime(_)
            | Error::NotPowerOfP { .. }
            | Error::ZeroDimension
            | Error::Invalid(_) => Failure::Validation(msg),
            _ => Failure::Math(msg),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// Rendered output and whether a verdict failed.
pub struct Report {
    pub text: String,
    pub verdict_failed: bool,
}

fn read_input(raw: &str) -> Res<String> {
    match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("cannot read {path}: {e}"))),
        None => Ok(raw.to_string()),
    }
}

fn parse<T: DeserializeOwned>(raw: &str, what: &str) -> Res<T> {
    let text = read_input(raw)?;
    serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("invalid {what}: {e}")))
}

fn parse_q(s: &str, what: &str) -> Res<Q> {
    rational::parse_q(s).map_err(|e| Failure::Validation(format!("invalid {what}: {e}")))
}

struct Ctx {
    p: Prime,
    emax: u32,
    bmax: u32,
    tol: Q,
    format: Format,
    unsafe_large: bool,
}

impl Ctx {
    fn new(g: &Global) -> Res<Ctx> {
        let p = Prime::new(g.p).map_err(Failure::from)?;
        if !g.unsafe_large {
            if g.emax > MAX_EMAX {
                return Err(Failure::Validation(format!("--emax {} exceeds the cap {MAX_EMAX}", g.emax)));
            }
            if g.bmax > MAX_BMAX {
                return Err(Failure::Validation(format!("--bmax {} exceeds the cap {MAX_BMAX}", g.bmax)));
            }
        }
        let tol = parse_q(&g.tol, "tolerance")?;
        if tol < Q::from_integer(0.into()) {
            return Err(Failure::Validation("tolerance must be nonnegative".into()));
        }
        Ok(Ctx {
            p,
            emax: g.emax,
            bmax: g.bmax,
            tol,
            format: g.format,
            unsafe_large: g.unsafe_large,
        })
    }

    fn check_dim(&self, d: usize) -> Res<()> {
        if d > MAX_DIM && !self.unsafe_large {
            return Err(Failure::Validation(format!("dimension {d} exceeds the cap {MAX_DIM}")));
        }
        Ok(())
    }

    fn ideal(&self, raw: &str) -> Res<MonomialIdeal> {
        let i: MonomialIdeal = parse(raw, "ideal")?;
        self.check_dim(i.dim())?;
        Ok(i)
    }

    fn ideals(&self, raw: &str) -> Res<Vec<MonomialIdeal>> {
        let v: Vec<MonomialIdeal> = parse(raw, "ideal list")?;
        for i in &v {
            self.check_dim(i.dim())?;
        }
        Ok(v)
    }

    fn family(&self, raw: &str) -> Res<FamilyExpr> {
        let f: FamilyExpr = parse(raw, "family")?;
        self.check_dim(f.dim()?)?;
        Ok(f)
    }

    fn families(&self, raw: &str) -> Res<Vec<FamilyExpr>> {
        let v: Vec<FamilyExpr> = parse(raw, "family list")?;
        for f in &v {
            self.check_dim(f.dim()?)?;
        }
        Ok(v)
    }

    fn factors(&self, raw: &str) -> Res<Vec<Factor>> {
        let v: Vec<Factor> = parse(raw, "factor list")?;
        for f in &v {
            self.check_dim(f.family.dim()?)?;
        }
        Ok(v)
    }

    fn region(&self, raw: &str) -> Res<Region> {
        let r: Region = parse(raw, "region")?;
        self.check_dim(r.dim())?;
        Ok(r)
    }
}

/// Adds a `<key>_decimal` sibling next to every rational-valued field whose
/// key is a name; maps keyed by data (like exponent tuples) are left alone.
fn decorate(v: &mut Value) {
    match v {
        Value::Object(map) => {
            let extra: Vec<(String, Value)> = map
                .iter()
                .filter_map(|(k, x)| {
                    if !k.starts_with(|c: char| c.is_ascii_alphabetic()) {
                        return None;
                    }
                    let s = x.as_str()?;
                    let (n, d) = s.split_once('/')?;
                    n.parse::<BigInt>().ok()?;
                    d.parse::<BigInt>().ok()?;
                    let q = rational::parse_q(s).ok()?;
                    Some((format!("{k}_decimal"), Value::String(rational::decimal12(&q))))
                })
                .collect();
            for x in map.values_mut() {
                decorate(x);
            }
            for (k, x) in extra {
                map.entry(k).or_insert(x);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(decorate),
        _ => {}
    }
}

fn json<T: Serialize>(value: &T) -> Res<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Failure::Math(e.to_string()))?;
    decorate(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Failure::Math(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> Res<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Math(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Math(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Math(e.to_string()))
}

/// `num, den, float` cells for a rational.
fn q_cells(q: &Q) -> [String; 3] {
    [q.numer().to_string(), q.denom().to_string(), rational::decimal12(q)]
}

fn row(prefix: [String; 3], q: &Q) -> Vec<String> {
    prefix.into_iter().chain(q_cells(q)).collect()
}

const SEQ_HEADER: [&str; 6] = ["b", "e", "q", "num", "den", "float"];

fn ok(text: String) -> Res<Report> {
    Ok(Report {
        text,
        verdict_failed: false,
    })
}

fn no_csv(ctx: &Ctx, name: &str) -> Res<()> {
    if ctx.format == Format::Csv {
        return Err(Failure::Validation(format!("{name} has no CSV form; use --format json")));
    }
    Ok(())
}

#[derive(Serialize)]
struct IdealOut {
    dim: usize,
    gens: Vec<Vec<u64>>,
    m_primary: bool,
}

fn ideal_out(i: &MonomialIdeal) -> IdealOut {
    IdealOut {
        dim: i.dim(),
        gens: i.gens().iter().map(|g| g.coords().to_vec()).collect(),
        m_primary: i.is_m_primary(),
    }
}

fn scalar(key: &str, value: String) -> Value {
    serde_json::json!({ key: value })
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Res<Report> {
    let ctx = Ctx::new(&cli.global)?;
    let p = ctx.p;
    let name = cli.command.name();
    match &cli.command {
        Command::Ideal { ideal, op, other, power, mode } => {
            no_csv(&ctx, name)?;
            let mut i = ctx.ideal(ideal)?;
            if let (Some(op), Some(other)) = (op, other) {
                let kind = match op {
                    Op::Sum => Combine::Sum,
                    Op::Product => Combine::Product,
                    Op::Intersection => Combine::Intersection,
                    Op::Colon => Combine::Colon,
                };
                i = combine(&i, &ctx.ideal(other)?, kind)?;
            }
            if let (Some(n), Some(mode)) = (power, mode) {
                let mode = match mode {
                    Mode::Ordinary => PowerMode::Ordinary,
                    Mode::Frobenius => PowerMode::Frobenius { p },
                };
                i = i.power(*n, mode)?;
            }
            ok(json(&ideal_out(&i))?)
        }
        Command::Length { ideal, top } => {
            no_csv(&ctx, name)?;
            let k = ctx.ideal(ideal)?;
            let n = match top {
                Some(j) => relative_colength(&ctx.ideal(j)?, &k)?,
                None => colength(&k)?,
            };
            ok(json(&scalar("length", n.to_string()))?)
        }
        Command::Closure { ideal, power } => {
            no_csv(&ctx, name)?;
            let i = ctx.ideal(ideal)?;
            let c = match power {
                Some(n) => closed_power(&i, *n)?,
                None => integral_closure(&i)?,
            };
            ok(json(&ideal_out(&c))?)
        }
        Command::CountBelow { ideal, halfspace } => {
            no_csv(&ctx, name)?;
            let i = ctx.ideal(ideal)?;
            let h: Halfspace = parse(halfspace, "halfspace")?;
            ok(json(&scalar("count", count_below(&i, &h)?.to_string()))?)
        }
        Command::Hk { ideal } => {
            no_csv(&ctx, name)?;
            let v = hilbert_kunz(&ctx.ideal(ideal)?)?;
            ok(json(&scalar("e_hk", rational::render_q(&v)))?)
        }
        Command::Mult { ideal } => {
            no_csv(&ctx, name)?;
            let v = samuel(&ctx.ideal(ideal)?)?;
            ok(json(&scalar("e", v.to_string()))?)
        }
        Command::Mixed { ideal, other } => {
            no_csv(&ctx, name)?;
            let r = mixed_dim2(&ctx.ideal(ideal)?, &ctx.ideal(other)?)?;
            ok(json(&r)?)
        }
        Command::Verma { ideals, r, inclusive } => {
            no_csv(&ctx, name)?;
            let ideals = ctx.ideals(ideals)?;
            let r: Vec<u64> = parse(r, "exponent list")?;
            let v = verma_rhs(&ideals, &r, cross(*inclusive))?;
            ok(json(&scalar("rhs", v.to_string()))?)
        }
        Command::Dim2Rhs { families, shifts, inclusive } => {
            let fams = ctx.families(families)?;
            let shifts: Vec<u32> = parse(shifts, "shift list")?;
            let r = dim2_family_rhs(&fams, &shifts, p, ctx.bmax, cross(*inclusive))?;
            match ctx.format {
                Format::Json => ok(json(&r)?),
                Format::Csv => {
                    let rows = r
                        .entries
                        .iter()
                        .map(|x| row([x.b.to_string(), String::new(), String::new()], &x.value))
                        .collect();
                    ok(csv_table(&["b", "e", "q", "value_num", "value_den", "value_float"], rows)?)
                }
            }
        }
        Command::EVsEhk { family } => {
            let f = ctx.family(family)?;
            let r = e_vs_ehk_check(&f, p, ctx.emax)?;
            match ctx.format {
                Format::Json => ok(json(&r)?),
                Format::Csv => {
                    let mut rows = Vec::new();
                    for x in &r.rows {
                        for (series, v) in [("samuel", &x.samuel), ("scaled_hk", &x.scaled_hk), ("gap", &x.gap)] {
                            rows.push(row([x.e.to_string(), x.q.to_string(), series.to_string()], v));
                        }
                    }
                    ok(csv_table(&["e", "q", "series", "num", "den", "float"], rows)?)
                }
            }
        }
        Command::Eval { family } => {
            no_csv(&ctx, name)?;
            let f = ctx.family(family)?;
            let terms = (0..=ctx.emax)
                .map(|e| Ok(ideal_out(&f.evaluate(p, e)?)))
                .collect::<Res<Vec<_>>>()?;
            ok(json(&terms)?)
        }
        Command::Truncate { family, a } => {
            no_csv(&ctx, name)?;
            let t = truncate(&ctx.family(family)?, *a);
            let terms = (0..=ctx.emax)
                .map(|e| Ok(ideal_out(&t.evaluate(p, e)?)))
                .collect::<Res<Vec<_>>>()?;
            ok(json(&serde_json::json!({ "family": t, "terms": terms }))?)
        }
        Command::VerifyFamily { family } => {
            no_csv(&ctx, name)?;
            let r = verify_family_axioms(&ctx.family(family)?, p, ctx.emax)?;
            Ok(Report {
                verdict_failed: !r.p_family_ok,
                text: json(&r)?,
            })
        }
        Command::LinearGrowth { j, i, cmax } => {
            no_csv(&ctx, name)?;
            let c = linear_growth_constant(&ctx.family(j)?, &ctx.family(i)?, p, *cmax, ctx.emax)?;
            ok(json(&serde_json::json!({ "c": c, "checked_up_to": ctx.emax }))?)
        }
        Command::Staircase { ideal } => {
            no_csv(&ctx, name)?;
            ok(json(&staircase(&ctx.ideal(ideal)?)?)?)
        }
        Command::Covol { region } => {
            no_csv(&ctx, name)?;
            ok(json(&covolume(&ctx.region(region)?)?)?)
        }
        Command::Pbody { family } => {
            no_csv(&ctx, name)?;
            let q_max = p.pow(ctx.emax)?;
            let b = pbody(&ctx.family(family)?, p, q_max)?;
            ok(json(&serde_json::json!({ "region": b.region, "q_max": b.q_max, "exact": b.exact }))?)
        }
        Command::Minkowski { parts } => {
            no_csv(&ctx, name)?;
            let raw: Vec<Value> = parse(parts, "part list")?;
            let mut list = Vec::new();
            for part in raw {
                let region: Region = serde_json::from_value(part.get("region").cloned().unwrap_or(Value::Null))
                    .map_err(|e| Failure::Parse(format!("invalid region: {e}")))?;
                ctx.check_dim(region.dim())?;
                let scale = rational::value_to_q(part.get("scale").unwrap_or(&Value::Null))
                    .map_err(|e| Failure::Parse(format!("invalid scale: {e}")))?;
                list.push((region, scale));
            }
            ok(json(&minkowski_scale_sum(&list)?)?)
        }
        Command::RegionProps { region } => {
            no_csv(&ctx, name)?;
            ok(json(&region_properties(&ctx.region(region)?))?)
        }
        Command::VolumeBelow { region, halfspace } => {
            no_csv(&ctx, name)?;
            let r = ctx.region(region)?;
            let h: Halfspace = parse(halfspace, "halfspace")?;
            ok(json(&volume_below(&r, &h)?)?)
        }
        Command::Limits { j, i, base } => {
            let base = base.map_or(Base::Live, Base::Frozen);
            let seq = length_sequence(&ctx.factors(j)?, &ctx.factors(i)?, p, base, ctx.emax)?;
            match ctx.format {
                Format::Json => ok(json(&seq)?),
                Format::Csv => {
                    let rows = seq
                        .entries
                        .iter()
                        .map(|x| row([x.b.map(|b| b.to_string()).unwrap_or_default(), x.e.to_string(), x.q.to_string()], &x.value))
                        .collect();
                    ok(csv_table(&SEQ_HEADER, rows)?)
                }
            }
        }
        Command::DoubleLimit { j, i } => {
            let r = double_limit_table(&ctx.factors(j)?, &ctx.factors(i)?, p, ctx.bmax, ctx.emax, &ctx.tol)?;
            let failed = r.verdict != Verdict::Pass;
            let verdict = match &r.verdict {
                Verdict::Pass => "PASS".to_string(),
                Verdict::Fail => "FAIL".to_string(),
                Verdict::AxiomFailure { side, family, e, witness } => {
                    format!("AXIOM_FAILURE side={side:?} family={family} e={e} witness={witness}")
                }
            };
            let text = match ctx.format {
                Format::Json => json(&r)?,
                Format::Csv => {
                    let mut rows = Vec::new();
                    for (b, line) in r.lhs.iter().enumerate() {
                        for (e, v) in line.iter().enumerate() {
                            rows.push(row([b.to_string(), e.to_string(), p.pow(e as u32)?.to_string()], v));
                        }
                    }
                    for (e, v) in r.rhs.iter().enumerate() {
                        rows.push(row(["live".to_string(), e.to_string(), p.pow(e as u32)?.to_string()], v));
                    }
                    csv_table(&SEQ_HEADER, rows)?
                }
            };
            Ok(Report {
                text: format!("{text}{verdict}\n"),
                verdict_failed: failed,
            })
        }
        Command::Basis { s, d } => {
            no_csv(&ctx, name)?;
            ok(json(&basis_search(*s, *d, p)?)?)
        }
        Command::Fit { degree, samples } => {
            no_csv(&ctx, name)?;
            let samples: Vec<Sample> = parse(samples, "sample list")?;
            let fit = fit_homogeneous(*degree, &samples)?;
            Ok(Report {
                verdict_failed: !fit.is_consistent(),
                text: json(&fit)?,
            })
        }
        Command::CoeffLimits { families } => {
            no_csv(&ctx, name)?;
            let r = coefficient_limits(&ctx.families(families)?, p, ctx.bmax, ctx.emax)?;
            Ok(Report {
                verdict_failed: !r.polynomial_ok,
                text: json(&r)?,
            })
        }
    }
}

fn cross(inclusive: bool) -> CrossSum {
    if inclusive {
        CrossSum::Inclusive
    } else {
        CrossSum::Strict
    }
}

/// Runs the command, writes its output and returns the exit code.
pub fn main_with(cli: Cli) -> i32 {
    match run(&cli) {
        Ok(report) => {
            let written = match &cli.global.out {
                Some(path) => std::fs::write(path, &report.text).map_err(|e| e.to_string()),
                None => {
                    print!("{}", report.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return 5;
            }
            if report.verdict_failed {
                1
            } else {
                0
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}
