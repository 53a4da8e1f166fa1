//! Exact rational helpers: parsing, rendering and a few conversions.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_u(n: u64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_big(n: &BigUint) -> Q {
    Q::from_integer(BigInt::from(n.clone()))
}

pub fn q_frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// `base^exp` as an exact rational.
pub fn q_pow(base: u64, exp: u32) -> Q {
    Q::from_integer(BigInt::from(base).pow(exp))
}

/// Parses `"a/b"`, `"a"` or a decimal like `"0.25"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        let v = Q::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// Renders `num/den`, always with an explicit denominator.
pub fn render_q(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Decimal rendering with 12 significant digits.
pub fn decimal12(q: &Q) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let x = q.to_f64().unwrap_or(f64::NAN);
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-6..=15).contains(&mag) {
        return format!("{:.11e}", x);
    }
    let decimals = (11 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn ceil_to_u64(q: &Q) -> Result<u64> {
    if q.is_negative() {
        return Ok(0);
    }
    q.ceil().to_integer().to_u64().ok_or(Error::Overflow("ceiling"))
}

pub fn is_integer(q: &Q) -> bool {
    q.denom().is_one()
}

pub fn abs_diff(a: &Q, b: &Q) -> Q {
    (a - b).abs()
}

/// Serde adapter storing a rational as a `"num/den"` string. Integers and
/// plain JSON numbers are accepted on input.
pub mod as_string {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&render_q(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_q(&v).map_err(de::Error::custom)
    }
}

pub mod vec_as_string {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&render_q(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(|x| value_to_q(x).map_err(de::Error::custom))
            .collect()
    }
}

/// Serializes big integers as decimal strings.
pub mod int_string {
    use super::*;

    pub fn serialize<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(v)
    }
}

pub fn value_to_q(v: &serde_json::Value) -> Result<Q> {
    match v {
        serde_json::Value::String(s) => parse_q(s),
        serde_json::Value::Number(n) => parse_q(&n.to_string()),
        other => Err(Error::Invalid(format!("expected rational, got {other}"))),
    }
}
