//! Exact rational helpers and the canonical `"p/q"` text form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational used throughout the crate.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Canonical form: reduced, positive denominator, always with a slash.
pub fn format_q(v: &Q) -> String {
    // Ratio keeps itself reduced with a positive denominator.
    format!("{}/{}", v.numer(), v.denom())
}

pub fn parse_q(s: &str) -> Result<Q, Error> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(num, den))
}

pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float, then rounded to the nearest multiple of `1/den`.
pub fn round_f64(v: f64, den: i64) -> Q {
    let scaled = (v * den as f64).round();
    Q::new(BigInt::from(scaled as i128), BigInt::from(den))
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Q>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn is_nonnegative(v: &Q) -> bool {
    !v.is_negative()
}

/// Serde adapter storing a [`Q`] as its canonical string.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}
