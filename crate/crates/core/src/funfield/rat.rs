//! Exact rationals.
//!
//! `BigRational` already keeps itself reduced with a positive denominator, so
//! it is used directly; this module only adds constructors and the `"p/q"`
//! string format used on the wire.

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serializer};

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn format_rat(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p"`, `"p/q"` or a plain decimal like `"-1.25"`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rat::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let mag: BigInt = digits.parse().ok()?;
        let scale = num::pow(BigInt::from(10), frac.len());
        let q = Rat::new(mag, scale);
        return Some(if negative { -q } else { q });
    }
    s.parse::<BigInt>().ok().map(Rat::from_integer)
}

/// The first continued-fraction convergent of `x` within `tol` of it, with
/// denominator at most `max_den`.
pub fn reconstruct_within(x: f64, max_den: u64, tol: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e18 {
            return None;
        }
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            return None;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (x - p1 as f64 / q1 as f64).abs() <= tol {
            return Some(Rat::new(BigInt::from(p1), BigInt::from(q1)));
        }
        let frac = r - a;
        if frac.abs() < 1e-15 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

pub fn to_f64(q: &Rat) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn abs(q: &Rat) -> Rat {
    q.abs()
}

pub fn serialize<S: Serializer>(q: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rat(q))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
    let s = String::deserialize(d)?;
    parse_rat(&s).ok_or_else(|| de::Error::custom(format!("invalid rational `{s}`")))
}

pub mod vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&format_rat(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rat(s).ok_or_else(|| de::Error::custom(format!("invalid rational `{s}`"))))
            .collect()
    }
}
