//! Serde helpers: big integers as decimal strings, rationals as "num/den",
//! floats as shortest round-trip decimal strings. No precision is lost
//! across languages that read the reports.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use serde::Serializer;

pub fn bigint_string<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn biguint_string<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn f64_string<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v}"))
}

pub fn rational_string<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
}

pub fn opt_rational_string<S: Serializer>(
    v: &Option<BigRational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => rational_string(r, s),
        None => s.serialize_none(),
    }
}

pub fn ratio64_string<S: Serializer>(v: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
}

pub fn vec_biguint_string<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub fn vec_ratio64_string<S: Serializer>(v: &[Rational64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| format!("{}/{}", x.numer(), x.denom())))
}
