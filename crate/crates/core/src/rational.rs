//! Exact rational numbers and their text form.
//!
//! Every quantity that flows through the solver is a [`Q`]. Text input accepts
//! integers (`-3`), fractions (`7/2`) and finite decimals (`1.25`); output always
//! uses the `p/q` form (integers print without a denominator).

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_q(text: &str) -> Result<Q> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, dec)) = s.split_once('.') {
        let (neg, int) = match int.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, int.strip_prefix('+').unwrap_or(int)),
        };
        if dec.is_empty() || !dec.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if !int.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{}{}", if int.is_empty() { "0" } else { int }, dec);
        let n = BigInt::from_str(&digits).map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), dec.len());
        let v = Q::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    BigInt::from_str(s).map(Q::from_integer).map_err(|_| bad())
}

pub fn fmt_q(v: &Q) -> String {
    v.to_string()
}

/// Largest absolute value in a slice; zero for an empty slice.
pub fn max_abs<'a>(vals: impl IntoIterator<Item = &'a Q>) -> Q {
    vals.into_iter()
        .map(|v| v.abs())
        .fold(Q::zero(), |a, b| if b > a { b } else { a })
}

pub fn q_min(a: &Q, b: &Q) -> Q {
    if a <= b { a.clone() } else { b.clone() }
}

pub fn q_max(a: &Q, b: &Q) -> Q {
    if a >= b { a.clone() } else { b.clone() }
}

/// Best rational approximation of `v` with denominator at most `max_den`
/// (continued-fraction convergents, then the best semiconvergent).
pub fn limit_denominator(v: &Q, max_den: &BigInt) -> Q {
    if v.denom() <= max_den {
        return v.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut n = v.numer().clone();
    let mut d = v.denom().clone();
    loop {
        let a = num_integer::Integer::div_floor(&n, &d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        if d.is_zero() {
            break;
        }
    }
    let k = num_integer::Integer::div_floor(&(max_den - &q0), &q1);
    let b1 = Q::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let b2 = Q::new(p1, q1);
    if (&b2 - v).abs() <= (&b1 - v).abs() { b2 } else { b1 }
}

pub mod serde_q {
    //! Serde adapters that carry rationals as strings.
    use super::{fmt_q, parse_q, Q};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&fmt_q(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter().map(|s| parse_q(s).map_err(D::Error::custom)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_q("3").unwrap(), q(3));
        assert_eq!(parse_q("-7/14").unwrap(), frac(-1, 2));
        assert_eq!(parse_q("1.25").unwrap(), frac(5, 4));
        assert_eq!(parse_q("-0.5").unwrap(), frac(-1, 2));
        assert_eq!(parse_q(".5").unwrap(), frac(1, 2));
        assert!(parse_q("1e3").is_err());
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn formats_as_fraction() {
        assert_eq!(fmt_q(&frac(10, 4)), "5/2");
        assert_eq!(fmt_q(&q(-3)), "-3");
    }

    #[test]
    fn limits_denominator() {
        let third_ish = frac(333_333, 1_000_000);
        assert_eq!(limit_denominator(&third_ish, &BigInt::from(10)), frac(1, 3));
        assert_eq!(limit_denominator(&frac(1, 7), &BigInt::from(10)), frac(1, 7));
    }
}
