//! Exact rationals and their `"p/q"` text form.
//!
//! Every number in this crate is a [`Rational`]. Text I/O uses `"p/q"` or a
//! plain integer literal; floats are never parsed.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// `n / 1`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"-p/q"` or an integer literal.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn max_abs<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Rational {
    xs.into_iter()
        .map(|x| x.abs())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

/// Serde adapters that store rationals as `"p/q"` strings.
pub mod serde_str {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => parse(&s).map_err(de::Error::custom),
            serde_json::Value::Number(n) if n.is_i64() => Ok(int(n.as_i64().unwrap())),
            other => Err(de::Error::custom(format!(
                "expected a \"p/q\" string or integer, got {other}"
            ))),
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        #[derive(serde::Deserialize)]
        struct Wrapped(#[serde(with = "super")] Rational);

        pub fn serialize<S: Serializer>(
            v: &[Rational],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Rational>, D::Error> {
            let v: Vec<Wrapped> = Vec::deserialize(d)?;
            Ok(v.into_iter().map(|w| w.0).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse("-4").unwrap(), int(-4));
        assert_eq!(parse(" 7 / -14 ").unwrap(), rat(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("0.5").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn format_is_reduced() {
        assert_eq!(format(&rat(6, 4)), "3/2");
        assert_eq!(format(&rat(-6, 3)), "-2");
        assert_eq!(format(&zero()), "0");
    }

    proptest::proptest! {
        #[test]
        fn text_roundtrip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = rat(n, d);
            proptest::prop_assert_eq!(parse(&format(&r)).unwrap(), r);
        }
    }
}
