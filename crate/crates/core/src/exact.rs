//! Exact rational quantities used by reports and audits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

/// `base^exp` for a non-negative integer exponent.
pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub fn to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if d != 0.0 => n / d,
        _ => f64::NAN,
    }
}

/// `ceil(q)` for a non-negative rational.
pub fn ceil_usize(q: &Rational) -> usize {
    q.ceil().to_integer().to_usize().unwrap_or(usize::MAX)
}

/// `lhs / rhs`, or `None` when `rhs` is zero.
pub fn quotient(lhs: &Rational, rhs: &Rational) -> Option<Rational> {
    if rhs.is_zero() {
        None
    } else {
        Some(lhs / rhs)
    }
}

pub fn is_open_unit(q: &Rational) -> bool {
    q.is_positive() && q < &Rational::one()
}

pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        let n: BigInt = format!("{whole}{frac}").parse().ok()?;
        return Some(Rational::new(n, BigInt::from(10u32).pow(digits)));
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Serialize a rational as the string `"num/den"` (or `"num"` when integral).
pub mod serde_rational {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{s}`")))
    }
}

pub mod serde_rational_opt {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&q.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        match s {
            None => Ok(None),
            Some(s) => super::parse(&s)
                .map(Some)
                .ok_or_else(|| serde::de::Error::custom(format!("bad rational `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("9/2"), Some(ratio(9, 2)));
        assert_eq!(parse("0.1"), Some(ratio(1, 10)));
        assert_eq!(parse("3"), Some(int(3)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(ceil_usize(&ratio(18, 5)), 4);
    }
}
