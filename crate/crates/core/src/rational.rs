//! Exact rationals for wall values, plus exact comparison against `sqrt(n)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Reduced fraction with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(v.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    /// Exact comparison of `self` with `sqrt(n)`.
    pub fn cmp_sqrt(&self, n: u64) -> Ordering {
        let num = self.numer();
        if !num.is_positive() {
            return if n == 0 && num.is_zero() {
                Ordering::Equal
            } else {
                Ordering::Less
            };
        }
        let lhs = num * num;
        let rhs = BigInt::from(n) * self.denom() * self.denom();
        lhs.cmp(&rhs)
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl std::ops::Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl std::ops::Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// Accepts `p/q` or a bare integer. Decimal notation is rejected.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(['.', 'e', 'E']) {
            return Err(Error::Parse(format!(
                "'{s}' is not an exact rational; write it as p/q"
            )));
        }
        let parse = |t: &str| {
            BigInt::from_str(t.trim())
                .map_err(|_| Error::Parse(format!("bad integer '{t}' in '{s}'")))
        };
        match s.split_once('/') {
            Some((p, q)) => Rational::new(parse(p)?, parse(q)?),
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: String,
    den: String,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr {
            num: self.numer().to_string(),
            den: self.denom().to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = RationalRepr::deserialize(deserializer)?;
        let num = BigInt::from_str(&repr.num).map_err(D::Error::custom)?;
        let den = BigInt::from_str(&repr.den).map_err(D::Error::custom)?;
        if !den.is_positive() {
            return Err(D::Error::custom("denominator must be positive"));
        }
        let r = Rational::new(num, den).map_err(D::Error::custom)?;
        if r.denom().to_string() != repr.den {
            return Err(D::Error::custom("rational is not in lowest terms"));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_on_construction() {
        let r = Rational::new(740, -234).unwrap();
        assert_eq!(r.numer(), &BigInt::from(-370));
        assert_eq!(r.denom(), &BigInt::from(117));
    }

    #[test]
    fn parses_exact_forms_only() {
        assert_eq!(
            "27/5".parse::<Rational>().unwrap(),
            Rational::new(27, 5).unwrap()
        );
        assert_eq!("4".parse::<Rational>().unwrap(), Rational::from_integer(4));
        assert!("5.4".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x/2".parse::<Rational>().is_err());
    }

    #[test]
    fn display_drops_unit_denominator() {
        assert_eq!(Rational::new(8, 2).unwrap().to_string(), "4");
        assert_eq!(Rational::new(370, 117).unwrap().to_string(), "370/117");
    }

    #[test]
    fn sqrt_comparison() {
        assert_eq!(
            Rational::new(370, 117).unwrap().cmp_sqrt(10),
            Ordering::Greater
        );
        assert_eq!(
            Rational::new(19, 6).unwrap().cmp_sqrt(10),
            Ordering::Greater
        );
        assert_eq!(Rational::new(117, 37).unwrap().cmp_sqrt(10), Ordering::Less);
        assert_eq!(Rational::from_integer(4).cmp_sqrt(16), Ordering::Equal);
        assert_eq!(Rational::from_integer(-5).cmp_sqrt(16), Ordering::Less);
    }

    #[test]
    fn json_uses_string_fields() {
        let r = Rational::new(533530, 168717).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"num":"533530","den":"168717"}"#);
        let back: Rational = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<Rational>(r#"{"num":"2","den":"4"}"#).is_err());
    }
}
