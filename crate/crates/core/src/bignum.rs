//! Serde adapters for big integers.
//!
//! `number` writes a JSON number of arbitrary length (serde_json is built with
//! `arbitrary_precision`); `string` writes a decimal string.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;

pub mod number {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        let n = serde_json::Number::from_str(&v.to_string()).map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        BigInt::from_str(&n.to_string()).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
            Option::<serde_json::Number>::deserialize(d)?
                .map(|n| BigInt::from_str(&n.to_string()).map_err(serde::de::Error::custom))
                .transpose()
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                let n = serde_json::Number::from_str(&x.to_string())
                    .map_err(serde::ser::Error::custom)?;
                seq.serialize_element(&n)?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
            let v = Vec::<serde_json::Number>::deserialize(d)?;
            v.iter()
                .map(|n| BigInt::from_str(&n.to_string()).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

pub mod string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// `Some(r)` when `v = r^2`.
pub fn exact_sqrt(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

pub fn is_square_u64(n: u64) -> bool {
    let r = n.isqrt();
    r * r == n
}
