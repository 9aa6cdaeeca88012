//! Serde helpers for arbitrary-precision integers.
//!
//! Values that fit in an `i64` are written as JSON/TOML numbers; larger ones
//! as decimal strings. Both forms are accepted on input.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Int(i64),
    Text(String),
}

pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(small) => small.serialize(s),
        None => s.collect_str(v),
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    match Repr::deserialize(d)? {
        Repr::Int(v) => Ok(v.into()),
        Repr::Text(t) => t.trim().parse().map_err(serde::de::Error::custom),
    }
}

/// Same encoding for a `Vec<BigInt>`.
pub mod vec {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super")] BigInt);

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| Wrap(x.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}
