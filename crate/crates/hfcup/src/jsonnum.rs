//! JSON encoding of arbitrary-precision integers.
//!
//! Integers within the 53-bit range that JSON consumers can represent
//! losslessly are emitted as plain numbers; anything larger becomes a
//! decimal string. Both encodings are accepted on input.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const SAFE_MAX: i64 = (1 << 53) - 1;

/// Transparent wrapper giving `BigInt` the number-or-string JSON encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) if (-SAFE_MAX..=SAFE_MAX).contains(&v) => serializer.serialize_i64(v),
            _ => serializer.serialize_str(&self.0.to_string()),
        }
    }
}

struct JsonIntVisitor;

impl Visitor<'_> for JsonIntVisitor {
    type Value = JsonInt;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonInt, E> {
        Ok(JsonInt(BigInt::from(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonInt, E> {
        Ok(JsonInt(BigInt::from(v)))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonInt, E> {
        v.parse::<BigInt>()
            .map(JsonInt)
            .map_err(|_| E::custom(format!("not a decimal integer: {v:?}")))
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<JsonInt, D::Error> {
        deserializer.deserialize_any(JsonIntVisitor)
    }
}

pub(crate) fn wrap(values: &[BigInt]) -> Vec<JsonInt> {
    values.iter().cloned().map(JsonInt).collect()
}

pub(crate) fn unwrap(values: Vec<JsonInt>) -> Vec<BigInt> {
    values.into_iter().map(|v| v.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values_stay_numbers() {
        let v = serde_json::to_value(JsonInt(BigInt::from(-42))).unwrap();
        assert_eq!(v, serde_json::json!(-42));
    }

    #[test]
    fn large_values_become_strings() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let v = serde_json::to_value(JsonInt(big.clone())).unwrap();
        assert_eq!(v, serde_json::json!("123456789012345678901234567890"));
        let back: JsonInt = serde_json::from_value(v).unwrap();
        assert_eq!(back.0, big);
    }

    #[test]
    fn boundary_is_exact() {
        let max = BigInt::from((1i64 << 53) - 1);
        let v = serde_json::to_value(JsonInt(max.clone())).unwrap();
        assert!(v.is_i64());
        let over = &max + 1;
        let v = serde_json::to_value(JsonInt(over)).unwrap();
        assert!(v.is_string());
    }
}
