//! JSON value model used for tool-call arguments.
//!
//! Numbers keep their source lexeme for serialization but compare by decimal
//! value, so `7`, `7.0` and `0.7e1` are the same argument. Object equality
//! ignores key order; array equality does not.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

/// Ordered string-keyed map of JSON values.
pub type JsonMap = IndexMap<String, JsonValue>;

#[derive(Debug, Clone, PartialEq)]
pub enum JsonValue {
    Null,
    Bool(bool),
    Number(Number),
    String(String),
    Array(Vec<JsonValue>),
    Object(JsonMap),
}

impl JsonValue {
    pub fn kind(&self) -> &'static str {
        match self {
            JsonValue::Null => "null",
            JsonValue::Bool(_) => "boolean",
            JsonValue::Number(_) => "number",
            JsonValue::String(_) => "string",
            JsonValue::Array(_) => "array",
            JsonValue::Object(_) => "object",
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            JsonValue::String(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_object(&self) -> Option<&JsonMap> {
        match self {
            JsonValue::Object(m) => Some(m),
            _ => None,
        }
    }

    /// Compact JSON text.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("JsonValue serialization is infallible")
    }
}

/// Structural equality with numeric value-equality, case-sensitive strings,
/// order-insensitive objects and order-sensitive arrays.
pub fn canonical_equal(a: &JsonValue, b: &JsonValue) -> bool {
    a == b
}

impl From<serde_json::Value> for JsonValue {
    fn from(v: serde_json::Value) -> Self {
        match v {
            serde_json::Value::Null => JsonValue::Null,
            serde_json::Value::Bool(b) => JsonValue::Bool(b),
            serde_json::Value::Number(n) => JsonValue::Number(Number::from_lexeme(n.to_string())),
            serde_json::Value::String(s) => JsonValue::String(s),
            serde_json::Value::Array(items) => {
                JsonValue::Array(items.into_iter().map(JsonValue::from).collect())
            }
            serde_json::Value::Object(map) => {
                JsonValue::Object(map.into_iter().map(|(k, v)| (k, JsonValue::from(v))).collect())
            }
        }
    }
}

impl From<&str> for JsonValue {
    fn from(s: &str) -> Self {
        JsonValue::String(s.to_string())
    }
}

impl From<String> for JsonValue {
    fn from(s: String) -> Self {
        JsonValue::String(s)
    }
}

impl From<bool> for JsonValue {
    fn from(b: bool) -> Self {
        JsonValue::Bool(b)
    }
}

impl From<i64> for JsonValue {
    fn from(n: i64) -> Self {
        JsonValue::Number(Number::from_lexeme(n.to_string()))
    }
}

impl From<f64> for JsonValue {
    /// Non-finite floats have no JSON form and become `null`.
    fn from(x: f64) -> Self {
        if x.is_finite() {
            JsonValue::Number(Number::from_lexeme(format!("{x:?}")))
        } else {
            JsonValue::Null
        }
    }
}

impl FromStr for JsonValue {
    type Err = serde_json::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_str::<serde_json::Value>(s).map(JsonValue::from)
    }
}

impl Serialize for JsonValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            JsonValue::Null => serializer.serialize_unit(),
            JsonValue::Bool(b) => serializer.serialize_bool(*b),
            JsonValue::Number(n) => n.serialize(serializer),
            JsonValue::String(s) => serializer.serialize_str(s),
            JsonValue::Array(items) => {
                let mut seq = serializer.serialize_seq(Some(items.len()))?;
                for item in items {
                    seq.serialize_element(item)?;
                }
                seq.end()
            }
            JsonValue::Object(map) => {
                let mut out = serializer.serialize_map(Some(map.len()))?;
                for (k, v) in map {
                    out.serialize_entry(k, v)?;
                }
                out.end()
            }
        }
    }
}

impl fmt::Display for JsonValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json_string())
    }
}

/// A JSON number: the original lexeme plus its canonical decimal value.
#[derive(Debug, Clone)]
pub struct Number {
    lexeme: String,
    canon: Canon,
}

/// `(-1)^negative * digits * 10^exponent` with `digits` free of leading and
/// trailing zeros. Zero has a single representation regardless of sign.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Canon {
    Zero,
    Finite { negative: bool, digits: String, exponent: i64 },
    // exponent outside i64; compared by lexeme
    Raw(String),
}

impl Number {
    pub fn from_lexeme(lexeme: impl Into<String>) -> Self {
        let lexeme = lexeme.into();
        let canon = canonicalize(&lexeme);
        Number { lexeme, canon }
    }

    pub fn as_str(&self) -> &str {
        &self.lexeme
    }

    pub fn as_f64(&self) -> Option<f64> {
        self.lexeme.parse().ok()
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.canon == other.canon
    }
}

impl Eq for Number {}

impl std::hash::Hash for Number {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.canon.hash(state);
    }
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match serde_json::Number::from_str(&self.lexeme) {
            Ok(n) => n.serialize(serializer),
            Err(_) => serializer.serialize_unit(),
        }
    }
}

fn canonicalize(lexeme: &str) -> Canon {
    let raw = || Canon::Raw(lexeme.to_string());
    let (negative, rest) = match lexeme.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, lexeme),
    };
    let (mantissa, exp_part) = match rest.find(['e', 'E']) {
        Some(i) => (&rest[..i], Some(&rest[i + 1..])),
        None => (rest, None),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return raw();
    }
    let exp: i64 = match exp_part {
        Some(e) => match e.strip_prefix('+').unwrap_or(e).parse() {
            Ok(e) => e,
            Err(_) => return raw(),
        },
        None => 0,
    };

    let mut digits: String = int_part.chars().chain(frac_part.chars()).collect();
    let Some(mut exponent) = exp.checked_sub(frac_part.len() as i64) else {
        return raw();
    };
    let first_nonzero = digits.find(|c| c != '0');
    let Some(start) = first_nonzero else {
        return Canon::Zero;
    };
    digits.drain(..start);
    let trimmed = digits.trim_end_matches('0').len();
    let Some(e) = exponent.checked_add((digits.len() - trimmed) as i64) else {
        return raw();
    };
    exponent = e;
    digits.truncate(trimmed);
    Canon::Finite { negative, digits, exponent }
}
