//! Small helpers for the JSON report format.

use serde_json::{json, Value};

/// Extended reals: `+inf` becomes the string `"inf"`.
pub fn ext(v: f64) -> Value {
    if v.is_nan() {
        json!("nan")
    } else if v == f64::INFINITY {
        json!("inf")
    } else if v == f64::NEG_INFINITY {
        json!("-inf")
    } else {
        json!(v)
    }
}

pub fn ext_vec(v: &[f64]) -> Value {
    Value::Array(v.iter().copied().map(ext).collect())
}

pub fn serialize_ext<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&ext(*v), s)
}

pub fn to_pretty(v: &Value) -> String {
    // Maps are BTreeMap-backed, so output order is deterministic.
    serde_json::to_string_pretty(v).expect("serializing a Value cannot fail")
}
