//! JSON report records shared by the reporters and verification checks.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Reported,
    Warning,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Reported => "reported",
            Status::Warning => "warning",
        }
    }
}

/// `{inputs, lhs, rhs, ratio, meta}` plus status and error estimates.
///
/// Maps are ordered, so serialization is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub status: Status,
    pub inputs: Map<String, Value>,
    pub lhs: Value,
    pub rhs: Value,
    pub ratio: Value,
    /// Quadrature and truncation error estimates.
    pub errors: Map<String, Value>,
    pub meta: Map<String, Value>,
}

impl Report {
    pub fn new(check: &str) -> Self {
        Self {
            check: check.to_string(),
            status: Status::Reported,
            inputs: Map::new(),
            lhs: Value::Null,
            rhs: Value::Null,
            ratio: Value::Null,
            errors: Map::new(),
            meta: Map::new(),
        }
    }

    pub fn input(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), v.into());
        self
    }

    pub fn error(&mut self, key: &str, v: impl Into<Value>) {
        self.errors.insert(key.to_string(), v.into());
    }

    pub fn meta(&mut self, key: &str, v: impl Into<Value>) {
        self.meta.insert(key.to_string(), v.into());
    }

    pub fn meta_f64(&self, key: &str) -> Option<f64> {
        self.meta.get(key).and_then(Value::as_f64)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Complex number as `{"re": .., "im": ..}`.
pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// Non-finite floats become strings so that they survive JSON.
pub fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(format!("{x}"))
    }
}
