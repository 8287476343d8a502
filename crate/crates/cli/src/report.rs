//! Report documents. Keys keep insertion order.

use ainfty_core::exactla::Matrix;
use ainfty_core::graded::{Element, GradedSpace};
use serde_json::{json, Map, Value};

/// Named pass/fail assertions plus structured results.
#[derive(Default)]
pub struct Report {
    assertions: Vec<(String, bool)>,
    results: Map<String, Value>,
}

impl Report {
    pub fn assert(&mut self, name: &str, pass: bool) {
        self.assertions.push((name.to_string(), pass));
    }

    pub fn result(&mut self, key: &str, v: Value) {
        self.results.insert(key.to_string(), v);
    }

    pub fn pass(&self) -> bool {
        self.assertions.iter().all(|(_, p)| *p)
    }

    pub fn into_json(self, command: Value) -> Value {
        let pass = self.pass();
        let assertions: Vec<Value> = self.assertions.into_iter().map(|(n, p)| json!({"name": n, "pass": p})).collect();
        json!({"command": command, "pass": pass, "assertions": assertions, "results": self.results})
    }
}

/// A run that stopped before producing results.
#[derive(Debug)]
pub enum Failure {
    /// Malformed input; exit code 2.
    Input(String),
    /// A mathematical check failed; exit code 1.
    Check(String),
}

impl Failure {
    pub fn into_json(self, command: Value) -> Value {
        let (kind, msg) = match self {
            Failure::Input(m) => ("input", m),
            Failure::Check(m) => ("check", m),
        };
        json!({"command": command, "pass": false, "error": {"kind": kind, "message": msg}})
    }
}

/// `[{basis, coeff}]` in basis order.
pub fn terms(sp: &GradedSpace, e: &Element) -> Value {
    Value::Array(e.iter().map(|(i, c)| json!({"basis": sp.name(*i), "coeff": c.to_coeff_string()})).collect())
}

/// Dense rows of coefficient strings.
pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.to_dense().iter().map(|row| Value::Array(row.iter().map(|c| json!(c.to_coeff_string())).collect())).collect())
}
