//! Pass/fail verification reports shared by every checking routine.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub params: Value,
    pub pass: bool,
    pub counterexample: Option<String>,
}

impl Report {
    pub fn pass(check: impl Into<String>, params: Value) -> Self {
        Report {
            check: check.into(),
            params,
            pass: true,
            counterexample: None,
        }
    }

    pub fn fail(check: impl Into<String>, params: Value, why: impl Into<String>) -> Self {
        Report {
            check: check.into(),
            params,
            pass: false,
            counterexample: Some(why.into()),
        }
    }

    /// Pass unless `failure` carries a counterexample.
    pub fn from_result(check: impl Into<String>, params: Value, failure: Option<String>) -> Self {
        match failure {
            None => Self::pass(check, params),
            Some(why) => Self::fail(check, params, why),
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn summary_line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        match &self.counterexample {
            None => format!("{status} {} {}", self.check, self.params),
            Some(c) => format!("{status} {} {}: {c}", self.check, self.params),
        }
    }
}

/// Combines several reports into one under a new name, keeping the first
/// failure.
pub fn combine(check: impl Into<String>, params: Value, parts: &[Report]) -> Report {
    match parts.iter().find(|r| !r.pass) {
        None => Report::pass(check, params),
        Some(r) => Report::fail(
            check,
            params,
            format!(
                "{}: {}",
                r.check,
                r.counterexample.as_deref().unwrap_or("failed")
            ),
        ),
    }
}
