//! Machine-readable run reports.
//!
//! A report holds no timestamp, so the same configuration and seed give a
//! byte-identical document.

use serde::{Deserialize, Serialize};

use crate::harness::{ClosedFormCheck, VerdictMatrix};
use crate::indices::IndexResult;
use crate::model::Period;
use crate::reference::FixedPointReport;

pub const TOOL: &str = "dynindex";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub period: Period,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostics: Option<FixedPointReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub engine: String,
    pub base: Period,
    pub reference: String,
    pub points: Vec<SeriesPoint>,
}

impl Series {
    pub fn push(&mut self, period: Period, result: &IndexResult) {
        self.points.push(SeriesPoint {
            period,
            value: result.value,
            diagnostics: result.diagnostics,
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    /// The command and options that produced the report.
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub series: Vec<Series>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<VerdictMatrix>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub closed_forms: Vec<ClosedFormCheck>,
    /// Free-form result of a counterexample search.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<serde_json::Value>,
}

impl Report {
    pub fn new(config: serde_json::Value) -> Self {
        Report {
            tool: TOOL.into(),
            version: VERSION.into(),
            config,
            series: Vec::new(),
            matrix: None,
            closed_forms: Vec::new(),
            counterexample: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
