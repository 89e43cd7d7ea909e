//! Run reports: JSON (always), per-checkpoint CSV (moser only) and a text
//! summary.

use std::fmt::Write as _;
use std::path::Path;

use lcs_core::moser::CheckpointRecord;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// One named check. `value` and `tolerance` are absent for exact checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub criterion: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    /// Passes when `value <= tolerance`.
    pub fn bounded(criterion: &str, value: f64, tolerance: f64) -> Self {
        Self {
            criterion: criterion.into(),
            pass: value <= tolerance,
            value: Some(value),
            tolerance: Some(tolerance),
            detail: None,
        }
    }

    pub fn check(criterion: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            criterion: criterion.into(),
            pass,
            value: None,
            tolerance: None,
            detail: Some(detail.into()),
        }
    }
}

/// Error that stopped a scenario part-way.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn from_error<E: std::fmt::Debug + std::fmt::Display>(e: &E) -> Self {
        Self {
            kind: variant_name(e),
            message: e.to_string(),
        }
    }
}

/// Leading identifier of the `Debug` form, i.e. the enum variant.
fn variant_name<E: std::fmt::Debug>(e: &E) -> String {
    format!("{e:?}")
        .chars()
        .take_while(|c| c.is_alphanumeric() || *c == '_')
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub scenario: String,
    pub config: Value,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    pub passed: bool,
    /// Wall-clock data; the only part of a report that varies between
    /// identical runs.
    pub timings: Timings,
    #[serde(skip)]
    pub checkpoints: Vec<CheckpointRecord>,
}

impl RunReport {
    pub fn new(scenario: &str, config: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            scenario: scenario.into(),
            config,
            results: Value::Null,
            verdicts: Vec::new(),
            failure: None,
            passed: false,
            timings: Timings::default(),
            checkpoints: Vec::new(),
        }
    }

    /// Sets `passed` from the verdicts; a failure or an empty verdict list
    /// never passes.
    pub fn finish(&mut self) {
        self.passed = self.failure.is_none() && !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.pass);
    }

    pub fn verdict(&self, criterion: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.criterion == criterion)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The JSON report without its timing fields.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(m) = &mut v {
            m.remove("timings");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    pub fn write_json(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Writes the per-checkpoint table; `false` if there is none.
    pub fn write_csv(&self, path: &Path) -> CliResult<bool> {
        if self.checkpoints.is_empty() {
            return Ok(false);
        }
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "t",
            "exactness_residual",
            "harmonic_obstruction",
            "conformal_consistency_error",
            "factor_error",
            "eq1_residual",
        ])?;
        for c in &self.checkpoints {
            w.write_record(
                [
                    c.t,
                    c.exactness_residual,
                    c.harmonic_obstruction,
                    c.conformal_consistency_error,
                    c.factor_error,
                    c.eq1_residual,
                ]
                .map(|v| format!("{v:e}")),
            )?;
        }
        w.flush().map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(true)
    }

    /// Human-readable verdict table.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario {}", self.scenario);
        let width = self.verdicts.iter().map(|v| v.criterion.len()).max().unwrap_or(0);
        for v in &self.verdicts {
            let mark = if v.pass { "pass" } else { "FAIL" };
            let _ = write!(s, "  {mark}  {:<width$}", v.criterion);
            match (v.value, v.tolerance) {
                (Some(x), Some(t)) => {
                    let _ = write!(s, "  {x:.3e} <= {t:.0e}");
                }
                (Some(x), None) => {
                    let _ = write!(s, "  {x:.3e}");
                }
                _ => {}
            }
            if let Some(d) = &v.detail {
                let _ = write!(s, "  {d}");
            }
            s.push('\n');
        }
        if let Some(f) = &self.failure {
            let _ = writeln!(s, "  stopped by {}: {}", f.kind, f.message);
        }
        let _ = writeln!(
            s,
            "{} in {:.1} s",
            if self.passed { "PASSED" } else { "FAILED" },
            self.timings.total_seconds
        );
        s
    }
}
