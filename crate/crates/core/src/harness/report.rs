//! Verification reports: merging, emission and replay of counterexamples.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::algebra::Algebra;
use super::checks::{find, Instance};
use crate::error::Result;

/// One law evaluation whose residual exceeded its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: String,
    pub residual: f64,
    pub instance: Instance,
    /// Set when the evaluation failed outright instead of producing a residual.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub model: String,
    pub dim: usize,
    /// Number of law evaluations; laws that do not apply to a model are not counted.
    pub trials: u64,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub violations: Vec<Violation>,
    pub wall_ms: f64,
    /// Name of the injected fault, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

fn join_names(a: &str, b: &str) -> String {
    if a == b || b.is_empty() {
        a.to_string()
    } else if a.is_empty() {
        b.to_string()
    } else {
        format!("{a}+{b}")
    }
}

impl VerificationReport {
    pub fn empty(suite: &str, model: &str, dim: usize, seed: u64) -> Self {
        VerificationReport {
            suite: suite.into(),
            model: model.into(),
            dim,
            trials: 0,
            seed,
            tolerances: BTreeMap::new(),
            violations: Vec::new(),
            wall_ms: 0.0,
            fault: None,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Sums trials and wall time and concatenates violations.
    ///
    /// Differing suite or model names are joined with `+`; the seed and
    /// tolerances of `self` are kept, and the dimension is the larger one.
    pub fn merge(mut self, other: VerificationReport) -> Self {
        self.suite = join_names(&self.suite, &other.suite);
        self.model = join_names(&self.model, &other.model);
        self.dim = self.dim.max(other.dim);
        self.trials += other.trials;
        self.wall_ms += other.wall_ms;
        self.violations.extend(other.violations);
        for (k, v) in other.tolerances {
            self.tolerances.entry(k).or_insert(v);
        }
        if self.fault.is_none() {
            self.fault = other.fault;
        }
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Summary line followed by one line per violation.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# suite={} model={} dim={} trials={} seed={} violations={} wall_ms={:.1}\n",
            self.suite,
            self.model,
            self.dim,
            self.trials,
            self.seed,
            self.violations.len(),
            self.wall_ms
        );
        for v in &self.violations {
            let inst = serde_json::to_string(&v.instance).unwrap_or_default();
            let _ = write!(out, "{}\t{:.6e}\t{}", v.axiom, v.residual, inst);
            if let Some(note) = &v.note {
                let _ = write!(out, "\t{note}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn emit_report(r: &VerificationReport, path: &Path, format: ReportFormat) -> Result<()> {
    let body = match format {
        ReportFormat::Json => r.to_json()?,
        ReportFormat::Text => r.to_text(),
    };
    std::fs::write(path, body)?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<VerificationReport> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Recomputes the residual of a recorded violation.
pub fn replay(v: &Violation, alg: &Algebra) -> Result<f64> {
    (find(&v.axiom)?.residual)(alg, &v.instance)
}
