//! Δ sweeps of the fractional operator on a quadratic.
//!
//! A report spec is a TOML document:
//!
//! ```toml
//! name = "diag-20-2"
//! convention = "half"       # or "plain"
//! diag = [20.0, 2.0]        # or matrix = [[..], [..]]
//! b = [0.0, 0.0]            # optional
//! alpha = 0.5
//! beta = -0.4
//! deltas = [0.0, 0.25, 0.5]
//! x0 = [1.0, 1.0]
//! horizon = 5000
//! tol = 1e-8                # optional gap threshold
//! ```

use std::io::Write;
use std::path::Path;

use fracgd::quadratic::{condition_compare, run_quadratic_frac, QuadraticForm};
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::config::{ConventionSpec, DEFAULT_GAP_TOL};
use crate::error::{HarnessError, Result};
use crate::output::{fmt_f64, fmt_opt};

pub const REPORT_COLUMNS: [&str; 7] = [
    "delta",
    "kappa_a",
    "kappa_a_prime",
    "frac_faster",
    "predicted_rate",
    "iterations",
    "status",
];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSpec {
    pub name: String,
    #[serde(default)]
    pub convention: ConventionSpec,
    pub diag: Option<Vec<f64>>,
    pub matrix: Option<Vec<Vec<f64>>>,
    pub b: Option<Vec<f64>>,
    pub alpha: f64,
    pub beta: f64,
    pub deltas: Vec<f64>,
    pub x0: Vec<f64>,
    pub horizon: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_GAP_TOL
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

const DIAG_20_2: &str = r#"
name = "diag-20-2"
convention = "half"
diag = [20.0, 2.0]
alpha = 0.5
beta = -0.4
deltas = [0.0, 0.25, 0.5]
x0 = [1.0, 1.0]
horizon = 5000
"#;

const FIG4: &str = r#"
name = "fig4"
convention = "plain"
diag = [10.0, 1.0, 7.0, 9.0, 4.0]
alpha = 0.5
beta = -0.4
deltas = [0.0, 0.25, 0.5, 0.99, 1.5]
x0 = [1.0, -10.0, 5.0, 8.0, -6.0]
horizon = 5000
"#;

pub const REPORT_BUILTINS: [&str; 2] = ["diag-20-2", "fig4"];

impl ReportSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ReportSpec = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        if spec.deltas.is_empty() {
            return Err(config_err("deltas must be non-empty"));
        }
        if spec.horizon == 0 || spec.tol.is_nan() || spec.tol <= 0.0 {
            return Err(config_err("horizon and tol must be positive"));
        }
        if spec.name.is_empty()
            || !spec
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(config_err(
                "name must be non-empty and use only [A-Za-z0-9_-]",
            ));
        }
        spec.quadratic()?;
        Ok(spec)
    }

    /// A builtin name (`diag-20-2`, `fig4`) or a path to a TOML file.
    pub fn resolve(spec: &str) -> Result<Self> {
        match spec {
            "diag-20-2" => Self::from_toml(DIAG_20_2),
            "fig4" => Self::from_toml(FIG4),
            path => {
                let text = std::fs::read_to_string(Path::new(path))
                    .map_err(|e| config_err(format!("cannot read {path}: {e}")))?;
                Self::from_toml(&text)
            }
        }
    }

    pub fn quadratic(&self) -> Result<QuadraticForm> {
        let a = match (&self.diag, &self.matrix) {
            (Some(d), None) => DMatrix::from_diagonal(&DVector::from_column_slice(d)),
            (None, Some(rows)) => {
                if rows.iter().any(|r| r.len() != rows.len()) {
                    return Err(config_err("matrix must be square"));
                }
                DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
            }
            _ => return Err(config_err("exactly one of diag or matrix is required")),
        };
        let k = a.nrows();
        if self.x0.len() != k {
            return Err(config_err(format!(
                "x0 has {} entries, A is {k}x{k}",
                self.x0.len()
            )));
        }
        let b = match &self.b {
            Some(b) if b.len() != k => return Err(config_err("b and A differ in size")),
            Some(b) => DVector::from_column_slice(b),
            None => DVector::zeros(k),
        };
        QuadraticForm::new(a, b, 0.0, self.convention.into())
            .map_err(|e| config_err(format!("A: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub delta: f64,
    pub kappa_a: f64,
    pub kappa_a_prime: Option<f64>,
    pub frac_faster: Option<bool>,
    pub predicted_rate: Option<f64>,
    pub iterations: Option<usize>,
    /// `ok`, or `infeasible: <condition>`.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticReport {
    pub name: String,
    pub rows: Vec<ReportRow>,
}

impl QuadraticReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(REPORT_COLUMNS)?;
        for r in &self.rows {
            w.write_record([
                fmt_f64(r.delta),
                fmt_f64(r.kappa_a),
                fmt_opt(r.kappa_a_prime),
                r.frac_faster.map(|b| b.to_string()).unwrap_or_default(),
                fmt_opt(r.predicted_rate),
                r.iterations.map(|i| i.to_string()).unwrap_or_default(),
                r.status.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One row per Δ. Settings with some `D_ii <= 0` yield an infeasible row.
pub fn quadratic_report(spec: &ReportSpec, tol_override: Option<f64>) -> Result<QuadraticReport> {
    let q = spec.quadratic()?;
    let tol = tol_override.unwrap_or(spec.tol);
    let mut rows = Vec::with_capacity(spec.deltas.len());
    for &delta in &spec.deltas {
        let kappa_a = q.condition_number();
        let bad = |e: fracgd::Error| config_err(format!("delta {delta}: {e}"));
        match run_quadratic_frac(&q, spec.alpha, spec.beta, delta, &spec.x0, spec.horizon) {
            Ok(run) => {
                let cmp = condition_compare(&q, spec.alpha, spec.beta, delta).map_err(bad)?;
                let op = &run.operator;
                rows.push(ReportRow {
                    delta,
                    kappa_a,
                    kappa_a_prime: Some(cmp.kappa_a_prime),
                    frac_faster: Some(cmp.frac_faster),
                    predicted_rate: Some(1.0 - op.mu_prime / op.l_prime),
                    iterations: run.trace.first_below_gap(tol),
                    status: "ok".into(),
                });
            }
            Err(fracgd::Error::Infeasible { condition }) => rows.push(ReportRow {
                delta,
                kappa_a,
                kappa_a_prime: None,
                frac_faster: None,
                predicted_rate: None,
                iterations: None,
                status: format!("infeasible: {condition}"),
            }),
            Err(e) => return Err(bad(e)),
        }
    }
    Ok(QuadraticReport {
        name: spec.name.clone(),
        rows,
    })
}
