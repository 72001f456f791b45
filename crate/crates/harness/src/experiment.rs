//! Runs every method of an experiment and summarizes the traces.

use fracgd::descent::{run_descent, DescentConfig, IterateTrace};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// Absolute slack when checking a trace's guarantee.
pub const BOUND_SLACK: f64 = 1e-9;
/// Slack on the recorded sandwich margins.
pub const SANDWICH_SLACK: f64 = 1e-6;

/// Per-method outcome, computed from the trace alone.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub label: String,
    pub method: String,
    /// First `t` at which the convergence threshold holds.
    pub iterations: Option<usize>,
    /// `f - f*` at the end, or `‖∇f‖₂` when judged by the gradient.
    pub final_error: f64,
    /// Geometric mean of `‖x_{t+1}-x*‖² / ‖x_t-x*‖²` up to convergence.
    pub mean_contraction: Option<f64>,
    /// Inequalities checked by the trace's guarantee.
    pub bound_checks: usize,
    pub bound_margin: Option<f64>,
    pub sandwich_margin: Option<f64>,
    pub bound_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodRun {
    pub label: String,
    pub trace: IterateTrace,
    pub summary: RunSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub name: String,
    pub runs: Vec<MethodRun>,
}

impl ExperimentOutcome {
    pub fn all_bounds_hold(&self) -> bool {
        self.runs.iter().all(|r| r.summary.bound_ok)
    }

    pub fn run(&self, label: &str) -> Option<&MethodRun> {
        self.runs.iter().find(|r| r.label == label)
    }
}

/// Convergence threshold and whether it applies to the gradient norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub tol: f64,
    pub on_gradient: bool,
}

impl Threshold {
    pub fn for_config(cfg: &ExperimentConfig, override_tol: Option<f64>) -> Self {
        let on_gradient = cfg.uses_grad_threshold();
        let default = if on_gradient { cfg.grad_tol } else { cfg.tol };
        Self {
            tol: override_tol.unwrap_or(default),
            on_gradient,
        }
    }
}

pub fn summarize(
    label: &str,
    method: &str,
    trace: &IterateTrace,
    threshold: Threshold,
) -> RunSummary {
    let iterations = if threshold.on_gradient {
        trace.first_below_grad(threshold.tol)
    } else {
        trace.first_below_gap(threshold.tol)
    };
    let last = trace.last();
    let final_error = match (threshold.on_gradient, trace.optimal_value, last) {
        (false, Some(fstar), Some(r)) => r.f - fstar,
        (_, _, Some(r)) => r.grad_norm,
        (_, _, None) => f64::NAN,
    };
    let upto = iterations.unwrap_or(trace.horizon());
    let mean_contraction = match (trace.records.first(), trace.records.get(upto)) {
        (Some(a), Some(b)) if upto > 0 => match (a.dist_sq, b.dist_sq) {
            (Some(d0), Some(dk)) if d0 > 0.0 => Some((dk / d0).powf(1.0 / upto as f64)),
            _ => None,
        },
        _ => None,
    };
    let check = trace.check(BOUND_SLACK);
    let sandwich_margin = trace.worst_sandwich();
    let bound_ok =
        (check.checks == 0 || check.holds) && sandwich_margin.is_none_or(|m| m >= -SANDWICH_SLACK);
    RunSummary {
        label: label.to_string(),
        method: method.to_string(),
        iterations,
        final_error,
        mean_contraction,
        bound_checks: check.checks,
        bound_margin: (check.checks > 0).then_some(check.worst_margin),
        sandwich_margin,
        bound_ok,
    }
}

/// Runs all methods concurrently. The first failing method, in config
/// order, determines the error.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    override_tol: Option<f64>,
) -> Result<ExperimentOutcome> {
    let problem = cfg.build_problem()?;
    let threshold = Threshold::for_config(cfg, override_tol);
    let configs: Vec<(String, DescentConfig)> = cfg
        .methods
        .iter()
        .map(|m| Ok((m.label.clone(), m.to_descent(cfg.horizon)?)))
        .collect::<Result<_>>()?;
    let x0 = &cfg.problem.x0;
    let problem = &*problem;
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|(_, dc)| scope.spawn(move || run_descent(problem, dc, x0)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
            .collect()
    });
    let mut runs = Vec::with_capacity(results.len());
    for ((label, dc), result) in configs.iter().zip(results) {
        let trace = result.map_err(|e| HarnessError::from_core(label, e))?;
        let summary = summarize(label, dc.method.name(), &trace, threshold);
        runs.push(MethodRun {
            label: label.clone(),
            trace,
            summary,
        });
    }
    Ok(ExperimentOutcome {
        name: cfg.name.clone(),
        runs,
    })
}
