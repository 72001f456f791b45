//! Experiment configuration files.
//!
//! An experiment is a TOML document with top-level run settings, one
//! `[problem]` table and one or more `[[method]]` tables:
//!
//! ```toml
//! name = "fig1"
//! horizon = 200
//! seed = 0
//!
//! [problem]
//! kind = "quadratic"        # quadratic | rotated | holder | cosine-well
//! convention = "plain"      # plain: xᵀAx + bᵀx, half: ½xᵀAx + bᵀx
//! diag = [10.0, 1.0]        # or matrix = [[..], [..]]
//! x0 = [1.0, -10.0]
//!
//! [[method]]
//! label = "frac"
//! kind = "frac-sc-separable"
//! alpha = 0.5
//! beta = -0.4
//! lambda = -0.0675
//! lambda_decay = 0.2        # λ_t = lambda / (t+1)^lambda_decay
//! step = "optimal"          # theoretical | optimal | fixed (with eta = ...)
//! ```
//!
//! Optional top-level keys: `tol` (gap threshold for "converged", default
//! `1e-8`), `grad_tol` (gradient threshold for non-convex problems, default
//! `1e-6`) and `emit_plots`. Problem keys by kind: `rotated` takes
//! `eigenvalues` and optional `angles` (drawn from `seed` when absent);
//! `holder` takes `dim` and `p`; `cosine-well` takes `dim` and `a`; every kind
//! takes `x0` and, where meaningful, `b`. Method keys: `alpha`, `beta`, `phi`,
//! `epsilon`, `lambda`, `lambda_decay`, `lambda_schedule = "s-driven"`,
//! `branch` (`positive | negative | auto`), `s0`, `memory`, `history`,
//! `eta`, `eta_fraction`, `nodes`.

use std::path::Path;

use fracgd::catalog::{rotated_quadratic, CosineWell, HolderFamily};
use fracgd::descent::{DescentConfig, LambdaBranch, LambdaSchedule, Method, StepRule};
use fracgd::oracle::Objective;
use fracgd::quadratic::{Convention, QuadraticForm};
use fracgd::quadrature::QuadratureConfig;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{HarnessError, Result};

/// Default "converged" threshold on `f - f*`.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;
/// Default "converged" threshold on `‖∇f‖₂` for non-convex problems.
pub const DEFAULT_GRAD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub horizon: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_gap_tol")]
    pub tol: f64,
    #[serde(default = "default_grad_tol")]
    pub grad_tol: f64,
    #[serde(default)]
    pub emit_plots: bool,
    pub problem: ProblemSpec,
    #[serde(rename = "method")]
    pub methods: Vec<MethodSpec>,
}

fn default_gap_tol() -> f64 {
    DEFAULT_GAP_TOL
}

fn default_grad_tol() -> f64 {
    DEFAULT_GRAD_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Quadratic,
    Rotated,
    Holder,
    CosineWell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionSpec {
    #[default]
    Half,
    Plain,
}

impl From<ConventionSpec> for Convention {
    fn from(c: ConventionSpec) -> Self {
        match c {
            ConventionSpec::Half => Convention::Half,
            ConventionSpec::Plain => Convention::Plain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    #[serde(default)]
    pub convention: ConventionSpec,
    pub diag: Option<Vec<f64>>,
    pub matrix: Option<Vec<Vec<f64>>>,
    pub eigenvalues: Option<Vec<f64>>,
    pub angles: Option<Vec<f64>>,
    pub b: Option<Vec<f64>>,
    pub dim: Option<usize>,
    pub p: Option<f64>,
    pub a: Option<f64>,
    pub x0: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepSpec {
    #[default]
    Theoretical,
    Optimal,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaScheduleSpec {
    Explicit,
    SDriven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchSpec {
    Positive,
    Negative,
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub label: String,
    pub kind: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub phi: Option<f64>,
    pub epsilon: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_decay: Option<f64>,
    pub lambda_schedule: Option<LambdaScheduleSpec>,
    #[serde(default)]
    pub branch: BranchSpec,
    pub s0: Option<f64>,
    pub memory: Option<usize>,
    #[serde(default)]
    pub history: Vec<Vec<f64>>,
    #[serde(default)]
    pub step: StepSpec,
    pub eta: Option<f64>,
    pub eta_fraction: Option<f64>,
    pub nodes: Option<usize>,
}

/// An objective ready to hand to the descent loop.
pub type Problem = Box<dyn Objective + Send + Sync>;

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// A named builtin (`fig1`, `fig3`, `fig4`) or a path to a TOML file.
    pub fn resolve(spec: &str) -> Result<Self> {
        match builtin(spec) {
            Some(cfg) => Ok(cfg),
            None => Self::load(Path::new(spec)),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(config_err(format!(
                "name {:?} must be non-empty and use only [A-Za-z0-9_-]",
                self.name
            )));
        }
        if self.horizon == 0 {
            return Err(config_err("horizon must be positive"));
        }
        if [self.tol, self.grad_tol]
            .iter()
            .any(|t| t.is_nan() || *t <= 0.0)
        {
            return Err(config_err("tol and grad_tol must be positive"));
        }
        if self.methods.is_empty() {
            return Err(config_err("at least one [[method]] is required"));
        }
        let mut labels: Vec<&str> = self.methods.iter().map(|m| m.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(config_err("method labels must be unique"));
        }
        for m in &self.methods {
            if m.label.is_empty()
                || !m
                    .label
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                return Err(config_err(format!(
                    "label {:?} must be non-empty and use only [A-Za-z0-9_-]",
                    m.label
                )));
            }
            m.to_descent(self.horizon)?;
        }
        Ok(())
    }

    /// Builds the objective. Random rotation angles are drawn from `seed`.
    pub fn build_problem(&self) -> Result<Problem> {
        let p = &self.problem;
        let dim = p.x0.len();
        if dim == 0 {
            return Err(config_err("x0 must be non-empty"));
        }
        let b = match &p.b {
            Some(b) if b.len() != dim => {
                return Err(config_err(format!(
                    "b has {} entries, x0 has {dim}",
                    b.len()
                )))
            }
            Some(b) => b.clone(),
            None => vec![0.0; dim],
        };
        let core = |e: fracgd::Error| config_err(format!("problem: {e}"));
        let problem: Problem = match p.kind {
            ProblemKind::Quadratic => {
                let a = match (&p.diag, &p.matrix) {
                    (Some(d), None) => DMatrix::from_diagonal(&DVector::from_column_slice(d)),
                    (None, Some(rows)) => {
                        if rows.iter().any(|r| r.len() != rows.len()) {
                            return Err(config_err("matrix must be square"));
                        }
                        DMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
                    }
                    _ => return Err(config_err("quadratic needs exactly one of diag or matrix")),
                };
                if a.nrows() != dim {
                    return Err(config_err(format!(
                        "A is {0}x{0}, x0 has {dim} entries",
                        a.nrows()
                    )));
                }
                Box::new(
                    QuadraticForm::new(a, DVector::from_vec(b), 0.0, p.convention.into())
                        .map_err(core)?,
                )
            }
            ProblemKind::Rotated => {
                let eigs = p
                    .eigenvalues
                    .as_ref()
                    .ok_or_else(|| config_err("rotated needs eigenvalues"))?;
                if eigs.len() != dim {
                    return Err(config_err("eigenvalues and x0 differ in length"));
                }
                let angles = match &p.angles {
                    Some(a) => a.clone(),
                    None => {
                        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                        (0..2 * dim)
                            .map(|_| rng.random_range(0.0..std::f64::consts::PI))
                            .collect()
                    }
                };
                Box::new(rotated_quadratic(eigs, &angles, &b).map_err(core)?)
            }
            ProblemKind::Holder => {
                let n = p.dim.unwrap_or(dim);
                let power = p.p.ok_or_else(|| config_err("holder needs p"))?;
                if n != dim {
                    return Err(config_err("dim and x0 differ in length"));
                }
                Box::new(HolderFamily::new(n, power).map_err(core)?)
            }
            ProblemKind::CosineWell => {
                let n = p.dim.unwrap_or(dim);
                let a = p.a.ok_or_else(|| config_err("cosine-well needs a"))?;
                if n != dim {
                    return Err(config_err("dim and x0 differ in length"));
                }
                Box::new(CosineWell::new(n, a).map_err(core)?)
            }
        };
        Ok(problem)
    }

    /// Whether convergence is judged by the gradient rather than the gap.
    pub fn uses_grad_threshold(&self) -> bool {
        matches!(
            self.problem.kind,
            ProblemKind::Holder | ProblemKind::CosineWell
        )
    }
}

impl MethodSpec {
    pub fn method(&self) -> Result<Method> {
        Method::from_name(&self.kind).ok_or_else(|| {
            let known: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
            config_err(format!(
                "{}: unknown method kind {:?} (expected one of {})",
                self.label,
                self.kind,
                known.join(", ")
            ))
        })
    }

    pub fn to_descent(&self, horizon: usize) -> Result<DescentConfig> {
        let method = self.method()?;
        let mut cfg = DescentConfig::new(method, horizon);
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(b) = self.beta {
            cfg.beta = b;
        }
        if let Some(p) = self.phi {
            cfg.phi = p;
        }
        if let Some(e) = self.epsilon {
            cfg.epsilon = e;
        }
        if let Some(s) = self.s0 {
            cfg.s0 = s;
        }
        if let Some(m) = self.memory {
            cfg.memory = m;
        }
        if let Some(f) = self.eta_fraction {
            cfg.eta_fraction = f;
        }
        if let Some(n) = self.nodes {
            cfg.quad =
                QuadratureConfig::new(n).map_err(|e| config_err(format!("{}: {e}", self.label)))?;
        }
        cfg.history = self.history.clone();
        cfg.branch = match self.branch {
            BranchSpec::Positive => LambdaBranch::Positive,
            BranchSpec::Negative => LambdaBranch::Negative,
            BranchSpec::Auto => LambdaBranch::Auto,
        };
        cfg.lambda = match (self.lambda_schedule, self.lambda, self.lambda_decay) {
            (Some(LambdaScheduleSpec::SDriven), None, None) => LambdaSchedule::SDriven,
            (Some(LambdaScheduleSpec::SDriven), _, _) => {
                return Err(config_err(format!(
                    "{}: s-driven schedule takes no lambda or lambda_decay",
                    self.label
                )))
            }
            (_, l, None) => LambdaSchedule::Constant(l.unwrap_or(0.0)),
            (_, l, Some(q)) => LambdaSchedule::PowerDecay {
                lambda0: l.unwrap_or(0.0),
                q,
            },
        };
        cfg.step = match (self.step, self.eta) {
            (StepSpec::Theoretical, None) => StepRule::Theoretical,
            (StepSpec::Optimal, None) => StepRule::OptimalQuadratic,
            (StepSpec::Fixed, Some(eta)) if eta > 0.0 && eta.is_finite() => StepRule::Fixed(eta),
            (StepSpec::Fixed, _) => {
                return Err(config_err(format!(
                    "{}: fixed step needs eta > 0",
                    self.label
                )))
            }
            (_, Some(_)) => {
                return Err(config_err(format!(
                    "{}: eta is only used with step = \"fixed\"",
                    self.label
                )))
            }
        };
        Ok(cfg)
    }
}

const FIG1: &str = r#"
name = "fig1"
horizon = 200

[problem]
kind = "quadratic"
convention = "plain"
diag = [10.0, 1.0]
x0 = [1.0, -10.0]

[[method]]
label = "gd-optimal"
kind = "gd"
step = "optimal"

[[method]]
label = "at-cfgd"
kind = "at-cfgd"
alpha = 0.5
beta = -0.4
memory = 1
history = [[1.5, -10.5]]
step = "optimal"

[[method]]
label = "frac-sc-separable"
kind = "frac-sc-separable"
alpha = 0.5
beta = -0.4
lambda = -0.0675
lambda_decay = 0.2
step = "optimal"

[[method]]
label = "frac-sc-separable-theory"
kind = "frac-sc-separable"
alpha = 0.5
beta = -0.4
lambda = -0.0675
lambda_decay = 0.2
step = "theoretical"
"#;

const FIG3: &str = r#"
name = "fig3"
horizon = 300

[problem]
kind = "quadratic"
convention = "plain"
diag = [10.0, 1.0, 1.0, 1.0, 1.0]
x0 = [1.0, -10.0, 5.0, 8.0, -6.0]

[[method]]
label = "gd-optimal"
kind = "gd"
step = "optimal"

[[method]]
label = "frac-sc-separable"
kind = "frac-sc-separable"
alpha = 0.5
beta = -0.4
lambda = -0.0675
step = "optimal"

[[method]]
label = "frac-sc-separable-theory"
kind = "frac-sc-separable"
alpha = 0.5
beta = -0.4
lambda = -0.0675
step = "theoretical"
"#;

/// The builtin experiments `fig1`, `fig3` and `fig4`.
pub fn builtin(name: &str) -> Option<ExperimentConfig> {
    let text = match name {
        "fig1" => FIG1.to_string(),
        "fig3" => FIG3.to_string(),
        "fig4" => FIG3
            .replace("name = \"fig3\"", "name = \"fig4\"")
            .replace("[10.0, 1.0, 1.0, 1.0, 1.0]", "[10.0, 1.0, 7.0, 9.0, 4.0]"),
        _ => return None,
    };
    Some(ExperimentConfig::from_toml(&text).unwrap_or_else(|e| panic!("builtin {name}: {e}")))
}

pub const BUILTINS: [&str; 3] = ["fig1", "fig3", "fig4"];
