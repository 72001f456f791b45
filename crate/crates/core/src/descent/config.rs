use alloc::vec::Vec;

use crate::quadrature::QuadratureConfig;

/// Which descent method to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Plain gradient descent.
    GradientDescent,
    /// Strongly convex schedule for separable objectives.
    FracScSeparable,
    /// Strongly convex schedule for general objectives.
    FracScGeneral,
    /// Convex schedule with constant λ for separable objectives.
    FracCvxSeparable,
    /// Convex schedule driven by the s-sequence.
    FracCvxGeneral,
    /// Hölder-smooth non-convex schedule using the power operator.
    FracNonconvex,
    /// Terminal at a past iterate, `c_t = x_{t-m}`.
    AtCfgd,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::GradientDescent,
        Method::FracScSeparable,
        Method::FracScGeneral,
        Method::FracCvxSeparable,
        Method::FracCvxGeneral,
        Method::FracNonconvex,
        Method::AtCfgd,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::GradientDescent => "gd",
            Method::FracScSeparable => "frac-sc-separable",
            Method::FracScGeneral => "frac-sc-general",
            Method::FracCvxSeparable => "frac-cvx-separable",
            Method::FracCvxGeneral => "frac-cvx-general",
            Method::FracNonconvex => "frac-nonconvex",
            Method::AtCfgd => "at-cfgd",
        }
    }

    pub fn from_name(name: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == name)
    }

    /// Whether the terminal is placed through a λ schedule.
    pub fn uses_lambda(&self) -> bool {
        !matches!(self, Method::GradientDescent | Method::AtCfgd)
    }
}

/// How `λ_t` evolves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaSchedule {
    Constant(f64),
    /// `λ_t = λ0 / (t+1)^q`.
    PowerDecay {
        lambda0: f64,
        q: f64,
    },
    /// `λ_t` solves `1 - λK1 = s_t|λ|K2` with `s_t` from the s-sequence.
    SDriven,
}

impl LambdaSchedule {
    /// `λ_t` for the explicit schedules; `None` for [`LambdaSchedule::SDriven`].
    pub fn at(&self, t: usize) -> Option<f64> {
        match *self {
            LambdaSchedule::Constant(l) => Some(l),
            LambdaSchedule::PowerDecay { lambda0, q } => {
                Some(lambda0 / libm::pow(t as f64 + 1.0, q))
            }
            LambdaSchedule::SDriven => None,
        }
    }
}

/// Which solution of `1 - λK1 = s|λ|K2` the s-driven schedule takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaBranch {
    Positive,
    Negative,
    /// Negative when `β < 0`, positive otherwise.
    Auto,
}

/// How `η_t` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// The method's own schedule; enables the convergence guarantee.
    Theoretical,
    Fixed(f64),
    /// Exact line search along the direction on a quadratic objective.
    OptimalQuadratic,
}

/// Method and hyperparameters of one descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentConfig {
    pub method: Method,
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
    pub epsilon: f64,
    pub lambda: LambdaSchedule,
    pub branch: LambdaBranch,
    /// First element of the s-sequence, above `√5 + 2`.
    pub s0: f64,
    /// Memory `m` of the past-iterate terminal.
    pub memory: usize,
    /// Iterates before `x_0`, most recent first: `x_{-1}, x_{-2}, ...`.
    pub history: Vec<Vec<f64>>,
    pub step: StepRule,
    /// Fraction of `η_max` used by the non-convex method.
    pub eta_fraction: f64,
    pub horizon: usize,
    pub quad: QuadratureConfig,
}

impl DescentConfig {
    /// Defaults: `α = 0.5`, `β = 0`, `φ = 1`, `ε = 1e-3`, `λ ≡ 0`, `s0 = 10`,
    /// `m = 1`, theoretical steps, `η = η_max/2` for the non-convex method.
    pub fn new(method: Method, horizon: usize) -> Self {
        Self {
            method,
            alpha: 0.5,
            beta: 0.0,
            phi: 1.0,
            epsilon: 1e-3,
            lambda: LambdaSchedule::Constant(0.0),
            branch: LambdaBranch::Auto,
            s0: 10.0,
            memory: 1,
            history: Vec::new(),
            step: StepRule::Theoretical,
            eta_fraction: 0.5,
            horizon,
            quad: QuadratureConfig::default(),
        }
    }

    pub fn with_alpha_beta(mut self, alpha: f64, beta: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn with_lambda(mut self, lambda: LambdaSchedule) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_step(mut self, step: StepRule) -> Self {
        self.step = step;
        self
    }
}
