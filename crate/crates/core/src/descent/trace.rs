use alloc::vec::Vec;

/// State at step `t` and the step taken from it.
///
/// `eta`, `lambda` and `rho` describe the move from `x_t` to `x_{t+1}` and
/// are `None` on the final record.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub t: usize,
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub eta: Option<f64>,
    pub lambda: Option<f64>,
    pub rho: Option<f64>,
    /// `‖x_t - x*‖²` when the optimum is known.
    pub dist_sq: Option<f64>,
    /// Worst coordinate of `K2|x-c| - |Cd f - ∇f - K1(x-c)|` at this step.
    pub sandwich: Option<f64>,
}

/// The convergence statement a run is entitled to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Guarantee {
    None,
    /// `‖x_{t+1} - x*‖² <= ρ_t ‖x_t - x*‖²` at every step.
    Contraction,
    /// `f(x̄_T) - f* <= C/T` with `x̄_T` the mean of `x_1..x_T`.
    AverageRate {
        constant: f64,
    },
    /// `min_t ‖∇f(x_t)‖_{1+1/p}^{1+1/p} <= (f(x_0) - f*) / ((T+1) ψ)`.
    StationaryRate {
        psi: f64,
        initial_gap: f64,
        p: f64,
    },
}

/// Outcome of checking a [`Guarantee`] against a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuaranteeCheck {
    pub holds: bool,
    /// Smallest `bound - observed` over the checked inequalities.
    pub worst_margin: f64,
    pub checks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrace {
    pub records: Vec<IterateRecord>,
    pub guarantee: Guarantee,
    /// `x̄_T` and `f(x̄_T)` for the convex methods.
    pub average: Option<(Vec<f64>, f64)>,
    /// `min_t ‖∇f(x_t)‖_{1+1/p}^{1+1/p}` for the non-convex method.
    pub min_grad_power: Option<f64>,
    pub optimal_value: Option<f64>,
}

impl IterateTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterateRecord> {
        self.records.last()
    }

    /// Number of steps taken.
    pub fn horizon(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    /// First `t` with `f(x_t) - f* <= tol`.
    pub fn first_below_gap(&self, tol: f64) -> Option<usize> {
        let fstar = self.optimal_value?;
        self.records
            .iter()
            .find(|r| r.f - fstar <= tol)
            .map(|r| r.t)
    }

    /// First `t` with `‖∇f(x_t)‖₂ <= tol`.
    pub fn first_below_grad(&self, tol: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.grad_norm <= tol)
            .map(|r| r.t)
    }

    /// Smallest sandwich margin over the run.
    pub fn worst_sandwich(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.sandwich)
            .reduce(f64::min)
    }

    /// Checks the trace's guarantee with absolute slack `tol`.
    pub fn check(&self, tol: f64) -> GuaranteeCheck {
        let mut worst = f64::INFINITY;
        let mut checks = 0;
        match self.guarantee {
            Guarantee::None => {}
            Guarantee::Contraction => {
                for pair in self.records.windows(2) {
                    let (Some(rho), Some(d0), Some(d1)) =
                        (pair[0].rho, pair[0].dist_sq, pair[1].dist_sq)
                    else {
                        continue;
                    };
                    worst = worst.min(rho * d0 - d1);
                    checks += 1;
                }
            }
            Guarantee::AverageRate { constant } => {
                if let (Some((_, fbar)), Some(fstar)) = (&self.average, self.optimal_value) {
                    let t = self.horizon().max(1) as f64;
                    worst = constant / t - (fbar - fstar);
                    checks = 1;
                }
            }
            Guarantee::StationaryRate {
                psi, initial_gap, ..
            } => {
                if let Some(m) = self.min_grad_power {
                    let t = self.horizon() as f64;
                    worst = initial_gap / ((t + 1.0) * psi) - m;
                    checks = 1;
                }
            }
        }
        GuaranteeCheck {
            holds: worst >= -tol,
            worst_margin: worst,
            checks,
        }
    }
}
