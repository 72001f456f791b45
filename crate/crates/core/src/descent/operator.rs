use alloc::vec;

use crate::caputo::CaputoEvaluator;
use crate::error::{check_range, Error, Result};
use crate::oracle::{coordinate_oracle, Objective, ScalarOracle};
use crate::quadrature::QuadratureConfig;
use crate::special::gamma_fn;

/// The operator
///
/// ```text
/// Cd_c^{α,β} f(x) = Γ(2-α)|x-c|^α/(x-c) · (CD_c^α f(x) + β|x-c| CD_c^{1+α} f(x))
/// ```
///
/// with the two Caputo rules prepared once. At `c = x` it continues to `f'(x)`.
#[derive(Debug, Clone)]
pub struct FracOperator {
    alpha: f64,
    beta: f64,
    first: CaputoEvaluator,
    second: Option<CaputoEvaluator>,
    norm: f64,
}

impl FracOperator {
    pub fn new(alpha: f64, beta: f64, quad: QuadratureConfig) -> Result<Self> {
        check_range(
            "alpha",
            alpha,
            alpha > 0.0 && alpha <= 1.0,
            "an order in (0, 1]",
        )?;
        check_range("beta", beta, beta.is_finite(), "a finite beta")?;
        let second = if beta != 0.0 {
            Some(CaputoEvaluator::new(1.0 + alpha, quad)?)
        } else {
            None
        };
        Ok(Self {
            alpha,
            beta,
            first: CaputoEvaluator::new(alpha, quad)?,
            second,
            norm: gamma_fn(2.0 - alpha)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn apply_1d<O: ScalarOracle + ?Sized>(&self, oracle: &O, c: f64, x: f64) -> Result<f64> {
        if c == x {
            oracle.domain().require(x)?;
            return Ok(oracle.deriv1(x));
        }
        let delta = x - c;
        let scale = self.norm * libm::pow(delta.abs(), self.alpha) / delta;
        let mut out = self.first.eval(oracle, c, x)? * scale;
        if let Some(second) = &self.second {
            out += self.beta * delta.abs() * second.eval(oracle, c, x)? * scale;
        }
        Ok(out)
    }

    /// Coordinate-wise application to the slices `f_{j,x}`.
    pub fn apply<P: Objective + ?Sized>(
        &self,
        problem: &P,
        c: &[f64],
        x: &[f64],
        out: &mut [f64],
    ) -> Result<()> {
        check_dims(problem.dim(), c, x, out)?;
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.apply_1d(&coordinate_oracle(problem, j, x), c[j], x[j])?;
        }
        Ok(())
    }
}

/// The Hölder variant `CD_c^α f(x) Γ(2-α) |x-c|^(α-p+1)/(x-c)`.
///
/// At `c = x` it continues to `f'(x)` when `p = 1` and to 0 when `p < 1`.
#[derive(Debug, Clone)]
pub struct PowerOperator {
    alpha: f64,
    p: f64,
    first: CaputoEvaluator,
    norm: f64,
}

impl PowerOperator {
    pub fn new(alpha: f64, p: f64, quad: QuadratureConfig) -> Result<Self> {
        check_range(
            "alpha",
            alpha,
            alpha > 0.0 && alpha <= 1.0,
            "an order in (0, 1]",
        )?;
        check_range("p", p, p > 0.0 && p.is_finite(), "a finite p > 0")?;
        Ok(Self {
            alpha,
            p,
            first: CaputoEvaluator::new(alpha, quad)?,
            norm: gamma_fn(2.0 - alpha)?,
        })
    }

    pub fn apply_1d<O: ScalarOracle + ?Sized>(&self, oracle: &O, c: f64, x: f64) -> Result<f64> {
        if c == x {
            oracle.domain().require(x)?;
            let g = oracle.deriv1(x);
            return if self.p == 1.0 {
                Ok(g)
            } else if self.p < 1.0 || g == 0.0 {
                Ok(0.0)
            } else {
                Err(Error::TerminalAtPoint)
            };
        }
        let delta = x - c;
        let scale = self.norm * libm::pow(delta.abs(), self.alpha - self.p + 1.0) / delta;
        Ok(self.first.eval(oracle, c, x)? * scale)
    }

    pub fn apply<P: Objective + ?Sized>(
        &self,
        problem: &P,
        c: &[f64],
        x: &[f64],
        out: &mut [f64],
    ) -> Result<()> {
        check_dims(problem.dim(), c, x, out)?;
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.apply_1d(&coordinate_oracle(problem, j, x), c[j], x[j])?;
        }
        Ok(())
    }
}

fn check_dims(dim: usize, c: &[f64], x: &[f64], out: &[f64]) -> Result<()> {
    for found in [c.len(), x.len(), out.len()] {
        if found != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found,
            });
        }
    }
    Ok(())
}

/// One-shot `Cd_c^{α,β} f(x)` for a scalar oracle.
pub fn frac_grad_operator_1d<O: ScalarOracle + ?Sized>(
    oracle: &O,
    alpha: f64,
    beta: f64,
    c: f64,
    x: f64,
    quad: QuadratureConfig,
) -> Result<f64> {
    FracOperator::new(alpha, beta, quad)?.apply_1d(oracle, c, x)
}

/// One-shot coordinate-wise `Cd_c^{α,β} f(x)`.
pub fn frac_grad_operator<P: Objective + ?Sized>(
    problem: &P,
    alpha: f64,
    beta: f64,
    c: &[f64],
    x: &[f64],
    quad: QuadratureConfig,
) -> Result<alloc::vec::Vec<f64>> {
    let mut out = vec![0.0; problem.dim()];
    FracOperator::new(alpha, beta, quad)?.apply(problem, c, x, &mut out)?;
    Ok(out)
}

/// One-shot coordinate-wise Hölder variant.
pub fn frac_grad_operator_p<P: Objective + ?Sized>(
    problem: &P,
    alpha: f64,
    p: f64,
    c: &[f64],
    x: &[f64],
    quad: QuadratureConfig,
) -> Result<alloc::vec::Vec<f64>> {
    let mut out = vec![0.0; problem.dim()];
    PowerOperator::new(alpha, p, quad)?.apply(problem, c, x, &mut out)?;
    Ok(out)
}
