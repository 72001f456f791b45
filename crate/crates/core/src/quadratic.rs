//! Fractional descent on quadratics.
//!
//! On `f(x) = ½ xᵀHx + bᵀx + y0` with the terminal at `c = x - λ∇f(x)` and
//! `λ = Δ / ((β-γ) L)`, the operator is exactly `D(Hx + b) = A'x + b'` with
//! `D = I - (Δ/L) diag(H)`. Plain gradient descent is the case `Δ = 0`, and the
//! condition number of `A'` decides which of the two converges faster.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::bounds::{gamma_ratio, SmoothnessProfile};
use crate::descent::{Guarantee, IterateRecord, IterateTrace};
use crate::error::{check_range, Error, Result};
use crate::oracle::{dist_sq, norm2, Objective, Optimum};

/// How the quadratic term is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// `f = ½ xᵀAx + bᵀx + y0`, Hessian `A`.
    Half,
    /// `f = xᵀAx + bᵀx + y0`, Hessian `2A`.
    Plain,
}

/// A strongly convex quadratic. Every derived quantity (`L`, `μ`, `x*`, the
/// operator) is taken from the Hessian, so both conventions agree.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    a: DMatrix<f64>,
    b: DVector<f64>,
    y0: f64,
    convention: Convention,
    hessian: DMatrix<f64>,
    l: f64,
    mu: f64,
    x_star: DVector<f64>,
}

/// Smallest and largest eigenvalue of the symmetric part of `m`.
pub fn quadratic_form_bounds(m: &DMatrix<f64>) -> Result<(f64, f64)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen().eigenvalues;
    let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

impl QuadraticForm {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, y0: f64, convention: Convention) -> Result<Self> {
        let k = a.nrows();
        if a.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: a.ncols(),
            });
        }
        if b.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: b.len(),
            });
        }
        let asym = (&a - a.transpose()).abs().max();
        if asym > 1e-12 * (1.0 + a.abs().max()) {
            return Err(Error::InvalidParameter {
                name: "A",
                value: asym,
                expected: "a symmetric matrix",
            });
        }
        let factor = match convention {
            Convention::Half => 1.0,
            Convention::Plain => 2.0,
        };
        let hessian = &a * factor;
        let (mu, l) = quadratic_form_bounds(&hessian)?;
        if mu.is_nan() || mu <= 0.0 {
            return Err(Error::Singular);
        }
        let chol = hessian.clone().cholesky().ok_or(Error::Singular)?;
        let x_star = -chol.solve(&b);
        Ok(Self {
            a,
            b,
            y0,
            convention,
            hessian,
            l,
            mu,
            x_star,
        })
    }

    /// `diag(entries)` with `b = 0`, `y0 = 0`.
    pub fn diagonal(entries: &[f64], convention: Convention) -> Result<Self> {
        let k = entries.len();
        Self::new(
            DMatrix::from_diagonal(&DVector::from_column_slice(entries)),
            DVector::zeros(k),
            0.0,
            convention,
        )
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }

    /// Largest Hessian eigenvalue.
    pub fn l(&self) -> f64 {
        self.l
    }

    /// Smallest Hessian eigenvalue.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn minimizer(&self) -> &[f64] {
        self.x_star.as_slice()
    }

    pub fn condition_number(&self) -> f64 {
        self.l / self.mu
    }

    fn hx_plus_b(&self, x: &[f64]) -> DVector<f64> {
        &self.hessian * DVector::from_column_slice(x) + &self.b
    }
}

impl Objective for QuadraticForm {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        0.5 * v.dot(&(&self.hessian * &v)) + self.b.dot(&v) + self.y0
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        grad.copy_from_slice(self.hx_plus_b(x).as_slice());
    }

    fn profile(&self) -> SmoothnessProfile {
        SmoothnessProfile::smooth(self.l, self.mu).unwrap_or_else(|_| unreachable!())
    }

    fn optimum(&self) -> Option<Optimum> {
        Some(Optimum {
            point: self.x_star.as_slice().to_vec(),
            value: self.value(self.x_star.as_slice()),
        })
    }

    fn value_along(&self, x: &[f64], j: usize, y: f64) -> f64 {
        // f(x + δ e_j) = f(x) + δ ∂_j f(x) + ½ δ² H_jj
        let delta = y - x[j];
        let hj = self.hessian.row(j);
        let partial: f64 = hj.iter().zip(x).map(|(h, v)| h * v).sum::<f64>() + self.b[j];
        self.value(x) + delta * partial + 0.5 * delta * delta * self.hessian[(j, j)]
    }

    fn partial_along(&self, x: &[f64], j: usize, y: f64) -> f64 {
        let hj = self.hessian.row(j);
        let partial: f64 = hj.iter().zip(x).map(|(h, v)| h * v).sum::<f64>() + self.b[j];
        partial + self.hessian[(j, j)] * (y - x[j])
    }

    fn second_partial_along(&self, _x: &[f64], j: usize, _y: f64) -> Option<f64> {
        Some(self.hessian[(j, j)])
    }

    fn hessian_vec(&self, _x: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        let hv = &self.hessian * DVector::from_column_slice(v);
        out.copy_from_slice(hv.as_slice());
        true
    }
}

/// The affine map `x ↦ A'x + b'` that fractional descent applies on a quadratic.
#[derive(Debug, Clone, PartialEq)]
pub struct FracLinearOperator {
    /// Diagonal of `D = I - (Δ/L) diag(H)`.
    pub d: DVector<f64>,
    pub a_prime: DMatrix<f64>,
    pub b_prime: DVector<f64>,
    pub mu_prime: f64,
    pub l_prime: f64,
    /// The terminal offset `λ = Δ/((β-γ)L)` realizing this operator.
    pub lambda: f64,
    pub delta: f64,
}

impl FracLinearOperator {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.a_prime * DVector::from_column_slice(x) + &self.b_prime;
        v.as_slice().to_vec()
    }

    /// `κ(A') = L'/μ'`, infinite when `μ' <= 0`.
    pub fn condition_number(&self) -> f64 {
        if self.mu_prime > 0.0 {
            self.l_prime / self.mu_prime
        } else {
            f64::INFINITY
        }
    }

    /// Errors unless every `D_ii > 0`.
    pub fn require_positive(&self) -> Result<()> {
        if let Some((i, v)) = self.d.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::Infeasible {
                condition: alloc::format!("D_ii > 0 fails at i = {i}: D_ii = {v}"),
            });
        }
        if self.mu_prime <= 0.0 {
            return Err(Error::Infeasible {
                condition: alloc::format!("mu' > 0 fails: mu' = {}", self.mu_prime),
            });
        }
        Ok(())
    }
}

/// `A' = DH`, `b' = Db` with `D = I - (Δ/L) diag(H)`, for `β <= 0`.
pub fn closed_form_operator(
    q: &QuadraticForm,
    alpha: f64,
    beta: f64,
    delta: f64,
) -> Result<FracLinearOperator> {
    check_range(
        "alpha",
        alpha,
        alpha > 0.0 && alpha < 1.0,
        "an order in (0, 1)",
    )?;
    if beta > 0.0 {
        return Err(Error::Unsupported(
            "the closed form is stated for beta <= 0",
        ));
    }
    check_range("Delta", delta, delta.is_finite(), "a finite Delta")?;
    let gab = beta - gamma_ratio(alpha)?;
    let lambda = delta / (gab * q.l);
    let h = &q.hessian;
    let d = DVector::from_iterator(
        h.nrows(),
        (0..h.nrows()).map(|i| 1.0 - delta / q.l * h[(i, i)]),
    );
    let dm = DMatrix::from_diagonal(&d);
    let a_prime = &dm * h;
    let b_prime = &dm * &q.b;
    let (mu_prime, l_prime) = quadratic_form_bounds(&a_prime)?;
    Ok(FracLinearOperator {
        d,
        a_prime,
        b_prime,
        mu_prime,
        l_prime,
        lambda,
        delta,
    })
}

/// Condition numbers with and without the fractional preconditioning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub kappa_a: f64,
    pub kappa_a_prime: f64,
    pub frac_faster: bool,
}

pub fn condition_compare(
    q: &QuadraticForm,
    alpha: f64,
    beta: f64,
    delta: f64,
) -> Result<ConditionReport> {
    let op = closed_form_operator(q, alpha, beta, delta)?;
    let kappa_a = q.condition_number();
    let kappa_a_prime = op.condition_number();
    Ok(ConditionReport {
        kappa_a,
        kappa_a_prime,
        frac_faster: kappa_a_prime < kappa_a,
    })
}

/// `η* = ⟨Hx + b, d⟩ / ⟨d, Hd⟩`, the exact minimizer of `f(x - ηd)`.
pub fn optimal_eta_quadratic(q: &QuadraticForm, x: &[f64], d: &[f64]) -> Result<f64> {
    if x.len() != q.dim() || d.len() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: x.len().min(d.len()),
        });
    }
    let dv = DVector::from_column_slice(d);
    let curvature = dv.dot(&(&q.hessian * &dv));
    if curvature <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "d",
            value: norm2(d),
            expected: "a nonzero direction",
        });
    }
    Ok(q.hx_plus_b(x).dot(&dv) / curvature)
}

/// A run of `x_{t+1} = x_t - (A'x_t + b')/L'`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticRun {
    pub operator: FracLinearOperator,
    /// Records carry `ρ = 1 - μ'/L'` on every step.
    pub trace: IterateTrace,
}

/// Runs `horizon` steps with `η = 1/L'`. Requires every `D_ii > 0`.
///
/// The contraction factor `1 - μ'/L'` is recorded rather than enforced; use
/// [`IterateTrace::check`] to compare it with the observed distances.
pub fn run_quadratic_frac(
    q: &QuadraticForm,
    alpha: f64,
    beta: f64,
    delta: f64,
    x0: &[f64],
    horizon: usize,
) -> Result<QuadraticRun> {
    if x0.len() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: x0.len(),
        });
    }
    let op = closed_form_operator(q, alpha, beta, delta)?;
    op.require_positive()?;
    let eta = 1.0 / op.l_prime;
    let rho = 1.0 - op.mu_prime / op.l_prime;
    let x_star = q.minimizer();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; q.dim()];
    let mut records = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        q.gradient(&x, &mut g);
        let last = t == horizon;
        records.push(IterateRecord {
            t,
            x: x.clone(),
            f: q.value(&x),
            grad_norm: norm2(&g),
            eta: (!last).then_some(eta),
            lambda: (!last).then_some(op.lambda),
            rho: (!last).then_some(rho),
            dist_sq: Some(dist_sq(&x, x_star)),
            sandwich: None,
        });
        if last {
            break;
        }
        let step = op.apply(&x);
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi -= eta * si;
        }
    }
    Ok(QuadraticRun {
        operator: op,
        trace: IterateTrace {
            records,
            guarantee: Guarantee::Contraction,
            average: None,
            min_grad_power: None,
            optimal_value: q.optimum().map(|o| o.value),
        },
    })
}

/// Circulation `∮ F · dl` of a vector field around a circle of radius `r`
/// centred at `center` in the `(i, j)` coordinate plane, by the trapezoid
/// rule with `samples` points. Gradient fields give zero; a linear field
/// `Mx` gives `π r² (M_ji - M_ij)`.
pub fn loop_circulation<F: FnMut(&[f64], &mut [f64])>(
    mut field: F,
    center: &[f64],
    i: usize,
    j: usize,
    radius: f64,
    samples: usize,
) -> f64 {
    let n = samples.max(3);
    let mut point = center.to_vec();
    let mut value = vec![0.0; center.len()];
    let mut total = 0.0;
    for s in 0..n {
        let theta = 2.0 * core::f64::consts::PI * s as f64 / n as f64;
        let (sin, cos) = libm::sincos(theta);
        point[i] = center[i] + radius * cos;
        point[j] = center[j] + radius * sin;
        field(&point, &mut value);
        // tangent dl/dθ = r(-sin, cos)
        total += radius * (-value[i] * sin + value[j] * cos);
    }
    total * 2.0 * core::f64::consts::PI / n as f64
}
