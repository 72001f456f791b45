//! Test functions with analytically known smoothness constants.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use nalgebra::{DMatrix, DVector};

use crate::bounds::SmoothnessProfile;
use crate::error::Result;
use crate::oracle::{Interval, Objective, Optimum, ScalarOracle};
use crate::quadratic::{Convention, QuadraticForm};

/// A polynomial with ascending coefficients, on a chosen domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
    domain: Interval,
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect()
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self {
            coeffs,
            domain: Interval::REAL_LINE,
        }
    }

    pub fn on(mut self, domain: Interval) -> Self {
        self.domain = domain;
        self
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial {
            coeffs: derivative(&self.coeffs),
            domain: self.domain,
        }
    }
}

impl ScalarOracle for Polynomial {
    fn value(&self, t: f64) -> f64 {
        horner(&self.coeffs, t)
    }
    fn deriv1(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (i, c)| acc * t + c * i as f64)
    }
    fn deriv2(&self, t: f64) -> Option<f64> {
        Some(
            self.coeffs
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * t + c * (i * (i - 1)) as f64),
        )
    }
    fn domain(&self) -> Interval {
        self.domain
    }
}

/// `|t|^(1+p) / (1+p)`.
///
/// Its derivative `sgn(t)|t|^p` is `p`-Hölder with constant `2^(1-p)`, which
/// is attained at `t = -s`. For `p < 1` it is not uniformly convex of order
/// `1+p` (`μ = 0`); at `p = 1` it is `t²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderPower {
    p: f64,
}

impl HolderPower {
    pub fn new(p: f64) -> Result<Self> {
        crate::error::check_range("p", p, p > 0.0 && p <= 1.0, "p in (0, 1]")?;
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn profile(&self) -> SmoothnessProfile {
        let (l, mu) = if self.p == 1.0 {
            (1.0, 1.0)
        } else {
            (libm::pow(2.0, 1.0 - self.p), 0.0)
        };
        SmoothnessProfile::new(l, mu, self.p).unwrap_or_else(|_| unreachable!())
    }
}

impl ScalarOracle for HolderPower {
    fn value(&self, t: f64) -> f64 {
        libm::pow(t.abs(), 1.0 + self.p) / (1.0 + self.p)
    }
    fn deriv1(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            t.signum() * libm::pow(t.abs(), self.p)
        }
    }
    fn deriv2(&self, _t: f64) -> Option<f64> {
        (self.p == 1.0).then_some(1.0)
    }
}

/// Scalar test function of the certificate catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFunction {
    Polynomial(Polynomial),
    Holder(HolderPower),
}

impl ScalarOracle for ScalarFunction {
    fn value(&self, t: f64) -> f64 {
        match self {
            ScalarFunction::Polynomial(f) => f.value(t),
            ScalarFunction::Holder(f) => f.value(t),
        }
    }
    fn deriv1(&self, t: f64) -> f64 {
        match self {
            ScalarFunction::Polynomial(f) => f.deriv1(t),
            ScalarFunction::Holder(f) => f.deriv1(t),
        }
    }
    fn deriv2(&self, t: f64) -> Option<f64> {
        match self {
            ScalarFunction::Polynomial(f) => f.deriv2(t),
            ScalarFunction::Holder(f) => f.deriv2(t),
        }
    }
    fn domain(&self) -> Interval {
        match self {
            ScalarFunction::Polynomial(f) => f.domain(),
            ScalarFunction::Holder(f) => f.domain(),
        }
    }
}

/// A named scalar function with its exact constants and a sampling window.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub function: ScalarFunction,
    pub profile: SmoothnessProfile,
    /// Where terminals and evaluation points are drawn from.
    pub window: Interval,
}

fn poly_entry(name: String, coeffs: Vec<f64>, l: f64, mu: f64, window: Interval) -> CatalogEntry {
    CatalogEntry {
        name,
        function: ScalarFunction::Polynomial(Polynomial::new(coeffs).on(window)),
        profile: SmoothnessProfile::smooth(l, mu).unwrap_or_else(|_| unreachable!()),
        window,
    }
}

fn unit_window() -> Interval {
    Interval::new(-1.0, 1.0).unwrap_or_else(|_| unreachable!())
}

/// `(a/2) t² + b t` for a few curvatures.
pub fn scalar_quadratics() -> Vec<CatalogEntry> {
    let window = Interval::new(-3.0, 3.0).unwrap_or_else(|_| unreachable!());
    [(1.0, 0.0), (4.0, -1.5), (20.0, 2.0), (0.5, 0.25)]
        .into_iter()
        .map(|(a, b)| {
            poly_entry(
                format!("quadratic-a{a}"),
                vec![0.0, b, 0.5 * a],
                a,
                a,
                window,
            )
        })
        .collect()
}

/// Strongly convex polynomials on `[-1, 1]`: `t⁴ + t²` (`f'' ∈ [2, 14]`) and
/// the sextic `t⁶ + 3t² + t` (`f'' = 30t⁴ + 6 ∈ [6, 36]`).
pub fn scalar_polynomials() -> Vec<CatalogEntry> {
    vec![
        poly_entry(
            "quartic".into(),
            vec![0.0, 0.0, 1.0, 0.0, 1.0],
            14.0,
            2.0,
            unit_window(),
        ),
        poly_entry(
            "sextic".into(),
            vec![0.0, 1.0, 3.0, 0.0, 0.0, 0.0, 1.0],
            36.0,
            6.0,
            unit_window(),
        ),
    ]
}

/// `|t|^(1+p)/(1+p)` for `p ∈ {0.5, 0.75, 1}`.
pub fn scalar_holder() -> Vec<CatalogEntry> {
    let window = Interval::new(-2.0, 2.0).unwrap_or_else(|_| unreachable!());
    [0.5, 0.75, 1.0]
        .into_iter()
        .map(|p| {
            let f = HolderPower::new(p).unwrap_or_else(|_| unreachable!());
            CatalogEntry {
                name: format!("holder-p{p}"),
                function: ScalarFunction::Holder(f),
                profile: f.profile(),
                window,
            }
        })
        .collect()
}

/// Catalog by name: `quadratics`, `polynomials`, `holder`, `all`, or
/// `empty`. Unknown names give `None`.
pub fn scalar_catalog(name: &str) -> Option<Vec<CatalogEntry>> {
    match name {
        "quadratics" => Some(scalar_quadratics()),
        "polynomials" => Some(scalar_polynomials()),
        "holder" => Some(scalar_holder()),
        "all" => {
            let mut all = scalar_quadratics();
            all.extend(scalar_polynomials());
            all.extend(scalar_holder());
            Some(all)
        }
        "empty" => Some(Vec::new()),
        _ => None,
    }
}

/// `Σ |x_i|^(1+p)/(1+p)`, minimized at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderFamily {
    dim: usize,
    power: HolderPower,
}

impl HolderFamily {
    pub fn new(dim: usize, p: f64) -> Result<Self> {
        Ok(Self {
            dim,
            power: HolderPower::new(p)?,
        })
    }
}

impl Objective for HolderFamily {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| self.power.value(*v)).sum()
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        for (g, v) in grad.iter_mut().zip(x) {
            *g = self.power.deriv1(*v);
        }
    }
    fn profile(&self) -> SmoothnessProfile {
        self.power.profile()
    }
    fn optimum(&self) -> Option<Optimum> {
        Some(Optimum {
            point: vec![0.0; self.dim],
            value: 0.0,
        })
    }
    fn value_along(&self, x: &[f64], j: usize, y: f64) -> f64 {
        self.value(x) - self.power.value(x[j]) + self.power.value(y)
    }
    fn partial_along(&self, _x: &[f64], _j: usize, y: f64) -> f64 {
        self.power.deriv1(y)
    }
    fn second_partial_along(&self, _x: &[f64], _j: usize, y: f64) -> Option<f64> {
        self.power.deriv2(y)
    }
}

/// `Σ (x_i²/2 + a cos x_i)`: smooth with `L = 1 + a`, non-convex for `a > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineWell {
    dim: usize,
    a: f64,
    // Positive minimizer of y²/2 + a cos y.
    y_star: f64,
}

impl CosineWell {
    pub fn new(dim: usize, a: f64) -> Result<Self> {
        crate::error::check_range("a", a, a >= 0.0 && a.is_finite(), "a >= 0")?;
        // Stationary points solve y = a sin y; for a > 1 the minimizer is the
        // positive root, bracketed by (0, a].
        let y_star = if a <= 1.0 {
            0.0
        } else {
            let (mut lo, mut hi) = (1e-12, a);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid - a * libm::sin(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        Ok(Self { dim, a, y_star })
    }

    fn scalar(&self, y: f64) -> f64 {
        0.5 * y * y + self.a * libm::cos(y)
    }
}

impl Objective for CosineWell {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| self.scalar(*v)).sum()
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        for (g, v) in grad.iter_mut().zip(x) {
            *g = v - self.a * libm::sin(*v);
        }
    }
    fn profile(&self) -> SmoothnessProfile {
        SmoothnessProfile::smooth(1.0 + self.a, 0.0).unwrap_or_else(|_| unreachable!())
    }
    fn optimum(&self) -> Option<Optimum> {
        Some(Optimum {
            point: vec![self.y_star; self.dim],
            value: self.dim as f64 * self.scalar(self.y_star),
        })
    }
    // Every sign pattern of `±y*` is a minimizer.
    fn dist_sq_to_optimum(&self, x: &[f64], _optimum: &Optimum) -> f64 {
        x.iter().map(|v| (v.abs() - self.y_star).powi(2)).sum()
    }
    fn value_along(&self, x: &[f64], j: usize, y: f64) -> f64 {
        self.value(x) - self.scalar(x[j]) + self.scalar(y)
    }
    fn partial_along(&self, _x: &[f64], _j: usize, y: f64) -> f64 {
        y - self.a * libm::sin(y)
    }
    fn second_partial_along(&self, _x: &[f64], _j: usize, y: f64) -> Option<f64> {
        Some(1.0 - self.a * libm::cos(y))
    }
}

/// `½ xᵀ QΛQᵀ x + bᵀx` where `Q` is a product of Givens rotations in the
/// planes `(i, i+1)` (cycling) by the given angles.
pub fn rotated_quadratic(eigenvalues: &[f64], angles: &[f64], b: &[f64]) -> Result<QuadraticForm> {
    let k = eigenvalues.len();
    let mut q = DMatrix::<f64>::identity(k, k);
    if k >= 2 {
        for (n, theta) in angles.iter().enumerate() {
            let i = n % (k - 1);
            let (s, c) = libm::sincos(*theta);
            for r in 0..k {
                let (u, v) = (q[(r, i)], q[(r, i + 1)]);
                q[(r, i)] = c * u - s * v;
                q[(r, i + 1)] = s * u + c * v;
            }
        }
    }
    let lam = DMatrix::from_diagonal(&DVector::from_column_slice(eigenvalues));
    let mut a = &q * lam * q.transpose();
    // Remove rounding asymmetry.
    a = (&a + a.transpose()) * 0.5;
    QuadraticForm::new(a, DVector::from_column_slice(b), 0.0, Convention::Half)
}

/// `10x² + y²` written as `xᵀ diag(10, 1) x`.
pub fn figure1_problem() -> QuadraticForm {
    QuadraticForm::diagonal(&[10.0, 1.0], Convention::Plain).unwrap_or_else(|_| unreachable!())
}

/// `xᵀ diag(10, 1, 1, 1, 1) x`.
pub fn figure3_problem() -> QuadraticForm {
    QuadraticForm::diagonal(&[10.0, 1.0, 1.0, 1.0, 1.0], Convention::Plain)
        .unwrap_or_else(|_| unreachable!())
}

/// `xᵀ diag(10, 1, 7, 9, 4) x`.
pub fn figure4_problem() -> QuadraticForm {
    QuadraticForm::diagonal(&[10.0, 1.0, 7.0, 9.0, 4.0], Convention::Plain)
        .unwrap_or_else(|_| unreachable!())
}
