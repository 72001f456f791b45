//! Derived constants and signed-margin certificates.
//!
//! Every certificate returns `bound - deviation`, so a negative value is a
//! violation and its size says by how much. Callers compare against a
//! tolerance such as [`default_tolerance`].

use crate::caputo::CaputoEvaluator;
use crate::descent::FracOperator;
use crate::error::{check_range, Error, Result};
use crate::oracle::ScalarOracle;
use crate::quadrature::QuadratureConfig;
use crate::special::{gamma_fn, ln_gamma, recip_gamma};

/// Smoothness constant `L`, (uniform) convexity constant `μ` and Hölder
/// exponent `p` of an objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessProfile {
    l: f64,
    mu: f64,
    p: f64,
}

impl SmoothnessProfile {
    pub fn new(l: f64, mu: f64, p: f64) -> Result<Self> {
        check_range("L", l, l > 0.0 && l.is_finite(), "a finite L > 0")?;
        check_range("mu", mu, (0.0..=l).contains(&mu), "0 <= mu <= L")?;
        check_range("p", p, p > 0.0 && p.is_finite(), "a finite p > 0")?;
        Ok(Self { l, mu, p })
    }

    /// An `L`-smooth, `μ`-strongly convex profile (`p = 1`).
    pub fn smooth(l: f64, mu: f64) -> Result<Self> {
        Self::new(l, mu, 1.0)
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// The same profile with `μ = 0`.
    pub fn convex_only(&self) -> Self {
        Self { mu: 0.0, ..*self }
    }

    pub(crate) fn require_unit_exponent(&self) -> Result<()> {
        if self.p == 1.0 {
            Ok(())
        } else {
            Err(Error::Unsupported("the operator bounds need p = 1"))
        }
    }
}

/// Which algebraic form of `K1, K2` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    NonNegativeBeta,
    NonPositiveBeta,
}

/// `γ` and the sandwich constants `K1, K2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub gamma: f64,
    pub k1: f64,
    pub k2: f64,
    pub branch: Branch,
}

fn check_alpha_unit(alpha: f64) -> Result<()> {
    check_range(
        "alpha",
        alpha,
        alpha > 0.0 && alpha <= 1.0,
        "an order in (0, 1]",
    )
}

/// `γ = (1-α)/(2-α)`.
pub fn gamma_ratio(alpha: f64) -> Result<f64> {
    check_alpha_unit(alpha)?;
    Ok((1.0 - alpha) / (2.0 - alpha))
}

/// `γ_{α,β} = β - γ`.
pub fn gamma_alpha_beta(alpha: f64, beta: f64) -> Result<f64> {
    check_range("beta", beta, beta.is_finite(), "a finite beta")?;
    Ok(beta - gamma_ratio(alpha)?)
}

/// `K1, K2` with `|Cd f(x) - f'(x) - K1 (x-c)| <= K2 |x-c|`.
///
/// For `β >= 0`: `K1 = (L+μ)/2 (β-γ)`, `K2 = (L-μ)/2 (β+γ)`.
/// For `β < 0`: `K1 = (L+μ)/2 (β-γ)`, `K2 = (μ-L)/2 (β-γ)`.
pub fn k_constants(profile: &SmoothnessProfile, alpha: f64, beta: f64) -> Result<BoundConstants> {
    profile.require_unit_exponent()?;
    let gamma = gamma_ratio(alpha)?;
    let gab = gamma_alpha_beta(alpha, beta)?;
    let (l, mu) = (profile.l, profile.mu);
    let k1 = 0.5 * (l + mu) * gab;
    let (k2, branch) = if beta >= 0.0 {
        (0.5 * (l - mu) * (beta + gamma), Branch::NonNegativeBeta)
    } else {
        (0.5 * (mu - l) * gab, Branch::NonPositiveBeta)
    };
    Ok(BoundConstants {
        gamma,
        k1,
        k2,
        branch,
    })
}

/// `K = L(1-α)/(1+p-α)`.
pub fn holder_k(l: f64, p: f64, alpha: f64) -> Result<f64> {
    check_range("L", l, l > 0.0 && l.is_finite(), "a finite L > 0")?;
    check_range("p", p, p > 0.0 && p.is_finite(), "a finite p > 0")?;
    check_alpha_unit(alpha)?;
    Ok(l * (1.0 - alpha) / (1.0 + p - alpha))
}

/// `C_{k,α,β} = Γ(2-α)Γ(k)/Γ(k+1-α) + β Γ(2-α)Γ(k)/Γ(k-α)`, the factor
/// multiplying the `k`-th Taylor term of `f'` inside the operator.
pub fn smoothing_coefficient(k: u32, alpha: f64, beta: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter {
            name: "k",
            value: f64::from(k),
            expected: "k >= 2",
        });
    }
    check_alpha_unit(alpha)?;
    let kf = f64::from(k);
    let base = ln_gamma(2.0 - alpha) + ln_gamma(kf);
    let first = libm::exp(base - ln_gamma(kf + 1.0 - alpha));
    let second = libm::exp(base - ln_gamma(kf - alpha));
    Ok(first + beta * second)
}

/// `1e-6 (1 + |x-c|^(1+p-α))`.
pub fn default_tolerance(profile: &SmoothnessProfile, alpha: f64, c: f64, x: f64) -> f64 {
    1e-6 * (1.0 + libm::pow((x - c).abs(), 1.0 + profile.p - alpha))
}

// Deviation `f'(x)(x-c)/(Γ(2-α)|x-c|^α) - CD_c^α f(x)`, zero at `x = c`.
fn first_order_gap<O: ScalarOracle + ?Sized>(
    oracle: &O,
    alpha: f64,
    c: f64,
    x: f64,
    quad: QuadratureConfig,
) -> Result<f64> {
    check_range(
        "alpha",
        alpha,
        alpha > 0.0 && alpha < 1.0,
        "an order in (0, 1)",
    )?;
    if x == c {
        return Ok(0.0);
    }
    let cd = CaputoEvaluator::new(alpha, quad)?.eval(oracle, c, x)?;
    let delta = x - c;
    Ok(oracle.deriv1(x) * delta / (gamma_fn(2.0 - alpha)? * libm::pow(delta.abs(), alpha)) - cd)
}

fn holder_scale(alpha: f64, p: f64, c: f64, x: f64) -> f64 {
    recip_gamma(1.0 - alpha) / (1.0 + p - alpha) * libm::pow((x - c).abs(), 1.0 + p - alpha)
}

/// Margin of `|f'(x)(x-c)/(Γ(2-α)|x-c|^α) - CD_c^α f(x)| <= L/(Γ(1-α)(1+p-α)) |x-c|^(1+p-α)`
/// for an `(L, p)`-Hölder smooth oracle.
pub fn certify_smooth_bound<O: ScalarOracle + ?Sized>(
    oracle: &O,
    profile: &SmoothnessProfile,
    alpha: f64,
    c: f64,
    x: f64,
    quad: QuadratureConfig,
) -> Result<f64> {
    let gap = first_order_gap(oracle, alpha, c, x, quad)?;
    Ok(profile.l * holder_scale(alpha, profile.p, c, x) - gap.abs())
}

/// Margin of `f'(x)(x-c)/(Γ(2-α)|x-c|^α) - CD_c^α f(x) >= μ/(Γ(1-α)(1+p-α)) |x-c|^(1+p-α)`
/// for a `(μ, p)`-uniformly convex oracle.
pub fn certify_uniform_convex_bound<O: ScalarOracle + ?Sized>(
    oracle: &O,
    profile: &SmoothnessProfile,
    alpha: f64,
    c: f64,
    x: f64,
    quad: QuadratureConfig,
) -> Result<f64> {
    let gap = first_order_gap(oracle, alpha, c, x, quad)?;
    Ok(gap - profile.mu * holder_scale(alpha, profile.p, c, x))
}

/// Margins of `μ/Γ(3-α) |x-c|^(2-α) <= CD_c^α f(x) <= L/Γ(3-α) |x-c|^(2-α)`
/// for `α ∈ (1, 2]`, returned as `(upper, lower)`.
pub fn certify_order2_bound<O: ScalarOracle + ?Sized>(
    oracle: &O,
    profile: &SmoothnessProfile,
    alpha: f64,
    c: f64,
    x: f64,
    quad: QuadratureConfig,
) -> Result<(f64, f64)> {
    check_range(
        "alpha",
        alpha,
        alpha > 1.0 && alpha <= 2.0,
        "an order in (1, 2]",
    )?;
    if x == c {
        return Ok((0.0, 0.0));
    }
    let cd = CaputoEvaluator::new(alpha, quad)?.eval(oracle, c, x)?;
    let scale = libm::pow((x - c).abs(), 2.0 - alpha) / gamma_fn(3.0 - alpha)?;
    Ok((profile.l * scale - cd, cd - profile.mu * scale))
}

/// Margin of `|Cd_c^{α,β} f(x) - f'(x) - K1(x-c)| <= K2 |x-c|`.
pub fn certify_sandwich<O: ScalarOracle + ?Sized>(
    oracle: &O,
    constants: &BoundConstants,
    alpha: f64,
    beta: f64,
    c: f64,
    x: f64,
    quad: QuadratureConfig,
) -> Result<f64> {
    let op = FracOperator::new(alpha, beta, quad)?;
    let value = op.apply_1d(oracle, c, x)?;
    Ok(sandwich_margin(constants, value, oracle.deriv1(x), x - c))
}

/// `K2|δ| - |operator - gradient - K1 δ|` with `δ = x - c`.
pub fn sandwich_margin(
    constants: &BoundConstants,
    operator: f64,
    gradient: f64,
    delta: f64,
) -> f64 {
    constants.k2 * delta.abs() - (operator - gradient - constants.k1 * delta).abs()
}
