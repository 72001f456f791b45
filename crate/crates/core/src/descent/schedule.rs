//! Step sizes, contraction factors and their feasibility conditions.

use alloc::format;

use crate::bounds::{holder_k, BoundConstants, SmoothnessProfile};
use crate::error::{check_range, Error, Result};

/// `√5 + 2`, the lower limit of the s-sequence.
pub const S_MIN: f64 = 4.236_067_977_499_79;

fn infeasible(condition: alloc::string::String) -> Error {
    Error::Infeasible { condition }
}

/// The open interval `{λ : 1 - K1 λ - K2 |λ| > ε}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaInterval {
    pub lo: f64,
    pub hi: f64,
}

impl LambdaInterval {
    pub fn contains(&self, lambda: f64) -> bool {
        self.lo < lambda && lambda < self.hi
    }
}

/// Solves `1 - K1 λ - K2 |λ| > ε` separately on `λ >= 0` and `λ <= 0`.
pub fn feasible_lambda_interval(
    constants: &BoundConstants,
    epsilon: f64,
) -> Result<LambdaInterval> {
    check_range(
        "epsilon",
        epsilon,
        epsilon > 0.0 && epsilon < 1.0,
        "epsilon in (0, 1)",
    )?;
    let slack = 1.0 - epsilon;
    let up = constants.k1 + constants.k2;
    let down = constants.k2 - constants.k1;
    let hi = if up > 0.0 { slack / up } else { f64::INFINITY };
    let lo = if down > 0.0 {
        -slack / down
    } else {
        f64::NEG_INFINITY
    };
    Ok(LambdaInterval { lo, hi })
}

/// A step size with the contraction factor it guarantees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepWithRate {
    pub eta: f64,
    pub rho: f64,
}

fn check_phi(phi: f64) -> Result<()> {
    check_range("phi", phi, phi > 0.0 && phi < 2.0, "phi in (0, 2)")
}

/// Separable strongly convex schedule:
/// `η = (1 - K1λ - K2|λ|) φ / ((1 - K1λ + K2|λ|)² L)` with
/// `ρ = 1 - (2-φ) φ (μ/L) ((1 - K1λ - K2|λ|)/(1 - K1λ + K2|λ|))²`.
pub fn eta_sc(
    constants: &BoundConstants,
    lambda: f64,
    phi: f64,
    profile: &SmoothnessProfile,
    epsilon: f64,
) -> Result<StepWithRate> {
    check_phi(phi)?;
    let interval = feasible_lambda_interval(constants, epsilon)?;
    if !interval.contains(lambda) {
        return Err(infeasible(format!(
            "1 - K1*lambda - K2*|lambda| > epsilon fails: lambda = {lambda} outside ({}, {})",
            interval.lo, interval.hi
        )));
    }
    let (l, mu) = (profile.l(), profile.mu());
    let num = 1.0 - constants.k1 * lambda - constants.k2 * lambda.abs();
    let den = 1.0 - constants.k1 * lambda + constants.k2 * lambda.abs();
    let r = num / den;
    Ok(StepWithRate {
        eta: num * phi / (den * den * l),
        rho: 1.0 - (2.0 - phi) * phi * (mu / l) * r * r,
    })
}

/// General strongly convex schedule:
/// `η = ((φ/L)(1 - K1λ) - 2K2|λ|/μ) / (1 - K1λ + K2|λ|)²` with
/// `ρ = 1 - (2-φ) μ (1 - K1λ) η`. Requires the numerator to exceed `ε`.
pub fn eta_sc_general(
    constants: &BoundConstants,
    lambda: f64,
    phi: f64,
    profile: &SmoothnessProfile,
    epsilon: f64,
) -> Result<StepWithRate> {
    check_phi(phi)?;
    check_range("epsilon", epsilon, epsilon > 0.0, "epsilon > 0")?;
    let (l, mu) = (profile.l(), profile.mu());
    if mu <= 0.0 {
        return Err(Error::Unsupported(
            "the general strongly convex schedule needs mu > 0",
        ));
    }
    let lin = 1.0 - constants.k1 * lambda;
    let num = (phi / l) * lin - 2.0 * constants.k2 * lambda.abs() / mu;
    if num <= epsilon {
        return Err(infeasible(format!(
            "(phi/L)(1 - K1*lambda) - 2*K2*|lambda|/mu > epsilon fails: {num} at lambda = {lambda}"
        )));
    }
    let den = lin + constants.k2 * lambda.abs();
    let eta = num / (den * den);
    Ok(StepWithRate {
        eta,
        rho: 1.0 - (2.0 - phi) * mu * lin * eta,
    })
}

const SEPARABLE_CONVEX_RATIO: f64 =
    (core::f64::consts::SQRT_2 + 1.0) / (core::f64::consts::SQRT_2 - 1.0);

fn cvx_separable_ratio(constants: &BoundConstants, lambda: f64) -> Result<(f64, f64)> {
    let lin = 1.0 - lambda * constants.k1;
    let spread = lambda.abs() * constants.k2;
    if lin <= SEPARABLE_CONVEX_RATIO * spread || lin <= 0.0 {
        return Err(infeasible(format!(
            "1 - lambda*K1 > ((sqrt2+1)/(sqrt2-1))|lambda|K2 fails at lambda = {lambda}"
        )));
    }
    Ok((lin - spread, lin + spread))
}

/// Separable convex schedule
/// `η = (1/L)[2(1-λK1-|λ|K2)/(1-λK1+|λ|K2)² - 1/(1-λK1-|λ|K2)]`.
pub fn eta_cvx_separable(constants: &BoundConstants, lambda: f64, l: f64) -> Result<f64> {
    let (num, den) = cvx_separable_ratio(constants, lambda)?;
    Ok((2.0 * num / (den * den) - 1.0 / num) / l)
}

/// `C = L‖x0 - x*‖² / (4r² - 2)` with `r = (1-λK1-|λ|K2)/(1-λK1+|λ|K2)`, so
/// that `f(x̄_T) - f* <= C/T`.
pub fn cvx_separable_constant(
    constants: &BoundConstants,
    lambda: f64,
    l: f64,
    dist0_sq: f64,
) -> Result<f64> {
    let (num, den) = cvx_separable_ratio(constants, lambda)?;
    let r = num / den;
    Ok(l * dist0_sq / (4.0 * r * r - 2.0))
}

// (s+1)²/(s²-4s-1) - 1, written to stay accurate for very large s.
fn s_excess(s: f64) -> f64 {
    (6.0 + 2.0 / s) / (s - 4.0 - 1.0 / s)
}

/// `(s+1)²/(s²-4s-1) + 2/s`, the left side of the telescoping condition.
pub fn s_sequence_lhs(s: f64) -> f64 {
    1.0 + s_excess(s) + 2.0 / s
}

/// `(s+1)²/(s²-4s-1)`, the right side of the telescoping condition.
pub fn s_sequence_rhs(s: f64) -> f64 {
    1.0 + s_excess(s)
}

/// Whether `lhs(s_next) <= rhs(s)`, compared after removing the common 1.
pub fn telescoping_holds(s: f64, s_next: f64) -> bool {
    s > S_MIN && s_next > S_MIN && s_excess(s_next) + 2.0 / s_next <= s_excess(s)
}

fn check_s(s: f64) -> Result<()> {
    check_range("s", s, s > S_MIN && s.is_finite(), "s > sqrt(5) + 2")
}

/// The smallest `s' > s` with `lhs(s') <= rhs(s)`, by bisection on
/// `[s, 1e6 s]` to relative width `1e-10`. The returned value is the upper
/// end of the final bracket, so the condition holds at it.
pub fn s_sequence_next(s: f64) -> Result<f64> {
    check_s(s)?;
    let target = s_excess(s);
    let gap = |v: f64| s_excess(v) + 2.0 / v - target;
    let (mut lo, mut hi) = (s, s * 1e6);
    if gap(hi) > 0.0 {
        return Err(infeasible(format!("no s-sequence successor below {hi}")));
    }
    while hi - lo > 1e-10 * lo {
        let mid = 0.5 * (lo + hi);
        if gap(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Both solutions of `1 - λK1 = s|λ|K2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPair {
    pub positive: Option<f64>,
    pub negative: Option<f64>,
}

/// Solves `1 - λK1 = s|λ|K2` on each sign: `λ = 1/(K1 + sK2)` when that is
/// positive, `λ = -1/(sK2 - K1)` when that is negative.
pub fn lambda_from_s(s: f64, constants: &BoundConstants) -> Result<LambdaPair> {
    check_s(s)?;
    if constants.k2 == 0.0 {
        return Err(Error::Unsupported(
            "K2 = 0 leaves 1 - lambda*K1 = s|lambda|K2 without a finite solution",
        ));
    }
    let pos = 1.0 / (constants.k1 + s * constants.k2);
    let neg = -1.0 / (s * constants.k2 - constants.k1);
    Ok(LambdaPair {
        positive: (pos > 0.0 && pos.is_finite()).then_some(pos),
        negative: (neg < 0.0 && neg.is_finite()).then_some(neg),
    })
}

/// `η = (s²-4s-1) / ((s+1)² L (1 - λK1))`.
pub fn eta_cvx_general(s: f64, lambda: f64, constants: &BoundConstants, l: f64) -> Result<f64> {
    check_s(s)?;
    let lin = 1.0 - lambda * constants.k1;
    if lin <= 0.0 {
        return Err(infeasible(format!(
            "1 - lambda*K1 > 0 fails at lambda = {lambda}"
        )));
    }
    let inv = 1.0 / s;
    let shape = (1.0 - 4.0 * inv - inv * inv) / ((1.0 + inv) * (1.0 + inv));
    Ok(shape / (l * lin))
}

/// `C = (L/2)[(s0+1)²/(s0²-4s0-1) + 2/s0] ‖x0 - x*‖²`.
pub fn cvx_general_constant(s0: f64, l: f64, dist0_sq: f64) -> Result<f64> {
    check_s(s0)?;
    Ok(0.5 * l * s_sequence_lhs(s0) * dist0_sq)
}

/// The largest admissible step of the Hölder method and the constant `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonconvexStep {
    pub eta_max: f64,
    pub k: f64,
}

fn holder_terms(profile: &SmoothnessProfile, alpha: f64, lambda: f64) -> Result<(f64, f64, f64)> {
    let p = profile.p();
    let k = holder_k(profile.l(), p, alpha)?;
    check_range(
        "lambda",
        lambda,
        lambda >= 0.0 && lambda.is_finite(),
        "lambda >= 0",
    )?;
    let a = libm::pow(lambda, 1.0 - p);
    let good = a - k * lambda;
    if good <= 0.0 {
        return Err(infeasible(format!(
            "0 < lambda < (1/K)^(1/p) fails: lambda = {lambda}, K = {k}, p = {p}"
        )));
    }
    Ok((k, good, a + k * lambda))
}

/// `η_max = ((1+p)(λ^(1-p) - Kλ) / (L (λ^(1-p) + Kλ)^(1+p)))^(1/p)`.
pub fn nonconvex_schedule(
    profile: &SmoothnessProfile,
    alpha: f64,
    lambda: f64,
) -> Result<NonconvexStep> {
    let p = profile.p();
    let (k, good, bad) = holder_terms(profile, alpha, lambda)?;
    let base = (1.0 + p) * good / (profile.l() * libm::pow(bad, 1.0 + p));
    Ok(NonconvexStep {
        eta_max: libm::pow(base, 1.0 / p),
        k,
    })
}

/// `ψ = η(λ^(1-p) - Kλ - (L/(1+p)) η^p (λ^(1-p) + Kλ)^(1+p))`, the guaranteed
/// decrease per unit of `‖∇f‖_{1+1/p}^{1+1/p}`.
pub fn nonconvex_psi(
    profile: &SmoothnessProfile,
    alpha: f64,
    lambda: f64,
    eta: f64,
) -> Result<f64> {
    check_range("eta", eta, eta > 0.0 && eta.is_finite(), "eta > 0")?;
    let p = profile.p();
    let (_, good, bad) = holder_terms(profile, alpha, lambda)?;
    let loss = profile.l() / (1.0 + p) * libm::pow(eta, p) * libm::pow(bad, 1.0 + p);
    Ok(eta * (good - loss))
}

/// `x_j - c_j = -λ sgn(g_j) |g_j|^(1/p)`.
pub fn nonconvex_terminal(gradient_j: f64, lambda: f64, p: f64) -> f64 {
    if gradient_j == 0.0 {
        return 0.0;
    }
    -lambda * gradient_j.signum() * libm::pow(gradient_j.abs(), 1.0 / p)
}
