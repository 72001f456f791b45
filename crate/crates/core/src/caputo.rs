//! The unified Caputo derivative
//!
//! ```text
//! CD_c^α f(x) = sgn(x-c)^(n-1) / Γ(n-α) ∫_c^x f^(n)(t) / |x-t|^(α-n+1) dt,   n = ⌈α⌉
//! ```
//!
//! which is the left derivative for `x > c` and the right derivative for
//! `x < c`. Substituting `t = c + (x-c)u` turns the kernel into
//! `(1-u)^(n-α-1)`, which a [`JacobiRule`] integrates without touching the
//! singular endpoint.

use crate::error::{check_range, Error, Result};
use crate::oracle::ScalarOracle;
use crate::quadrature::{integrate_adaptive, JacobiRule, QuadratureConfig};
use crate::special::{gamma_fn, recip_gamma};

/// Order, integer ceiling and terminal of a Caputo derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaputoSpec {
    alpha: f64,
    order: u8,
    terminal: f64,
}

impl CaputoSpec {
    pub fn new(alpha: f64, terminal: f64) -> Result<Self> {
        let order = derivative_order(alpha)?;
        check_range(
            "terminal",
            terminal,
            terminal.is_finite(),
            "a finite terminal",
        )?;
        Ok(Self {
            alpha,
            order,
            terminal,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `n = ⌈α⌉`, either 1 or 2.
    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn terminal(&self) -> f64 {
        self.terminal
    }
}

fn derivative_order(alpha: f64) -> Result<u8> {
    check_range(
        "alpha",
        alpha,
        alpha > 0.0 && alpha <= 2.0,
        "an order in (0, 2]",
    )?;
    Ok(if alpha <= 1.0 { 1 } else { 2 })
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Caputo derivative of a fixed order with its quadrature rule prepared.
///
/// Building the rule is the expensive part; descent loops keep one
/// evaluator per order and reuse it across terminals and points.
#[derive(Debug, Clone)]
pub struct CaputoEvaluator {
    alpha: f64,
    order: u8,
    // None at integer orders, where the derivative reduces to its limit.
    rule: Option<JacobiRule>,
    scale: f64,
}

impl CaputoEvaluator {
    pub fn new(alpha: f64, quad: QuadratureConfig) -> Result<Self> {
        let order = derivative_order(alpha)?;
        let n = f64::from(order);
        let (rule, scale) = if alpha == n {
            (None, 1.0)
        } else {
            let rule = JacobiRule::new(quad.node_count(), n - alpha - 1.0)?;
            (Some(rule), 1.0 / gamma_fn(n - alpha)?)
        };
        Ok(Self {
            alpha,
            order,
            rule,
            scale,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    /// `CD_c^α f(x)`. At integer α this is the limit `sgn(x-c)^n f^(n)(x)`.
    pub fn eval<O: ScalarOracle + ?Sized>(&self, oracle: &O, c: f64, x: f64) -> Result<f64> {
        let domain = oracle.domain();
        domain.require(x)?;
        domain.require(c)?;
        if x == c {
            return Err(Error::TerminalAtPoint);
        }
        let second = self.order == 2;
        if second && oracle.deriv2(x).is_none() {
            return Err(Error::MissingSecondDerivative);
        }
        let nth = |t: f64| {
            if second {
                oracle.deriv2(t).unwrap_or(f64::NAN)
            } else {
                oracle.deriv1(t)
            }
        };

        let delta = x - c;
        let s = sign(delta);
        let Some(rule) = &self.rule else {
            let sn = if second { 1.0 } else { s };
            return Ok(sn * nth(x));
        };
        let integral = rule.integrate(|u| nth(c + delta * u));
        let sign_factor = if second { s } else { 1.0 };
        let n = f64::from(self.order);
        Ok(sign_factor
            * self.scale
            * delta
            * libm::pow(delta.abs(), n - self.alpha - 1.0)
            * integral)
    }
}

/// One-shot Caputo derivative `CD_c^α f(x)` with `c = spec.terminal()`.
pub fn caputo<O: ScalarOracle + ?Sized>(
    oracle: &O,
    spec: &CaputoSpec,
    x: f64,
    quad: QuadratureConfig,
) -> Result<f64> {
    CaputoEvaluator::new(spec.alpha, quad)?.eval(oracle, spec.terminal, x)
}

/// The `c → x` continuation of the normalized first-order factor
/// `CD_c^α f(x) Γ(2-α) |x-c|^α / (x-c)`, which is `f'(x)`.
pub fn caputo_at_terminal_limit<O: ScalarOracle + ?Sized>(
    oracle: &O,
    alpha: f64,
    x: f64,
) -> Result<f64> {
    check_range(
        "alpha",
        alpha,
        alpha > 0.0 && alpha < 1.0,
        "an order in (0, 1)",
    )?;
    oracle.domain().require(x)?;
    Ok(oracle.deriv1(x))
}

/// `ζ_x(t) = f(t) - f(x) - f'(x)(t - x)`.
pub fn zeta<O: ScalarOracle + ?Sized>(oracle: &O, x: f64, t: f64) -> f64 {
    oracle.value(t) - oracle.value(x) - oracle.deriv1(x) * (t - x)
}

/// Both sides of the identity relating `CD_c^α f(x)` to `f'(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationResidual {
    /// `CD_c^α f(x) - f'(x)(x-c) / (Γ(2-α)|x-c|^α)`
    pub lhs: f64,
    /// `-ζ_x(c) / (Γ(1-α)|x-c|^α) - α sgn(x-c)/Γ(1-α) ∫_c^x ζ_x(t)/|x-t|^(α+1) dt`
    pub rhs: f64,
}

impl RelationResidual {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Evaluates both sides of the relation by independent quadratures.
///
/// The left side uses the Caputo rule on `f'`. On the right side, when `f''`
/// is available, `ζ_x(t) = (t-x)² ∫_0^1 (1-s) f''(x + s(t-x)) ds` is factored
/// so the remaining kernel is `(1-u)^(1-α)`; otherwise the singular integrand
/// is integrated adaptively up to `|x-t| = 1e-8 |x-c|`.
pub fn relation_residual<O: ScalarOracle + ?Sized>(
    oracle: &O,
    alpha: f64,
    c: f64,
    x: f64,
    quad: QuadratureConfig,
) -> Result<RelationResidual> {
    check_range(
        "alpha",
        alpha,
        alpha > 0.0 && alpha <= 1.0,
        "an order in (0, 1]",
    )?;
    let cd = CaputoEvaluator::new(alpha, quad)?.eval(oracle, c, x)?;
    let delta = x - c;
    let dist = delta.abs();
    let s = sign(delta);
    let df = oracle.deriv1(x);
    let lhs = cd - df * delta / (gamma_fn(2.0 - alpha)? * libm::pow(dist, alpha));

    let inv_g1 = recip_gamma(1.0 - alpha);
    let boundary = -zeta(oracle, x, c) * inv_g1 / libm::pow(dist, alpha);
    if inv_g1 == 0.0 {
        return Ok(RelationResidual { lhs, rhs: boundary });
    }

    let tail = if oracle.deriv2(x).is_some() {
        let outer = JacobiRule::new(quad.node_count(), 1.0 - alpha)?;
        let inner = JacobiRule::new(quad.node_count(), 1.0)?;
        let remainder =
            |t: f64| inner.integrate(|r| oracle.deriv2(x + r * (t - x)).unwrap_or(f64::NAN));
        delta * libm::pow(dist, 1.0 - alpha) * outer.integrate(|u| remainder(c + delta * u))
    } else {
        let stop = x - 1e-8 * delta;
        let integrand = |t: f64| zeta(oracle, x, t) / libm::pow((x - t).abs(), alpha + 1.0);
        integrate_adaptive(integrand, c, stop, 1e-13 * (1.0 + dist), 1e-12, 2000)
    };
    let rhs = boundary - alpha * s * inv_g1 * tail;
    Ok(RelationResidual { lhs, rhs })
}
