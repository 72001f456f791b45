use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::config::{DescentConfig, LambdaBranch, LambdaSchedule, Method, StepRule};
use super::operator::{FracOperator, PowerOperator};
use super::schedule::{
    cvx_general_constant, cvx_separable_constant, eta_cvx_general, eta_cvx_separable, eta_sc,
    eta_sc_general, lambda_from_s, nonconvex_psi, nonconvex_schedule, nonconvex_terminal,
    s_sequence_next, telescoping_holds,
};
use super::trace::{Guarantee, IterateRecord, IterateTrace};
use crate::bounds::{k_constants, sandwich_margin, BoundConstants, SmoothnessProfile};
use crate::error::{check_range, Error, Result};
use crate::oracle::{dot, norm2, Objective};

enum Direction {
    Gradient,
    Frac(FracOperator),
    Power(PowerOperator),
}

struct Plan {
    profile: SmoothnessProfile,
    constants: Option<BoundConstants>,
    direction: Direction,
    // Constant η from the setup, when the schedule does not vary with t.
    base_eta: Option<f64>,
}

fn invalid(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        expected,
    }
}

fn plan<P: Objective + ?Sized>(problem: &P, config: &DescentConfig) -> Result<Plan> {
    let profile = problem.profile();
    check_range(
        "phi",
        config.phi,
        config.phi > 0.0 && config.phi < 2.0,
        "phi in (0, 2)",
    )?;
    check_range(
        "epsilon",
        config.epsilon,
        config.epsilon > 0.0,
        "epsilon > 0",
    )?;
    let theoretical = config.step == StepRule::Theoretical;
    if let StepRule::Fixed(eta) = config.step {
        check_range("eta", eta, eta > 0.0 && eta.is_finite(), "a finite eta > 0")?;
    }
    let method = config.method;
    let (direction, constants) = match method {
        Method::GradientDescent => (Direction::Gradient, None),
        Method::FracNonconvex => (
            Direction::Power(PowerOperator::new(config.alpha, profile.p(), config.quad)?),
            None,
        ),
        _ => {
            let op = FracOperator::new(config.alpha, config.beta, config.quad)?;
            let constants = if method == Method::AtCfgd && profile.p() != 1.0 {
                None
            } else {
                Some(k_constants(&profile, config.alpha, config.beta)?)
            };
            (Direction::Frac(op), constants)
        }
    };

    let mut base_eta = None;
    match method {
        Method::GradientDescent if theoretical => {
            profile.require_unit_exponent()?;
            base_eta = Some(config.phi / profile.l());
        }
        Method::AtCfgd => {
            if theoretical {
                return Err(Error::Unsupported(
                    "the past-iterate terminal has no theoretical step; use a fixed or optimal step",
                ));
            }
            if config.memory == 0 {
                return Err(invalid("memory", 0.0, "m >= 1"));
            }
            if config.history.len() < config.memory {
                return Err(invalid(
                    "history",
                    config.history.len() as f64,
                    "at least m iterates before x0",
                ));
            }
            for h in &config.history {
                if h.len() != problem.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: problem.dim(),
                        found: h.len(),
                    });
                }
            }
        }
        Method::FracScSeparable | Method::FracScGeneral | Method::FracNonconvex => {
            if config.lambda == LambdaSchedule::SDriven {
                return Err(Error::Unsupported(
                    "the s-driven schedule belongs to the general convex method",
                ));
            }
        }
        Method::FracCvxSeparable => {
            if !matches!(config.lambda, LambdaSchedule::Constant(_)) {
                return Err(Error::Unsupported(
                    "the separable convex method needs a constant lambda",
                ));
            }
        }
        Method::FracCvxGeneral => {
            if config.lambda == LambdaSchedule::SDriven {
                check_range(
                    "s0",
                    config.s0,
                    config.s0 > super::S_MIN,
                    "s0 > sqrt(5) + 2",
                )?;
            }
        }
        Method::GradientDescent => {}
    }
    if method == Method::FracNonconvex {
        if !matches!(config.lambda, LambdaSchedule::Constant(_)) {
            return Err(Error::Unsupported(
                "the non-convex method needs a constant lambda",
            ));
        }
        check_range(
            "eta_fraction",
            config.eta_fraction,
            config.eta_fraction > 0.0 && config.eta_fraction < 1.0,
            "a fraction in (0, 1)",
        )?;
    }
    Ok(Plan {
        profile,
        constants,
        direction,
        base_eta,
    })
}

/// Runs `config.horizon` steps of the configured method from `x0`.
///
/// Feasibility of `λ_t` (and of `s_t` for the s-driven schedule) is checked
/// at every step whatever the step rule. The run stops with
/// [`Error::Divergence`] if `f` rises more than `1e6 (1 + |f(x0)|)` above
/// `f(x0)`.
pub fn run_descent<P: Objective + ?Sized>(
    problem: &P,
    config: &DescentConfig,
    x0: &[f64],
) -> Result<IterateTrace> {
    let dim = problem.dim();
    if x0.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x0.len(),
        });
    }
    let plan = plan(problem, config)?;
    let profile = plan.profile;
    let (l, mu, p) = (profile.l(), profile.mu(), profile.p());
    let theoretical = config.step == StepRule::Theoretical;
    let optimum = problem.optimum();
    let method = config.method;

    let f0 = problem.value(x0);
    let guard = 1e6 * (1.0 + f0.abs());
    let mut records: Vec<IterateRecord> = Vec::with_capacity(config.horizon + 1);
    let mut x = x0.to_vec();
    let mut g = vec![0.0; dim];
    let mut c = vec![0.0; dim];
    let mut d = vec![0.0; dim];
    let mut hd = vec![0.0; dim];
    let mut s = config.s0;
    let mut sum_x = vec![0.0; dim];
    let mut min_grad_power = f64::INFINITY;
    let mut nonconvex_psi_value = None;
    let mut separable_lambda = None;

    for t in 0..=config.horizon {
        problem.gradient(&x, &mut g);
        let f = problem.value(&x);
        let record_dist = optimum.as_ref().map(|o| problem.dist_sq_to_optimum(&x, o));
        if method == Method::FracNonconvex {
            let power: f64 = g.iter().map(|v| libm::pow(v.abs(), 1.0 + 1.0 / p)).sum();
            min_grad_power = min_grad_power.min(power);
        }
        let mut record = IterateRecord {
            t,
            x: x.clone(),
            f,
            grad_norm: norm2(&g),
            eta: None,
            lambda: None,
            rho: None,
            dist_sq: record_dist,
            sandwich: None,
        };
        if t == config.horizon {
            records.push(record);
            break;
        }

        let lambda = match method {
            Method::GradientDescent | Method::AtCfgd => None,
            Method::FracCvxGeneral if config.lambda == LambdaSchedule::SDriven => {
                let k = plan
                    .constants
                    .as_ref()
                    .ok_or(Error::Unsupported("missing constants"))?;
                let pair = lambda_from_s(s, k)?;
                let negative = match config.branch {
                    LambdaBranch::Negative => true,
                    LambdaBranch::Positive => false,
                    LambdaBranch::Auto => config.beta < 0.0,
                };
                let chosen = if negative {
                    pair.negative
                } else {
                    pair.positive
                };
                Some(chosen.ok_or_else(|| Error::Infeasible {
                    condition: format!(
                        "1 - lambda*K1 = s|lambda|K2 has no {} solution at s = {s}",
                        if negative { "negative" } else { "positive" }
                    ),
                })?)
            }
            _ => config.lambda.at(t),
        };

        // Terminal.
        match method {
            Method::GradientDescent => c.copy_from_slice(&x),
            Method::AtCfgd => {
                let m = config.memory;
                let past = if t >= m {
                    &records[t - m].x
                } else {
                    &config.history[m - t - 1]
                };
                c.copy_from_slice(past);
            }
            Method::FracNonconvex => {
                let lam = lambda.unwrap_or(0.0);
                for j in 0..dim {
                    c[j] = x[j] - nonconvex_terminal(g[j], lam, p);
                }
            }
            _ => {
                let lam = lambda.unwrap_or(0.0);
                for j in 0..dim {
                    c[j] = x[j] + lam * g[j];
                }
            }
        }

        // Direction.
        match &plan.direction {
            Direction::Gradient => d.copy_from_slice(&g),
            Direction::Frac(op) => op.apply(problem, &c, &x, &mut d)?,
            Direction::Power(op) => op.apply(problem, &c, &x, &mut d)?,
        }
        if let (Some(k), Direction::Frac(_)) = (plan.constants.as_ref(), &plan.direction) {
            let worst = (0..dim)
                .map(|j| sandwich_margin(k, d[j], g[j], x[j] - c[j]))
                .fold(f64::INFINITY, f64::min);
            record.sandwich = Some(worst);
        }

        // Schedule, validated at every step.
        let lam = lambda.unwrap_or(0.0);
        let mut rho = None;
        let scheduled = match method {
            Method::GradientDescent => {
                if mu > 0.0 && p == 1.0 {
                    rho = Some(1.0 - (2.0 - config.phi) * config.phi * mu / l);
                }
                plan.base_eta
            }
            Method::AtCfgd => None,
            Method::FracScSeparable | Method::FracScGeneral => {
                let k = plan
                    .constants
                    .as_ref()
                    .ok_or(Error::Unsupported("missing constants"))?;
                let step = if method == Method::FracScSeparable {
                    eta_sc(k, lam, config.phi, &profile, config.epsilon)?
                } else {
                    eta_sc_general(k, lam, config.phi, &profile, config.epsilon)?
                };
                rho = Some(step.rho);
                Some(step.eta)
            }
            Method::FracCvxSeparable => {
                let k = plan
                    .constants
                    .as_ref()
                    .ok_or(Error::Unsupported("missing constants"))?;
                separable_lambda = Some(lam);
                Some(eta_cvx_separable(k, lam, l)?)
            }
            Method::FracCvxGeneral => {
                let k = plan
                    .constants
                    .as_ref()
                    .ok_or(Error::Unsupported("missing constants"))?;
                if config.lambda == LambdaSchedule::SDriven {
                    let eta = eta_cvx_general(s, lam, k, l)?;
                    let next = s_sequence_next(s)?;
                    if !telescoping_holds(s, next) {
                        return Err(Error::Infeasible {
                            condition: format!(
                                "telescoping condition fails from s = {s} to {next}"
                            ),
                        });
                    }
                    s = next;
                    Some(eta)
                } else if lam == 0.0 {
                    Some(1.0 / l)
                } else {
                    return Err(Error::Infeasible {
                        condition: format!(
                            "the general convex method takes lambda from the s-sequence, got {lam}"
                        ),
                    });
                }
            }
            Method::FracNonconvex => {
                let step = nonconvex_schedule(&profile, config.alpha, lam)?;
                let eta = config.eta_fraction * step.eta_max;
                let psi = nonconvex_psi(&profile, config.alpha, lam, eta)?;
                if psi <= 0.0 {
                    return Err(Error::Infeasible {
                        condition: format!("psi > 0 fails: psi = {psi} at lambda = {lam}"),
                    });
                }
                nonconvex_psi_value = Some(psi);
                Some(eta)
            }
        };

        let eta = match config.step {
            StepRule::Theoretical => scheduled.ok_or(Error::Unsupported("no theoretical step"))?,
            StepRule::Fixed(eta) => eta,
            StepRule::OptimalQuadratic => {
                let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if scale == 0.0 {
                    0.0
                } else {
                    // Normalize so tiny directions near the optimum do not
                    // underflow the curvature.
                    let unit: Vec<f64> = d.iter().map(|v| v / scale).collect();
                    if !problem.hessian_vec(&x, &unit, &mut hd) {
                        return Err(Error::Unsupported(
                            "exact line search needs a quadratic objective",
                        ));
                    }
                    let curvature = dot(&unit, &hd);
                    if curvature <= 0.0 {
                        return Err(Error::Singular);
                    }
                    dot(&g, &unit) / curvature / scale
                }
            }
        };

        record.eta = Some(eta);
        record.lambda = lambda;
        record.rho = if theoretical { rho } else { None };
        records.push(record);

        for j in 0..dim {
            x[j] -= eta * d[j];
        }
        let f_next = problem.value(&x);
        if !f_next.is_finite() || f_next - f0 > guard {
            return Err(Error::Divergence {
                step: t + 1,
                value: f_next,
            });
        }
        for j in 0..dim {
            sum_x[j] += x[j];
        }
    }

    let horizon = config.horizon;
    let average =
        if matches!(method, Method::FracCvxSeparable | Method::FracCvxGeneral) && horizon > 0 {
            let mean: Vec<f64> = sum_x.iter().map(|v| v / horizon as f64).collect();
            let fbar = problem.value(&mean);
            Some((mean, fbar))
        } else {
            None
        };
    let min_grad_power = (method == Method::FracNonconvex).then_some(min_grad_power);
    let optimal_value = optimum.as_ref().map(|o| o.value);

    let guarantee = if !theoretical {
        Guarantee::None
    } else {
        let dist0 = optimum.as_ref().map(|o| problem.dist_sq_to_optimum(x0, o));
        match method {
            Method::GradientDescent if mu > 0.0 => Guarantee::Contraction,
            Method::FracScSeparable | Method::FracScGeneral => Guarantee::Contraction,
            Method::FracCvxSeparable => match (dist0, plan.constants.as_ref(), separable_lambda) {
                (Some(d0), Some(k), Some(lam)) => Guarantee::AverageRate {
                    constant: cvx_separable_constant(k, lam, l, d0)?,
                },
                _ => Guarantee::None,
            },
            Method::FracCvxGeneral => match dist0 {
                Some(d0) if config.lambda == LambdaSchedule::SDriven => Guarantee::AverageRate {
                    constant: cvx_general_constant(config.s0, l, d0)?,
                },
                Some(d0) => Guarantee::AverageRate {
                    constant: 0.5 * l * d0,
                },
                None => Guarantee::None,
            },
            Method::FracNonconvex => match (optimal_value, nonconvex_psi_value) {
                (Some(fstar), Some(psi)) => Guarantee::StationaryRate {
                    psi,
                    initial_gap: f0 - fstar,
                    p,
                },
                _ => Guarantee::None,
            },
            _ => Guarantee::None,
        }
    };

    Ok(IterateTrace {
        records,
        guarantee,
        average,
        min_grad_power,
        optimal_value,
    })
}
