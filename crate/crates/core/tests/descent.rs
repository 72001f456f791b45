mod common;

use fracgd::bounds::{k_constants, SmoothnessProfile};
use fracgd::catalog::{figure1_problem, rotated_quadratic, CosineWell, HolderFamily};
use fracgd::descent::{
    feasible_lambda_interval, frac_grad_operator, run_descent, s_sequence_lhs, s_sequence_next,
    s_sequence_rhs, DescentConfig, Guarantee, IterateTrace, LambdaSchedule, Method, StepRule,
};
use fracgd::oracle::{Objective, WithProfile};
use fracgd::quadratic::{Convention, QuadraticForm};
use fracgd::quadrature::QuadratureConfig;
use fracgd::Error;
use proptest::prelude::*;

const FIG1_X0: [f64; 2] = [1.0, -10.0];

fn assert_contracts(trace: &IterateTrace, tol: f64) {
    assert_eq!(trace.guarantee, Guarantee::Contraction);
    let check = trace.check(tol);
    assert!(check.holds, "worst margin {}", check.worst_margin);
    assert_eq!(check.checks, trace.horizon());
}

fn assert_sandwich(trace: &IterateTrace) {
    let worst = trace.worst_sandwich().expect("sandwich recorded");
    assert!(worst >= -1e-6, "sandwich margin {worst}");
}

#[test]
fn gradient_descent_classical_rate() {
    let q = figure1_problem();
    let trace = run_descent(
        &q,
        &DescentConfig::new(Method::GradientDescent, 100),
        &FIG1_X0,
    )
    .unwrap();
    for pair in trace.records.windows(2) {
        assert_eq!(pair[0].eta, Some(0.05));
        let ratio = pair[1].dist_sq.unwrap() / pair[0].dist_sq.unwrap();
        assert!(ratio <= 0.9 + 1e-12, "{ratio}");
    }
    assert_contracts(&trace, 1e-9);
}

#[test]
fn separable_strongly_convex_contracts_for_feasible_constants() {
    let q = figure1_problem();
    let k = k_constants(&q.profile(), 0.5, -0.4).unwrap();
    let interval = feasible_lambda_interval(&k, 1e-3).unwrap();
    for lambda in [interval.lo * 0.999, -0.0675, -0.03, 0.0, 0.05, 0.5] {
        let cfg = DescentConfig::new(Method::FracScSeparable, 200)
            .with_alpha_beta(0.5, -0.4)
            .with_lambda(LambdaSchedule::Constant(lambda));
        let trace = run_descent(&q, &cfg, &FIG1_X0).unwrap();
        assert_contracts(&trace, 1e-9);
        assert_sandwich(&trace);
    }
}

#[test]
fn separable_strongly_convex_with_decaying_lambda() {
    let q = figure1_problem();
    let cfg = DescentConfig::new(Method::FracScSeparable, 200)
        .with_alpha_beta(0.5, -0.4)
        .with_lambda(LambdaSchedule::PowerDecay {
            lambda0: -0.0675,
            q: 0.2,
        });
    let trace = run_descent(&q, &cfg, &FIG1_X0).unwrap();
    assert_contracts(&trace, 1e-9);
    // λ_0 sits near the feasibility edge, where the theoretical step is small.
    let first = trace.records[0].dist_sq.unwrap();
    let last = trace.last().unwrap().dist_sq.unwrap();
    assert!(last < 0.5 * first, "{first} -> {last}");
}

#[test]
fn infeasible_lambda_is_reported() {
    let q = figure1_problem();
    let cfg = DescentConfig::new(Method::FracScSeparable, 10)
        .with_alpha_beta(0.5, -0.4)
        .with_lambda(LambdaSchedule::Constant(-0.2));
    match run_descent(&q, &cfg, &FIG1_X0) {
        Err(Error::Infeasible { condition }) => assert!(condition.contains("lambda")),
        other => panic!("expected infeasibility, got {other:?}"),
    }
}

fn rotated5() -> QuadraticForm {
    rotated_quadratic(
        &[1.0, 2.5, 4.0, 6.0, 9.0],
        &[0.4, -1.1, 0.7, 2.3, -0.5, 1.9, 0.2, -2.8],
        &[0.5, -1.0, 0.25, 2.0, -0.75],
    )
    .unwrap()
}

#[test]
fn general_strongly_convex_contracts_on_rotated_quadratic() {
    let q = rotated5();
    let x0 = [3.0, -2.0, 1.0, 4.0, -5.0];
    for (alpha, beta, lambda) in [(0.5, -0.4, -0.005), (0.3, 0.2, 0.004), (0.7, -0.1, 0.0)] {
        let cfg = DescentConfig::new(Method::FracScGeneral, 200)
            .with_alpha_beta(alpha, beta)
            .with_lambda(LambdaSchedule::Constant(lambda));
        let trace = run_descent(&q, &cfg, &x0).unwrap();
        assert_contracts(&trace, 1e-9);
        assert_sandwich(&trace);
    }
}

fn convex_view(q: &QuadraticForm) -> WithProfile<&QuadraticForm> {
    WithProfile::new(q, q.profile().convex_only())
}

fn check_average_rate(problem: &impl Objective, cfg: &DescentConfig, x0: &[f64]) {
    for horizon in [10, 100, 1000] {
        let cfg = DescentConfig {
            horizon,
            ..cfg.clone()
        };
        let trace = run_descent(problem, &cfg, x0).unwrap();
        assert!(matches!(trace.guarantee, Guarantee::AverageRate { .. }));
        let check = trace.check(1e-12);
        assert!(check.holds, "T = {horizon}: margin {}", check.worst_margin);
    }
}

#[test]
fn separable_convex_average_rate() {
    let q = QuadraticForm::diagonal(&[10.0, 1.0, 4.0], Convention::Plain).unwrap();
    let view = convex_view(&q);
    let cfg = DescentConfig::new(Method::FracCvxSeparable, 0)
        .with_alpha_beta(0.5, -0.4)
        .with_lambda(LambdaSchedule::Constant(-0.005));
    check_average_rate(&view, &cfg, &[1.0, -10.0, 3.0]);
    let cfg = cfg
        .with_alpha_beta(0.4, 0.3)
        .with_lambda(LambdaSchedule::Constant(0.003));
    check_average_rate(&view, &cfg, &[1.0, -10.0, 3.0]);
}

#[test]
fn general_convex_average_rate() {
    let q = rotated5();
    let view = convex_view(&q);
    let x0 = [3.0, -2.0, 1.0, 4.0, -5.0];
    let cfg = DescentConfig::new(Method::FracCvxGeneral, 0)
        .with_alpha_beta(0.5, -0.4)
        .with_lambda(LambdaSchedule::SDriven);
    check_average_rate(&view, &cfg, &x0);
    let cfg = DescentConfig {
        s0: 5.0,
        ..cfg.with_alpha_beta(0.6, 0.5)
    };
    check_average_rate(&view, &cfg, &x0);
    let fig = figure1_problem();
    let cfg = DescentConfig::new(Method::FracCvxGeneral, 0)
        .with_alpha_beta(0.5, -0.4)
        .with_lambda(LambdaSchedule::SDriven);
    check_average_rate(&convex_view(&fig), &cfg, &FIG1_X0);
}

#[test]
fn s_sequence_matches_grid_scan() {
    for s in [4.5, 5.0, 10.0, 37.0, 1000.0] {
        let next = s_sequence_next(s).unwrap();
        let rhs = s_sequence_rhs(s);
        assert!(s_sequence_lhs(next) <= rhs);
        // dense scan from s upward for the first grid point satisfying the condition
        let step = s * 1e-6;
        let mut t = s;
        while s_sequence_lhs(t) > rhs {
            t += step;
        }
        assert!(
            (t - next).abs() <= step + 1e-10 * s,
            "{s}: scan {t} vs bisection {next}"
        );
        assert!(next >= s);
    }
}

fn stationary_rate(problem: &impl Objective, alpha: f64, lambda: f64, x0: &[f64]) {
    let cfg = DescentConfig::new(Method::FracNonconvex, 1000)
        .with_alpha_beta(alpha, 0.0)
        .with_lambda(LambdaSchedule::Constant(lambda));
    let trace = run_descent(problem, &cfg, x0).unwrap();
    assert!(matches!(trace.guarantee, Guarantee::StationaryRate { .. }));
    let check = trace.check(1e-12);
    assert!(check.holds, "margin {}", check.worst_margin);
}

#[test]
fn holder_stationary_rate() {
    let half = HolderFamily::new(3, 0.5).unwrap();
    stationary_rate(&half, 0.5, 1.0, &[1.5, -2.0, 0.7]);
    stationary_rate(&half, 0.5, 0.2, &[1.5, -2.0, 0.7]);
    let unit = HolderFamily::new(3, 1.0).unwrap();
    stationary_rate(&unit, 1.0, 0.5, &[1.5, -2.0, 0.7]);
}

#[test]
fn cosine_well_stationary_rate() {
    let well = CosineWell::new(2, 2.0).unwrap();
    stationary_rate(&well, 0.5, 0.1, &[0.3, -3.0]);
    stationary_rate(&well, 1.0, 0.1, &[0.3, -3.0]);
}

#[test]
fn zero_lambda_reproduces_gradient_descent() {
    let q = rotated5();
    let x0 = [3.0, -2.0, 1.0, 4.0, -5.0];
    let gd = run_descent(&q, &DescentConfig::new(Method::GradientDescent, 100), &x0).unwrap();
    let cases = [
        Method::FracScSeparable,
        Method::FracScGeneral,
        Method::FracCvxSeparable,
        Method::FracCvxGeneral,
        Method::FracNonconvex,
    ];
    for method in cases {
        let cfg = DescentConfig::new(method, 100).with_alpha_beta(0.5, -0.4);
        let trace = run_descent(&q, &cfg, &x0).unwrap();
        for (a, b) in gd.records.iter().zip(&trace.records) {
            for (u, v) in a.x.iter().zip(&b.x) {
                assert!((u - v).abs() <= 1e-10, "{method:?} at t = {}", a.t);
            }
        }
    }
}

#[test]
fn past_iterate_terminal_beats_gradient_descent() {
    let q = figure1_problem();
    let gd = DescentConfig::new(Method::GradientDescent, 200).with_step(StepRule::OptimalQuadratic);
    let at = DescentConfig {
        history: vec![vec![1.5, -10.5]],
        ..DescentConfig::new(Method::AtCfgd, 200)
            .with_alpha_beta(0.5, -0.4)
            .with_step(StepRule::OptimalQuadratic)
    };
    let gd = run_descent(&q, &gd, &FIG1_X0)
        .unwrap()
        .first_below_gap(1e-6)
        .unwrap();
    let at = run_descent(&q, &at, &FIG1_X0)
        .unwrap()
        .first_below_gap(1e-6)
        .unwrap();
    assert!(at < gd, "past-iterate {at} vs gd {gd}");
}

#[test]
fn past_iterate_terminal_needs_history() {
    let q = figure1_problem();
    let cfg = DescentConfig::new(Method::AtCfgd, 5).with_step(StepRule::Fixed(0.01));
    assert!(matches!(
        run_descent(&q, &cfg, &FIG1_X0),
        Err(Error::InvalidParameter { .. })
    ));
    let cfg = DescentConfig {
        history: vec![vec![1.5, -10.5]],
        ..DescentConfig::new(Method::AtCfgd, 5)
    };
    assert!(matches!(
        run_descent(&q, &cfg, &FIG1_X0),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn divergence_guard_trips() {
    let q = figure1_problem();
    let cfg = DescentConfig::new(Method::GradientDescent, 100).with_step(StepRule::Fixed(0.2));
    assert!(matches!(
        run_descent(&q, &cfg, &FIG1_X0),
        Err(Error::Divergence { .. })
    ));
}

#[test]
fn operator_reduces_to_gradient() {
    let q = rotated5();
    let x = [0.3, -1.0, 2.0, 0.5, 1.5];
    let mut g = [0.0; 5];
    q.gradient(&x, &mut g);
    let at_x = frac_grad_operator(&q, 0.5, -0.4, &x, &x, QuadratureConfig::default()).unwrap();
    assert_eq!(at_x.as_slice(), &g);
    let c: Vec<f64> = x.iter().map(|v| v + 0.7).collect();
    let near =
        frac_grad_operator(&q, 1.0 - 1e-4, 0.0, &c, &x, QuadratureConfig::default()).unwrap();
    for (a, b) in near.iter().zip(&g) {
        assert!((a - b).abs() <= 1e-2 * (1.0 + b.abs()));
    }
}

#[test]
fn coordinate_slices_match_gradient() {
    let q = rotated5();
    let well = CosineWell::new(5, 1.5).unwrap();
    let x = [0.3, -1.0, 2.0, 0.5, 1.5];
    let problems: [&dyn Objective; 2] = [&q, &well];
    for p in problems {
        let mut g = [0.0; 5];
        p.gradient(&x, &mut g);
        for (j, gj) in g.iter().enumerate() {
            let slice = fracgd::oracle::coordinate_oracle(p, j, &x);
            use fracgd::oracle::ScalarOracle;
            assert!((slice.deriv1(x[j]) - gj).abs() <= 1e-8);
        }
        if let Some(opt) = p.optimum() {
            let mut g = [0.0; 5];
            p.gradient(&opt.point, &mut g);
            assert!(g.iter().all(|v| v.abs() <= 1e-8));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn separable_contraction_for_random_diagonals(
        d in proptest::collection::vec(0.5f64..20.0, 2..5),
        alpha in 0.1f64..0.9,
        beta in -0.8f64..0.8,
        frac in 0.0f64..0.95,
        negative in any::<bool>(),
    ) {
        let q = QuadraticForm::diagonal(&d, Convention::Half).unwrap();
        let prof: SmoothnessProfile = q.profile();
        let k = k_constants(&prof, alpha, beta).unwrap();
        let i = feasible_lambda_interval(&k, 1e-3).unwrap();
        let edge = if negative { i.lo.max(-1.0) } else { i.hi.min(1.0) };
        let lambda = frac * edge;
        let cfg = DescentConfig::new(Method::FracScSeparable, 60)
            .with_alpha_beta(alpha, beta)
            .with_lambda(LambdaSchedule::Constant(lambda));
        let x0: Vec<f64> = (0..d.len()).map(|i| 1.0 + i as f64).collect();
        let trace = run_descent(&q, &cfg, &x0).unwrap();
        prop_assert!(trace.check(1e-9).holds);
        prop_assert!(trace.worst_sandwich().unwrap() >= -1e-6);
    }
}
