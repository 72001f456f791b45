//! Fractional descent operators, step-size schedules and the descent loop.
//!
//! The update is `x_{t+1} = x_t - η_t Cd_{c_t} f(x_t)` with the terminal
//! placed at `c_t = x_t + λ_t ∇f(x_t)`, so `x_t - c_t = -λ_t ∇f(x_t)`.

mod config;
mod operator;
mod run;
mod schedule;
mod trace;

pub use config::{DescentConfig, LambdaBranch, LambdaSchedule, Method, StepRule};
pub use operator::{
    frac_grad_operator, frac_grad_operator_1d, frac_grad_operator_p, FracOperator, PowerOperator,
};
pub use run::run_descent;
pub use schedule::{
    cvx_general_constant, cvx_separable_constant, eta_cvx_general, eta_cvx_separable, eta_sc,
    eta_sc_general, feasible_lambda_interval, lambda_from_s, nonconvex_psi, nonconvex_schedule,
    nonconvex_terminal, s_sequence_lhs, s_sequence_next, s_sequence_rhs, telescoping_holds,
    LambdaInterval, LambdaPair, NonconvexStep, StepWithRate, S_MIN,
};
pub use trace::{Guarantee, GuaranteeCheck, IterateRecord, IterateTrace};
