use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the range the operation is defined on.
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// The evaluation point coincides with the terminal; use the limit form.
    TerminalAtPoint,
    /// A point lies outside the oracle's domain.
    OutOfDomain { point: f64 },
    /// The operation needs `f''` but the oracle does not provide it.
    MissingSecondDerivative,
    /// The setting is outside what the method supports.
    Unsupported(&'static str),
    /// A hyperparameter violates the feasibility condition of its schedule.
    Infeasible { condition: String },
    /// The objective grew past the divergence guard.
    Divergence { step: usize, value: f64 },
    /// A matrix was singular or not positive definite.
    Singular,
    /// Dimensions of inputs disagree.
    DimensionMismatch { expected: usize, found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                expected,
            } => write!(f, "invalid {name} = {value}: expected {expected}"),
            Error::TerminalAtPoint => {
                f.write_str("evaluation point equals the terminal; use caputo_at_terminal_limit")
            }
            Error::OutOfDomain { point } => write!(f, "point {point} is outside the oracle domain"),
            Error::MissingSecondDerivative => {
                f.write_str("second derivative required but not provided by the oracle")
            }
            Error::Unsupported(what) => write!(f, "unsupported setting: {what}"),
            Error::Infeasible { condition } => write!(f, "infeasible hyperparameters: {condition}"),
            Error::Divergence { step, value } => {
                write!(f, "divergence at step {step}: objective reached {value}")
            }
            Error::Singular => f.write_str("matrix is singular or not positive definite"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    ok: bool,
    expected: &'static str,
) -> Result<()> {
    if ok && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected,
        })
    }
}
