use std::fmt;

/// Failure of a harness command, mapped onto the CLI exit codes.
#[derive(Debug)]
pub enum HarnessError {
    /// Unparseable or inconsistent configuration, or an unknown catalog.
    Config(String),
    /// A hyperparameter violates its feasibility condition.
    Infeasible(String),
    /// A run blew past the divergence guard.
    Divergence(String),
    Io(std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => 2,
            HarnessError::Infeasible(_) => 3,
            HarnessError::Divergence(_) => 4,
        }
    }

    /// Classifies a core error raised while running `label`.
    pub fn from_core(label: &str, err: fracgd::Error) -> Self {
        match err {
            fracgd::Error::Infeasible { condition } => {
                HarnessError::Infeasible(format!("{label}: {condition}"))
            }
            e @ fracgd::Error::Divergence { .. } => {
                HarnessError::Divergence(format!("{label}: {e}"))
            }
            e => HarnessError::Config(format!("{label}: {e}")),
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config(m) => write!(f, "config error: {m}"),
            HarnessError::Infeasible(m) => write!(f, "infeasible: {m}"),
            HarnessError::Divergence(m) => write!(f, "diverged: {m}"),
            HarnessError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e)
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Io(e.into())
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
