use crate::numeric::LpError;

/// Errors raised by the solvers, generators and verifiers.
///
/// The variants split into bad input (`Instance`, `Guard`, `Infeasible`,
/// `Io`, `Json`) and broken internal invariants (`Invariant`). The latter
/// means a lemma the algorithms rely on was observed to fail.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 3,
            _ => 2,
        }
    }

    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }

    /// Maps an LP failure. `first` marks the initial relaxation, whose
    /// infeasibility is the caller's fault rather than a broken invariant.
    pub fn from_lp(err: LpError, first: bool, context: &str) -> Error {
        match err {
            LpError::Infeasible if first => Error::Infeasible(format!("{context}: LP relaxation is infeasible")),
            LpError::Infeasible => Error::Invariant(format!("{context}: LP became infeasible mid-run")),
            LpError::Unbounded => Error::Invariant(format!("{context}: LP unbounded despite box bounds")),
            LpError::Malformed(m) => Error::Invariant(format!("{context}: malformed LP: {m}")),
            LpError::Certificate(m) => Error::Invariant(format!("{context}: {m}")),
        }
    }
}
