use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("orbit overflowed to a non-finite value at iterate {iterate}")]
    Overflow { iterate: usize },

    #[error("point is not a cycle of the requested period: residual {residual:e}")]
    NotACycle { residual: f64 },

    #[error("degree {degree} exceeds the configured cap {cap}")]
    Capacity { degree: usize, cap: usize },

    #[error("degree of the iterate could not be determined: leading terms cancel at iterate {iterate}")]
    DegreeAmbiguous { iterate: usize },

    #[error("jacobian is singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("newton iteration did not converge in {iterations} steps (last residual {residual:e})")]
    Divergence { iterations: usize, residual: f64 },

    #[error("argument drift {drift:.3} too large; the contour likely passes near another zero")]
    Inconclusive { drift: f64 },

    #[error("grid shapes do not match: {0}")]
    Shape(String),

    #[error("no branch system verified: {0}")]
    NoBranchSystem(String),

    #[error("inverse branch failed inside a verified system: {0}")]
    InternalConsistency(String),

    #[error("negative cell masses clamped: {clamped:e} is {fraction:.3} of total mass {total:e}")]
    ExcessClamping {
        clamped: f64,
        total: f64,
        fraction: f64,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
