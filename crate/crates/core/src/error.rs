use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("bracket violation at k={k}: {detail}")]
    BracketViolation { k: u32, detail: String },

    #[error("degenerate eigenvector: {0}")]
    DegenerateEigenvector(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("construction check failed: {0}")]
    Construction(String),

    #[error("k={k} is infeasible: {reason}")]
    Infeasible { k: u32, reason: String },

    #[error("k={k} too small: {reason}")]
    KTooSmall { k: u32, reason: String },

    #[error("geometry violation: {0}")]
    Geometry(String),

    #[error("input geometry error: {0}")]
    InputGeometry(String),

    #[error("precision loss: {0}")]
    Precision(String),

    #[error("trace length exceeded: {0}")]
    TraceLength(String),

    #[error("resolution error: {0}")]
    Resolution(String),
}

impl Error {
    /// True for errors caused by parameters rather than numerical failure.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::ParameterOutOfRange(_) | Error::Infeasible { .. } | Error::KTooSmall { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
