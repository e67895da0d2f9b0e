use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DgcError {
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
    #[error("defaulted name {name} has no residual m_bar")]
    MissingResidual { name: i32 },
    #[error("intensity of name {name} vanished at its default time {t}")]
    DegenerateHazard { name: i32, t: f64 },
    #[error("tail bound threshold undefined: {0}")]
    ThresholdUndefined(String),
    #[error("invalid `{field}`: {reason}")]
    InvalidInput { field: String, reason: String },
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(String),
}

impl DgcError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        DgcError::InvalidInput {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code: 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            DgcError::Config(_) | DgcError::InvalidInput { .. } | DgcError::MissingResidual { .. } | DgcError::Io(_) => 2,
            DgcError::NonConvergence(_)
            | DgcError::DegenerateHazard { .. }
            | DgcError::ThresholdUndefined(_)
            | DgcError::Numerical(_) => 3,
        }
    }
}

impl From<std::io::Error> for DgcError {
    fn from(e: std::io::Error) -> Self {
        DgcError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, DgcError>;
