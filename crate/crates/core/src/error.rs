use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis label {label} is not valid for mode `{mode}`")]
    InvalidBasisLabel { mode: String, label: String },

    #[error("mode layout conflict: {0}")]
    ModeCollision(String),

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("mode `{mode}` must be a {expected} mode")]
    WrongModeKind {
        mode: String,
        expected: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotObservable(f64),

    #[error("invalid mixture: {0}")]
    BadMixture(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    BadParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("undefined: {0}")]
    Undefined(&'static str),

    #[error("eavesdropper hook touched forbidden mode `{0}`")]
    ForbiddenMode(String),
}

impl Error {
    pub(crate) fn bad_param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::BadParam {
            name,
            value,
            reason,
        }
    }
}
