use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("insufficient coverage for {what}: need {needed:.6e}, have {available:.6e}")]
    Coverage {
        what: &'static str,
        needed: f64,
        available: f64,
    },

    #[error("{context}: accuracy target {target:.3e} not met (estimated error {estimate:.3e}, best value magnitude {best:.6e})")]
    Accuracy {
        context: &'static str,
        target: f64,
        estimate: f64,
        best: f64,
    },

    #[error("integration diverged at t = {time:.6e} s")]
    Divergence { time: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("analysis undefined: {0}")]
    Undefined(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("config error at `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Module that raised the error, used to tag CLI diagnostics.
    pub fn provenance(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "model",
            Error::Coverage { .. } | Error::Shape(_) => "grid",
            Error::Accuracy { context, .. } => context,
            Error::Divergence { .. } => "ode",
            Error::Undefined(_) => "analysis",
            Error::NonFinite(what) => what,
            Error::Config { .. } | Error::Json(_) => "config",
            Error::Io(_) => "io",
        }
    }
}
