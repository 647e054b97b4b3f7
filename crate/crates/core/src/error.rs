use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sample{}: {reason}", label.as_ref().map(|l| format!(" `{l}`")).unwrap_or_default())]
    InvalidSample {
        label: Option<String>,
        reason: String,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("exact method requires an exponential reference, got `{0}`")]
    ExactRequiresExponential(String),

    #[error("pooled variance is zero; the two-sample statistic cannot be standardized")]
    DegenerateVariance,

    #[error("quadrature did not converge: estimated error {achieved:e} exceeds tolerance {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Attaches a label to an [`Error::InvalidSample`]; other variants pass through.
    pub fn with_label(self, label: &str) -> Self {
        match self {
            Error::InvalidSample { reason, .. } => Error::InvalidSample {
                label: Some(label.to_string()),
                reason,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
