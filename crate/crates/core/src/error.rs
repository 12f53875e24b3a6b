use thiserror::Error;

use crate::funcparam::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed spec string (carrier, f, arithmetic or sequence).
    #[error("invalid spec `{spec}`: {reason}")]
    Spec { spec: String, reason: String },

    /// A well-formed carrier that cannot host an arithmetic.
    #[error("invalid carrier `{spec}`: {reason}")]
    InvalidCarrier { spec: String, reason: String },

    #[error("functional parameter rejected: {0}")]
    Validation(Box<ValidationReport>),

    #[error("table {path}: line {line}: {reason}")]
    Table {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("index {index} out of range for carrier of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("value {value} is not on the carrier")]
    OffCarrier { value: f64 },

    #[error("the top element has no successor")]
    SuccessorOfTop,

    #[error("carrier exhausted: result exceeds the top element")]
    CarrierExhausted,

    #[error("multiplication unavailable: f(1) != 1")]
    MultiplicationUnavailable,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn spec(spec: &str, reason: impl Into<String>) -> Self {
        Error::Spec {
            spec: spec.to_string(),
            reason: reason.into(),
        }
    }

    /// Whether the error means the arithmetic itself could not be built
    /// (as opposed to a malformed request or a failed evaluation).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_) | Error::Table { .. } | Error::InvalidCarrier { .. }
        )
    }

    pub fn is_evaluation(&self) -> bool {
        matches!(
            self,
            Error::OffCarrier { .. }
                | Error::SuccessorOfTop
                | Error::CarrierExhausted
                | Error::MultiplicationUnavailable
                | Error::IndexOutOfRange { .. }
        )
    }
}
