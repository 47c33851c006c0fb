use thiserror::Error;

/// Failures reported by the laboratory.
///
/// Precondition and convention failures are refusals: the operation was not
/// attempted. `BlowUp` carries the last time at which the state was finite.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("precondition violated in {op}: {reason}")]
    Precondition { op: &'static str, reason: String },

    #[error("convention error in {op}: {reason}")]
    Convention { op: &'static str, reason: String },

    #[error("invalid input to {op}: {reason}")]
    Input { op: &'static str, reason: String },

    #[error("audit failed for {what}: {reason}")]
    Audit { what: String, reason: String },

    #[error("solution blew up after t = {last_valid_time} ({reason})")]
    BlowUp { last_valid_time: f64, reason: String },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub(crate) fn precondition(op: &'static str, reason: impl Into<String>) -> Self {
        LabError::Precondition {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn input(op: &'static str, reason: impl Into<String>) -> Self {
        LabError::Input {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn convention(op: &'static str, reason: impl Into<String>) -> Self {
        LabError::Convention {
            op,
            reason: reason.into(),
        }
    }

    /// True for refusals that a caller should report as a precondition failure
    /// rather than a quantitative one.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            LabError::Precondition { .. } | LabError::Convention { .. } | LabError::Input { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
