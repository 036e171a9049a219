use std::fmt;
use std::path::PathBuf;

use iiot_energy::learning::LearningError;
use iiot_energy::placement::PlacementError;
use iiot_energy::radio::RadioError;
use thiserror::Error;

/// A config value that failed a range or type check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    /// Dotted path, e.g. `radio.K`.
    pub field: String,
    /// 1-based line of the field (or of its block when the field is absent).
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// Malformed text or an unknown key.
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        message: String,
    },
    #[error("{origin}: invalid scenario:{}", errors.iter().map(|e| format!("\n  {e}")).collect::<String>())]
    Validation {
        origin: String,
        errors: Vec<FieldError>,
    },
}

impl ScenarioError {
    pub(crate) fn with_origin(self, origin: &str) -> Self {
        match self {
            ScenarioError::Validation { errors, .. } => ScenarioError::Validation {
                origin: origin.to_string(),
                errors,
            },
            other => other,
        }
    }

    /// Field errors, for validation failures.
    pub fn field_errors(&self) -> &[FieldError] {
        match self {
            ScenarioError::Validation { errors, .. } => errors,
            _ => &[],
        }
    }
}

/// A module failure while running a valid scenario.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("{context}: {source}")]
    Learning {
        context: String,
        source: LearningError,
    },
    #[error("{context}: {source}")]
    Placement {
        context: String,
        source: PlacementError,
    },
    #[error("{context}: {source}")]
    Radio { context: String, source: RadioError },
    #[error("{context}: {source}")]
    Instance {
        context: String,
        source: iiot_energy::placement::InstanceError,
    },
    #[error("writing {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("scenario kind is `{found}` but the `{command}` command runs `{expected}` scenarios")]
    WrongKind {
        command: &'static str,
        expected: &'static str,
        found: &'static str,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Run(#[from] RunError),
}

impl CliError {
    /// 1 for unreadable or invalid scenarios, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scenario(_) | CliError::Run(RunError::WrongKind { .. }) => 1,
            CliError::Run(_) => 2,
        }
    }
}
