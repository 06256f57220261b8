use std::path::PathBuf;

use bayesmv_core::Error as CoreError;
use thiserror::Error;

/// Everything the binary can fail with, each mapped to a documented exit
/// code: 2 bad usage, 3 malformed input, 4 degrees of freedom / singular
/// scatter, 5 infeasible target, 6 I/O.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    /// Structurally broken CSV. `row` is the 1-based file line; `col`, when
    /// known, is the 1-based field index within that line.
    #[error(
        "{}: row {}{}: {}",
        .path.display(),
        .row,
        .col.map(|c| format!(", column {c}")).unwrap_or_default(),
        .detail
    )]
    MalformedCsv {
        path: PathBuf,
        row: usize,
        col: Option<usize>,
        detail: String,
    },

    #[error("{}: no data rows", .path.display())]
    EmptyInput { path: PathBuf },

    #[error("duplicate asset label {label:?} in header")]
    DuplicateLabels { label: String },

    #[error("{0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// True when the error chain bottoms out in a closed pipe. The reader
    /// hung up (`bayesmv ... | head` is the classic), which on the command
    /// line is an ordinary way to stop, not a failure worth reporting.
    pub fn is_broken_pipe(&self) -> bool {
        let CliError::Io { source, .. } = self else {
            return false;
        };
        let mut err: &(dyn std::error::Error + 'static) = source;
        loop {
            if let Some(io) = err.downcast_ref::<std::io::Error>() {
                if io.kind() == std::io::ErrorKind::BrokenPipe {
                    return true;
                }
            }
            match err.source() {
                Some(next) => err = next,
                None => return false,
            }
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::MalformedCsv { .. }
            | CliError::EmptyInput { .. }
            | CliError::DuplicateLabels { .. } => 3,
            CliError::Io { .. } => 6,
            CliError::Core(core) => match core {
                CoreError::NonPositiveGamma { .. }
                | CoreError::InvalidAlpha { .. }
                | CoreError::InvalidWeights { .. }
                | CoreError::InsufficientDraws { .. }
                | CoreError::DimensionMismatch { .. } => 2,
                CoreError::NonFiniteInput { .. } => 3,
                CoreError::WindowTooSmall { .. }
                | CoreError::DegreesOfFreedom { .. }
                | CoreError::SingularScatter { .. } => 4,
                CoreError::InfeasibleVariance { .. } | CoreError::DegenerateFrontier => 5,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
