//! Error types shared across the crate.
//!
//! Every fallible public operation returns [`Result`]. Variants are grouped by
//! the kind of contract that was violated (shapes, file formats, schedules,
//! configuration) so callers can match on the failure class without parsing
//! message strings.

use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Two tensors or parameter vectors disagreed on shape or layout.
    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    ShapeMismatch {
        /// Operation that detected the mismatch.
        context: &'static str,
        /// Shape the operation required.
        expected: String,
        /// Shape it actually received.
        actual: String,
    },

    /// A label was outside `0..num_classes`.
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange {
        /// Offending label value.
        label: usize,
        /// Number of classes the dataset declares.
        classes: usize,
    },

    /// An IDX file failed validation. The offset points at the first
    /// offending byte so truncated downloads are easy to diagnose.
    #[error("{}: invalid IDX data at byte {offset}: {reason}", path.display())]
    IdxFormat {
        /// File that failed to parse.
        path: PathBuf,
        /// Byte offset of the problem.
        offset: u64,
        /// Human-readable description of what was wrong.
        reason: String,
    },

    /// A parameter checkpoint could not be read or failed validation.
    #[error("checkpoint {}: {reason}", path.display())]
    Checkpoint {
        /// File that failed.
        path: PathBuf,
        /// Description of the problem.
        reason: String,
    },

    /// Requested partition cannot be built from the given dataset.
    #[error("partition infeasible: {0}")]
    PartitionInfeasible(String),

    /// An epoch index fell outside the configured schedule.
    #[error("epoch {epoch} outside schedule of {total} epochs")]
    Schedule {
        /// 1-based epoch that was requested.
        epoch: usize,
        /// Total epochs in the schedule.
        total: usize,
    },

    /// A configuration value (file or programmatic) failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Reporting was asked to summarize inconsistent histories.
    #[error("report: {0}")]
    Report(String),

    /// An output file already exists and overwriting was not requested.
    #[error("output {} already exists (pass --force to overwrite)", .0.display())]
    OutputExists(PathBuf),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Helper for shape errors: formats both shapes with `{:?}`.
    pub(crate) fn shape(context: &'static str, expected: impl std::fmt::Debug, actual: impl std::fmt::Debug) -> Self {
        Error::ShapeMismatch {
            context,
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
        }
    }
}
