//! Error types shared across the crate.

use chrono::NaiveDate;
use thiserror::Error;

/// Errors produced by ingestion, decomposition, robustness checks, and the
/// simulator. `Io` is the only variant that can signal a failure outside the
/// caller's input data; everything else is an input or validation problem.
#[derive(Debug, Error)]
pub enum Error {
    #[error("format error: {0}")]
    Format(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("empty input")]
    EmptyInput,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Raised by `RepairPolicy::Fail` when a bad open is encountered.
    #[error("bad open on {date}: {reason}")]
    BadOpen { date: NaiveDate, reason: String },

    #[error("validation error: {0}")]
    Validation(String),

    /// Capital-cost adjustment pushed an overnight return to -100% or below.
    #[error("capital cost drives overnight return to -100% or below on {0}")]
    CostDomain(NaiveDate),

    #[error("misaligned alternative opens: {0}")]
    Misaligned(String),

    #[error("regime split: {0}")]
    EmptyRegime(String),

    #[error("simulation aborted on day {day}: {reason}")]
    SimAbort { day: usize, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
