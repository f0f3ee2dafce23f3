use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    FileNotReadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed delimited input at record {record}: {message}")]
    MalformedInput { record: u64, message: String },

    #[error("column not found: {0}")]
    ColumnNotFound(String),

    #[error("invalid audit configuration: {0}")]
    InvalidConfig(String),

    #[error("target value {value:?} on record {record} matches neither the positive nor the negative label")]
    TargetNotBinary { record: u64, value: String },

    #[error("no rows left after applying the missing-value policy")]
    EmptyAfterFiltering,

    #[error("target level {level} has no rows; conditionals on it are undefined")]
    DegenerateTarget { level: u8 },

    #[error("zero marginal for {axis} level {level:?}; expected frequencies are undefined")]
    DegenerateMarginal { axis: &'static str, level: String },

    #[error("negative probability {value} at {location}")]
    NegativeProbability { location: String, value: f64 },

    #[error("conditional row for level {level:?} sums to {sum}, not 1")]
    RowNotNormalized { level: String, sum: f64 },

    #[error("{0}")]
    ShapeMismatch(String),

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error("cannot write {path}: {source}")]
    OutputNotWritable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("report (de)serialization failed: {0}")]
    Serialization(#[from] serde_json::Error),
}

impl Error {
    /// Stable identifier used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::FileNotReadable { .. } => "FileNotReadable",
            Error::MalformedInput { .. } => "MalformedInput",
            Error::ColumnNotFound(_) => "ColumnNotFound",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::TargetNotBinary { .. } => "TargetNotBinary",
            Error::EmptyAfterFiltering => "EmptyAfterFiltering",
            Error::DegenerateTarget { .. } => "DegenerateTarget",
            Error::DegenerateMarginal { .. } => "DegenerateMarginal",
            Error::NegativeProbability { .. } => "NegativeProbability",
            Error::RowNotNormalized { .. } => "RowNotNormalized",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::UnknownFixture(_) => "UnknownFixture",
            Error::OutputNotWritable { .. } => "OutputNotWritable",
            Error::Serialization(_) => "Serialization",
        }
    }

    /// Process exit code for the command-line driver.
    ///
    /// | code | meaning                                    |
    /// |------|--------------------------------------------|
    /// | 2    | validation error (config, data, fixture)   |
    /// | 3    | input file unreadable                      |
    /// | 4    | output not writable                        |
    /// | 5    | internal serialization failure             |
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::FileNotReadable { .. } => 3,
            Error::OutputNotWritable { .. } => 4,
            Error::Serialization(_) => 5,
            _ => 2,
        }
    }
}
