//! Delimited-text loading and the categorical [`Dataset`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Label given to the protected level that collects empty cells under
/// [`MissingPolicy::AsCategory`].
pub const MISSING_LEVEL: &str = "(missing)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    #[default]
    DropRow,
    AsCategory,
}

impl fmt::Display for MissingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MissingPolicy::DropRow => "drop-row",
            MissingPolicy::AsCategory => "as-category",
        })
    }
}

impl std::str::FromStr for MissingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop-row" => Ok(MissingPolicy::DropRow),
            "as-category" => Ok(MissingPolicy::AsCategory),
            other => Err(Error::InvalidConfig(format!(
                "missing policy must be drop-row or as-category, got {other:?}"
            ))),
        }
    }
}

fn default_delimiter() -> char {
    ','
}

fn default_has_header() -> bool {
    true
}

/// Which columns to audit and how to read them.
///
/// When `has_header` is false, columns are addressed by zero-based index
/// (`"0"`, `"1"`, ...).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub protected_column: String,
    pub target_column: String,
    pub positive_label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_label: Option<String>,
    #[serde(default)]
    pub missing_policy: MissingPolicy,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default = "default_has_header")]
    pub has_header: bool,
}

impl AuditConfig {
    pub fn new(
        protected_column: impl Into<String>,
        target_column: impl Into<String>,
        positive_label: impl Into<String>,
    ) -> Self {
        AuditConfig {
            protected_column: protected_column.into(),
            target_column: target_column.into(),
            positive_label: positive_label.into(),
            negative_label: None,
            missing_policy: MissingPolicy::DropRow,
            delimiter: default_delimiter(),
            has_header: default_has_header(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.protected_column == self.target_column {
            return Err(Error::InvalidConfig(format!(
                "protected and target column are both {:?}",
                self.protected_column
            )));
        }
        if self.negative_label.as_deref() == Some(self.positive_label.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "positive and negative label are both {:?}",
                self.positive_label
            )));
        }
        if !self.delimiter.is_ascii() {
            return Err(Error::InvalidConfig(format!(
                "delimiter must be a single ASCII character, got {:?}",
                self.delimiter
            )));
        }
        Ok(())
    }

    /// Parse the TOML key-value config file format.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: AuditConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }
}

/// One audited row: protected level index and target level (0 or 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Record {
    pub protected: usize,
    pub target: u8,
}

/// Immutable categorical table over one protected attribute and a binary
/// target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    name: String,
    protected_levels: Vec<String>,
    records: Vec<Record>,
    source_digest: String,
    rows_dropped: u64,
}

/// Target levels are always exactly these two.
pub const TARGET_LEVELS: [u8; 2] = [0, 1];

impl Dataset {
    /// Build from already-indexed records.
    ///
    /// `protected_levels` must be strictly increasing (lexicographic) and
    /// every record must reference a valid level and a target in {0, 1}.
    /// Levels without rows are allowed here.
    pub fn from_records(
        name: impl Into<String>,
        protected_levels: Vec<String>,
        records: Vec<Record>,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyAfterFiltering);
        }
        if protected_levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ShapeMismatch(
                "protected levels must be unique and sorted".into(),
            ));
        }
        if let Some(bad) = records
            .iter()
            .find(|r| r.protected >= protected_levels.len() || r.target > 1)
        {
            return Err(Error::ShapeMismatch(format!(
                "record {bad:?} out of range for {} protected levels",
                protected_levels.len()
            )));
        }
        let digest = digest_records(&protected_levels, &records);
        Ok(Dataset {
            name: name.into(),
            protected_levels,
            records,
            source_digest: digest,
            rows_dropped: 0,
        })
    }

    /// Build from `(protected label, target)` pairs; levels are derived and
    /// sorted.
    pub fn from_labels<S: AsRef<str>>(name: impl Into<String>, rows: &[(S, u8)]) -> Result<Self> {
        let (levels, records) = index_rows(rows.iter().map(|(l, t)| (l.as_ref(), *t)));
        Dataset::from_records(name, levels, records)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_rows(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn protected_levels(&self) -> &[String] {
        &self.protected_levels
    }

    pub fn target_levels(&self) -> [u8; 2] {
        TARGET_LEVELS
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    /// Hex SHA-256 of the input bytes (or of the canonical record listing
    /// for in-memory datasets).
    pub fn source_digest(&self) -> &str {
        &self.source_digest
    }

    /// Rows removed by the missing-value policy.
    pub fn rows_dropped(&self) -> u64 {
        self.rows_dropped
    }

    /// `counts[level][target]` via a single scan.
    pub fn counts(&self) -> Vec<[u64; 2]> {
        let mut counts = vec![[0u64; 2]; self.protected_levels.len()];
        for r in &self.records {
            counts[r.protected][r.target as usize] += 1;
        }
        counts
    }
}

fn index_rows<'a>(rows: impl Iterator<Item = (&'a str, u8)>) -> (Vec<String>, Vec<Record>) {
    let raw: Vec<(&str, u8)> = rows.collect();
    let mut index: BTreeMap<&str, usize> = raw.iter().map(|(l, _)| (*l, 0)).collect();
    for (i, slot) in index.values_mut().enumerate() {
        *slot = i;
    }
    let levels = index.keys().map(|s| s.to_string()).collect();
    let records = raw
        .iter()
        .map(|(l, t)| Record {
            protected: index[l],
            target: *t,
        })
        .collect();
    (levels, records)
}

fn digest_records(levels: &[String], records: &[Record]) -> String {
    let mut hasher = Sha256::new();
    for r in records {
        hasher.update(levels[r.protected].as_bytes());
        hasher.update([0u8, r.target, b'\n']);
    }
    hex::encode(hasher.finalize())
}

/// Read `path` and build a [`Dataset`]. The dataset name is the file stem.
pub fn load_dataset(path: &Path, config: &AuditConfig) -> Result<Dataset> {
    let bytes = std::fs::read(path).map_err(|source| Error::FileNotReadable {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    load_dataset_from_bytes(name, &bytes, config)
}

/// Same as [`load_dataset`] for input already in memory.
pub fn load_dataset_from_bytes(
    name: impl Into<String>,
    bytes: &[u8],
    config: &AuditConfig,
) -> Result<Dataset> {
    config.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(config.delimiter as u8)
        .has_headers(config.has_header)
        .from_reader(bytes);

    let (protected_idx, target_idx) = if config.has_header {
        let headers = reader.headers().map_err(csv_error)?.clone();
        let find = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::ColumnNotFound(name.to_string()))
        };
        (
            find(&config.protected_column)?,
            find(&config.target_column)?,
        )
    } else {
        let parse = |name: &str| {
            name.parse::<usize>()
                .map_err(|_| Error::ColumnNotFound(name.to_string()))
        };
        (
            parse(&config.protected_column)?,
            parse(&config.target_column)?,
        )
    };

    let mut rows: Vec<(String, u8)> = Vec::new();
    let mut dropped = 0u64;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let record_no = i as u64 + 1;
        let cell = |idx: usize, column: &str| {
            record
                .get(idx)
                .ok_or_else(|| Error::ColumnNotFound(column.to_string()))
        };
        let protected = cell(protected_idx, &config.protected_column)?;
        let target = cell(target_idx, &config.target_column)?;

        if target.is_empty() {
            dropped += 1;
            continue;
        }
        let protected = match (protected.is_empty(), config.missing_policy) {
            (false, _) => protected.to_string(),
            (true, MissingPolicy::AsCategory) => MISSING_LEVEL.to_string(),
            (true, MissingPolicy::DropRow) => {
                dropped += 1;
                continue;
            }
        };
        let target = if target == config.positive_label {
            1
        } else {
            match &config.negative_label {
                Some(neg) if target == neg => 0,
                Some(_) => {
                    return Err(Error::TargetNotBinary {
                        record: record_no,
                        value: target.to_string(),
                    })
                }
                None => 0,
            }
        };
        rows.push((protected, target));
    }

    if rows.is_empty() {
        return Err(Error::EmptyAfterFiltering);
    }
    let (levels, records) = index_rows(rows.iter().map(|(l, t)| (l.as_str(), *t)));
    Ok(Dataset {
        name: name.into(),
        protected_levels: levels,
        records,
        source_digest: hex::encode(Sha256::digest(bytes)),
        rows_dropped: dropped,
    })
}

fn csv_error(e: csv::Error) -> Error {
    let record = e.position().map(|p| p.record()).unwrap_or(0);
    Error::MalformedInput {
        record,
        message: e.to_string(),
    }
}

/// Row support per target level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSupport {
    pub negative: u64,
    pub positive: u64,
}

/// Check that both target levels have at least one row.
pub fn validate_binary_target(dataset: &Dataset) -> Result<TargetSupport> {
    let mut support = [0u64; 2];
    for r in dataset.records() {
        support[r.target as usize] += 1;
    }
    if let Some(level) = support.iter().position(|&c| c == 0) {
        return Err(Error::DegenerateTarget { level: level as u8 });
    }
    Ok(TargetSupport {
        negative: support[0],
        positive: support[1],
    })
}
