//! The annotation document: dependence, diverseness, inclusiveness and
//! training-likelihood sections plus risk flags, and its canonical JSON form.
//!
//! Canonical form is pretty-printed JSON with a fixed key order and a
//! trailing newline. Every probability is written as
//! `{"value": <full precision or null>, "display": "<3 decimals or undefined>"}`.

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::dependence::{build_contingency, summarize, ContingencyTable, Magnitude};
use crate::error::{Error, Result};
use crate::ingest::{validate_binary_target, AuditConfig, Dataset};
use crate::probability::{
    high_skew_flags, zero_support_flags, Conditional, ProbabilityTables, RiskFlag,
    DEFAULT_LOW_PRIOR_THRESHOLD, DEFAULT_SKEW_THRESHOLD,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Token written in place of a number for undefined conditionals.
pub const UNDEFINED_TOKEN: &str = "undefined";

/// Probability rendering used in reports and badges.
pub fn format_probability(p: f64) -> String {
    format!("{p:.3}")
}

/// Rendering of χ², C and w.
pub fn format_statistic(x: f64) -> String {
    format!("{x:.4}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prob {
    Defined(f64),
    Undefined,
}

impl Prob {
    pub fn value(self) -> Option<f64> {
        match self {
            Prob::Defined(v) => Some(v),
            Prob::Undefined => None,
        }
    }

    pub fn display(self) -> String {
        match self {
            Prob::Defined(v) => format_probability(v),
            Prob::Undefined => UNDEFINED_TOKEN.to_string(),
        }
    }
}

impl From<&Conditional<f64>> for Prob {
    fn from(c: &Conditional<f64>) -> Self {
        match c {
            Conditional::Defined(v) => Prob::Defined(*v),
            Conditional::Undefined => Prob::Undefined,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ProbRepr {
    value: Option<f64>,
    display: String,
}

impl Serialize for Prob {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProbRepr {
            value: self.value(),
            display: self.display(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ProbRepr::deserialize(d)?;
        let prob = match repr.value {
            Some(v) => Prob::Defined(v),
            None => Prob::Undefined,
        };
        if prob.display() != repr.display {
            return Err(serde::de::Error::custom(format!(
                "display {:?} does not match value {:?}",
                repr.display, repr.value
            )));
        }
        Ok(prob)
    }
}

/// A statistic with its full-precision value and 4-decimal rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub value: f64,
    pub display: String,
}

impl Stat {
    fn new(value: f64) -> Self {
        Stat {
            value,
            display: format_statistic(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub low_prior: f64,
    pub skew: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            low_prior: DEFAULT_LOW_PRIOR_THRESHOLD,
            skew: DEFAULT_SKEW_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub name: String,
    /// Absent for stated populations, which have no rows.
    pub n_rows: Option<u64>,
    pub rows_dropped: u64,
    pub source_digest: String,
    pub config: Option<AuditConfig>,
    /// Meaning of target level 1.
    pub target_semantics: String,
    pub protected_levels: Vec<String>,
    pub thresholds: Thresholds,
    pub warnings: Vec<String>,
    pub tool_version: String,
    pub created_at: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyCell {
    pub protected: String,
    pub target: u8,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DependenceSection {
    Computed {
        n: u64,
        chi_square: Stat,
        contingency_coefficient: Stat,
        effect_size_w: Stat,
        magnitude: Magnitude,
        cells: Vec<ContingencyCell>,
    },
    NotComputable {
        reason: String,
    },
}

impl DependenceSection {
    pub fn magnitude(&self) -> Option<Magnitude> {
        match self {
            DependenceSection::Computed { magnitude, .. } => Some(*magnitude),
            DependenceSection::NotComputable { .. } => None,
        }
    }

    fn from_table(table: &ContingencyTable<f64>) -> Self {
        let summary = summarize(table);
        let cells = table
            .levels()
            .iter()
            .zip(table.observed().iter().zip(table.expected()))
            .flat_map(|(level, (o, e))| {
                (0..2).map(move |y| ContingencyCell {
                    protected: level.clone(),
                    target: y as u8,
                    observed: o[y],
                    expected: e[y],
                })
            })
            .collect();
        DependenceSection::Computed {
            n: summary.n,
            chi_square: Stat::new(summary.chi_square),
            contingency_coefficient: Stat::new(summary.contingency_coefficient),
            effect_size_w: Stat::new(summary.effect_size_w),
            magnitude: summary.magnitude,
            cells,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelProb {
    pub level: String,
    pub p: Prob,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diverseness {
    pub target: Vec<LevelProb>,
    pub protected: Vec<LevelProb>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointCell {
    pub target: u8,
    pub protected: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<u64>,
    pub p: Prob,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inclusiveness {
    pub cells: Vec<JointCell>,
    /// Joints from the stated population before rescaling, when it did not
    /// form a partition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stated: Option<Vec<JointCell>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondCell {
    pub target: u8,
    pub protected: String,
    pub p: Prob,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingLikelihood {
    /// `P(Y = target | A = protected)`
    pub target_given_protected: Vec<CondCell>,
    /// `P(A = protected | Y = target)`
    pub protected_given_target: Vec<CondCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationDocument {
    pub meta: Meta,
    pub dependence: DependenceSection,
    pub diverseness: Diverseness,
    pub inclusiveness: Inclusiveness,
    pub training_likelihood: TrainingLikelihood,
    pub flags: Vec<RiskFlag>,
}

impl AnnotationDocument {
    /// Copy with `created_at` cleared, for content comparisons.
    pub fn without_timestamp(&self) -> Self {
        let mut doc = self.clone();
        doc.meta.created_at.clear();
        doc
    }

    pub fn joint(&self, target: u8, protected: &str) -> Option<Prob> {
        find_cell(&self.inclusiveness.cells, target, protected)
    }

    pub fn target_given_protected(&self, target: u8, protected: &str) -> Option<Prob> {
        find_cond(
            &self.training_likelihood.target_given_protected,
            target,
            protected,
        )
    }

    pub fn protected_given_target(&self, protected: &str, target: u8) -> Option<Prob> {
        find_cond(
            &self.training_likelihood.protected_given_target,
            target,
            protected,
        )
    }

    pub fn prior_protected(&self, level: &str) -> Option<Prob> {
        self.diverseness
            .protected
            .iter()
            .find(|l| l.level == level)
            .map(|l| l.p)
    }

    pub fn prior_target(&self, target: u8) -> Option<Prob> {
        self.diverseness.target.get(target as usize).map(|l| l.p)
    }
}

fn find_cell(cells: &[JointCell], target: u8, protected: &str) -> Option<Prob> {
    cells
        .iter()
        .find(|c| c.target == target && c.protected == protected)
        .map(|c| c.p)
}

fn find_cond(cells: &[CondCell], target: u8, protected: &str) -> Option<Prob> {
    cells
        .iter()
        .find(|c| c.target == target && c.protected == protected)
        .map(|c| c.p)
}

#[derive(Debug, Clone, Default)]
pub struct AnnotateOptions {
    pub thresholds: Thresholds,
    /// Defaults to the current time.
    pub created_at: Option<DateTime<Utc>>,
}

impl AnnotateOptions {
    fn timestamp(&self) -> String {
        self.created_at
            .unwrap_or_else(Utc::now)
            .to_rfc3339_opts(SecondsFormat::Secs, true)
    }
}

/// Run all four analyses on a dataset.
///
/// A degenerate marginal only downgrades the dependence section; the
/// probability sections are always emitted.
pub fn annotate(
    dataset: &Dataset,
    config: &AuditConfig,
    options: &AnnotateOptions,
) -> Result<AnnotationDocument> {
    validate_binary_target(dataset)?;
    let dependence = match build_contingency::<f64>(dataset) {
        Ok(table) => DependenceSection::from_table(&table),
        Err(e @ Error::DegenerateMarginal { .. }) => DependenceSection::NotComputable {
            reason: e.to_string(),
        },
        Err(e) => return Err(e),
    };
    let tables = ProbabilityTables::<f64>::from_dataset(dataset);
    let meta = Meta {
        name: dataset.name().to_string(),
        n_rows: Some(dataset.n_rows()),
        rows_dropped: dataset.rows_dropped(),
        source_digest: dataset.source_digest().to_string(),
        config: Some(config.clone()),
        target_semantics: format!("1 = {:?}", config.positive_label),
        protected_levels: dataset.protected_levels().to_vec(),
        thresholds: options.thresholds.clone(),
        warnings: Vec::new(),
        tool_version: TOOL_VERSION.to_string(),
        created_at: options.timestamp(),
    };
    Ok(assemble(meta, dependence, &tables))
}

/// Annotate a stated population (shares and per-level outcome rates rather
/// than rows). Dependence needs sample counts and is reported as not
/// computable.
pub fn annotate_specified(
    name: &str,
    source_digest: &str,
    target_semantics: &str,
    tables: &ProbabilityTables<f64>,
    options: &AnnotateOptions,
) -> AnnotationDocument {
    let meta = Meta {
        name: name.to_string(),
        n_rows: None,
        rows_dropped: 0,
        source_digest: source_digest.to_string(),
        config: None,
        target_semantics: target_semantics.to_string(),
        protected_levels: tables.protected_levels().to_vec(),
        thresholds: options.thresholds.clone(),
        warnings: tables.warnings().to_vec(),
        tool_version: TOOL_VERSION.to_string(),
        created_at: options.timestamp(),
    };
    let dependence = DependenceSection::NotComputable {
        reason: "population given as probabilities without sample counts".to_string(),
    };
    assemble(meta, dependence, tables)
}

fn joint_cells(
    levels: &[String],
    joint: &[[f64; 2]],
    support: Option<&[[u64; 2]]>,
) -> Vec<JointCell> {
    (0..2u8)
        .flat_map(|y| {
            levels.iter().enumerate().map(move |(a, level)| JointCell {
                target: y,
                protected: level.clone(),
                support: support.map(|s| s[a][y as usize]),
                p: Prob::Defined(joint[a][y as usize]),
            })
        })
        .collect()
}

fn cond_cells(levels: &[String], cond: &[[Conditional<f64>; 2]]) -> Vec<CondCell> {
    (0..2u8)
        .flat_map(|y| {
            levels.iter().enumerate().map(move |(a, level)| CondCell {
                target: y,
                protected: level.clone(),
                p: Prob::from(&cond[a][y as usize]),
            })
        })
        .collect()
}

fn assemble(
    meta: Meta,
    dependence: DependenceSection,
    tables: &ProbabilityTables<f64>,
) -> AnnotationDocument {
    let levels = tables.protected_levels();
    let diverseness = Diverseness {
        target: (0..2)
            .map(|y| LevelProb {
                level: y.to_string(),
                p: Prob::Defined(tables.prior_target()[y]),
            })
            .collect(),
        protected: levels
            .iter()
            .zip(tables.prior_protected())
            .map(|(level, &p)| LevelProb {
                level: level.clone(),
                p: Prob::Defined(p),
            })
            .collect(),
    };
    let inclusiveness = Inclusiveness {
        cells: joint_cells(levels, tables.joint(), tables.support()),
        stated: tables.stated_joint().map(|j| joint_cells(levels, j, None)),
    };
    let training_likelihood = TrainingLikelihood {
        target_given_protected: cond_cells(levels, tables.target_given_protected()),
        protected_given_target: cond_cells(levels, tables.protected_given_target()),
    };

    let mut flags = zero_support_flags(tables, meta.thresholds.low_prior);
    flags.extend(high_skew_flags(tables, meta.thresholds.skew));
    flags.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));

    AnnotationDocument {
        meta,
        dependence,
        diverseness,
        inclusiveness,
        training_likelihood,
        flags,
    }
}

/// Canonical JSON text of a document.
pub fn serialize(document: &AnnotationDocument) -> Result<String> {
    let mut text = serde_json::to_string_pretty(document)?;
    text.push('\n');
    Ok(text)
}

pub fn parse(text: &str) -> Result<AnnotationDocument> {
    Ok(serde_json::from_str(text)?)
}
