//! Discriminatory-risk annotation for tabular datasets.
//!
//! Given one protected categorical attribute and a binary target, the crate
//! computes four sections:
//!
//! * dependence: χ², contingency coefficient C and effect size w
//! * diverseness: prior probabilities of every level
//! * inclusiveness: joint probabilities of each (level, target) pair
//! * training likelihood: conditionals in both directions
//!
//! and assembles them into an [`AnnotationDocument`] with risk flags and
//! optional SVG badges.
//!
//! The table types are generic over a [`Scalar`]; the aliases below fix the
//! common choices.

pub mod annotation;
pub mod cli;
pub mod dependence;
pub mod error;
pub mod fixtures;
pub mod ingest;
pub mod probability;
pub mod render;
pub mod scalar;

pub use annotation::{annotate, AnnotateOptions, AnnotationDocument, Prob};
pub use dependence::{
    build_contingency, chi_square, classify_magnitude, contingency_coefficient, effect_size_w,
    ContingencyTable, DependenceSummary, Magnitude,
};
pub use error::{Error, Result};
pub use ingest::{load_dataset, validate_binary_target, AuditConfig, Dataset, MissingPolicy};
pub use probability::{Conditional, ProbabilityTables, RiskFlag};
pub use render::{render_badges, BadgeSet};
pub use scalar::{RealScalar, Scalar};

/// Exact rational used for oracle-grade computations.
pub type Rational = num_rational::BigRational;

pub type Tables = ProbabilityTables<f64>;
pub type Tables32 = ProbabilityTables<f32>;
pub type ExactTables = ProbabilityTables<Rational>;

pub type Contingency = ContingencyTable<f64>;
pub type Contingency32 = ContingencyTable<f32>;
pub type ExactContingency = ContingencyTable<Rational>;

pub type Dependence = DependenceSummary<f64>;
pub type Dependence32 = DependenceSummary<f32>;
