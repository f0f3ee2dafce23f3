//! Built-in stated population and the catalog of case-study dataset files.
//!
//! The case-study CSVs are not shipped; `scripts/fetch_fixtures.py` builds
//! them into the directory named by [`FIXTURES_ENV`].

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::AuditConfig;
use crate::probability::ProbabilityTables;
use crate::scalar::rational_from_decimal;

pub const FIXTURES_ENV: &str = "BIASGAUGE_FIXTURES";

/// Names accepted by `annotate --example`.
pub const EXAMPLES: [&str; 1] = ["motivating"];

/// A stated population: level shares and outcome rates, as decimal text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatedPopulation {
    pub name: &'static str,
    pub target_semantics: &'static str,
    pub levels: &'static [&'static str],
    pub shares: &'static [&'static str],
    /// `P(Y = 0 | A = a)` per level.
    pub negative_target_rates: &'static [&'static str],
}

/// Three groups with shares 60/35/15 (summing to 1.1) and positive-outcome
/// rates 70/20/60. Target 1 is the negative outcome.
pub const MOTIVATING: StatedPopulation = StatedPopulation {
    name: "motivating",
    target_semantics: "1 = negative outcome, 0 = positive outcome",
    levels: &["white", "black", "Asian"],
    shares: &["0.60", "0.35", "0.15"],
    negative_target_rates: &["0.70", "0.20", "0.60"],
};

impl StatedPopulation {
    /// Exact tables; rescaling of the shares is done in rational arithmetic.
    pub fn tables(&self) -> Result<ProbabilityTables<BigRational>> {
        let parse = |s: &str| {
            rational_from_decimal(s)
                .ok_or_else(|| Error::InvalidConfig(format!("not a decimal probability: {s:?}")))
        };
        let shares = self
            .shares
            .iter()
            .map(|s| parse(s))
            .collect::<Result<Vec<_>>>()?;
        let rows = self
            .negative_target_rates
            .iter()
            .map(|s| {
                let p0 = parse(s)?;
                let p1 = BigRational::from_integer(1.into()) - p0.clone();
                Ok([p0, p1])
            })
            .collect::<Result<Vec<_>>>()?;
        ProbabilityTables::from_specified_priors(
            self.levels.iter().map(|s| s.to_string()).collect(),
            shares,
            rows,
        )
    }

    /// Hex SHA-256 of a canonical listing of the inputs.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for ((level, share), rate) in self
            .levels
            .iter()
            .zip(self.shares)
            .zip(self.negative_target_rates)
        {
            hasher.update(format!("{level}\t{share}\t{rate}\n").as_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

pub fn example(name: &str) -> Result<&'static StatedPopulation> {
    match name {
        "motivating" => Ok(&MOTIVATING),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

/// A prepared case-study CSV and the audit configuration for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseStudy {
    pub name: &'static str,
    pub file: &'static str,
    pub protected_column: &'static str,
    pub target_column: &'static str,
    pub positive_label: &'static str,
    pub negative_label: &'static str,
    pub rows: u64,
}

impl CaseStudy {
    pub fn config(&self) -> AuditConfig {
        let mut c = AuditConfig::new(
            self.protected_column,
            self.target_column,
            self.positive_label,
        );
        c.negative_label = Some(self.negative_label.to_string());
        c
    }

    pub fn path_in(&self, dir: &Path) -> PathBuf {
        dir.join(self.file)
    }
}

pub const COMPAS: CaseStudy = CaseStudy {
    name: "compas",
    file: "compas.csv",
    protected_column: "race",
    target_column: "two_year_recid",
    positive_label: "1",
    negative_label: "0",
    rows: 6172,
};

pub const DRUG_CONSUMPTION: CaseStudy = CaseStudy {
    name: "drug_consumption",
    file: "drug_consumption.csv",
    protected_column: "ethnicity",
    target_column: "cannabis",
    positive_label: "user",
    negative_label: "non-user",
    rows: 1885,
};

pub const ADULT: CaseStudy = CaseStudy {
    name: "adult",
    file: "adult.csv",
    protected_column: "race",
    target_column: "income",
    positive_label: "<=50K",
    negative_label: ">50K",
    rows: 48842,
};

pub const CASE_STUDIES: [CaseStudy; 3] = [COMPAS, DRUG_CONSUMPTION, ADULT];

/// Fixture directory from the environment, if set.
pub fn fixture_dir() -> Option<PathBuf> {
    std::env::var_os(FIXTURES_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}
