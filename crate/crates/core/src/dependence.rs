//! Association between the protected attribute and the target: contingency
//! table, Pearson χ², contingency coefficient C and effect size index w.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Dataset;
use crate::scalar::{RealScalar, Scalar};

/// Observed and independence-model frequencies for protected × target.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable<T> {
    levels: Vec<String>,
    observed: Vec<[u64; 2]>,
    expected: Vec<[T; 2]>,
    row_totals: Vec<u64>,
    col_totals: [u64; 2],
    n: u64,
    observed_prop: Vec<[T; 2]>,
    expected_prop: Vec<[T; 2]>,
}

/// `a * b / c` with a single rounding when the product fits in `u64`.
fn product_ratio<T: Scalar>(a: u64, b: u64, c: u64) -> T {
    match a.checked_mul(b) {
        Some(p) => T::from_ratio(p, c),
        None => T::from_count(a) * T::from_count(b) / T::from_count(c),
    }
}

impl<T: Scalar> ContingencyTable<T> {
    /// Build from `observed[level][target]` counts.
    pub fn from_counts(levels: Vec<String>, observed: Vec<[u64; 2]>) -> Result<Self> {
        if levels.len() != observed.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} levels but {} count rows",
                levels.len(),
                observed.len()
            )));
        }
        let row_totals: Vec<u64> = observed.iter().map(|r| r[0] + r[1]).collect();
        let col_totals = [
            observed.iter().map(|r| r[0]).sum::<u64>(),
            observed.iter().map(|r| r[1]).sum::<u64>(),
        ];
        let n = col_totals[0] + col_totals[1];

        if let Some(i) = row_totals.iter().position(|&t| t == 0) {
            return Err(Error::DegenerateMarginal {
                axis: "protected",
                level: levels[i].clone(),
            });
        }
        if let Some(j) = col_totals.iter().position(|&t| t == 0) {
            return Err(Error::DegenerateMarginal {
                axis: "target",
                level: j.to_string(),
            });
        }

        let expected = row_totals
            .iter()
            .map(|&r| [0, 1].map(|j| product_ratio::<T>(r, col_totals[j], n)))
            .collect();
        let n_sq = T::from_count(n) * T::from_count(n);
        let expected_prop = row_totals
            .iter()
            .map(|&r| {
                [0, 1].map(|j| match (r.checked_mul(col_totals[j]), n.checked_mul(n)) {
                    (Some(num), Some(den)) => T::from_ratio(num, den),
                    _ => T::from_count(r) * T::from_count(col_totals[j]) / n_sq.clone(),
                })
            })
            .collect();
        let observed_prop = observed
            .iter()
            .map(|row| row.map(|o| T::from_ratio(o, n)))
            .collect();

        Ok(ContingencyTable {
            levels,
            observed,
            expected,
            row_totals,
            col_totals,
            n,
            observed_prop,
            expected_prop,
        })
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn observed(&self) -> &[[u64; 2]] {
        &self.observed
    }

    /// Theoretical frequencies `row_total * col_total / n`.
    pub fn expected(&self) -> &[[T; 2]] {
        &self.expected
    }

    pub fn row_totals(&self) -> &[u64] {
        &self.row_totals
    }

    pub fn col_totals(&self) -> [u64; 2] {
        self.col_totals
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn observed_prop(&self) -> &[[T; 2]] {
        &self.observed_prop
    }

    pub fn expected_prop(&self) -> &[[T; 2]] {
        &self.expected_prop
    }

    /// Per-cell contingency, observed minus expected.
    pub fn contingencies(&self) -> Vec<[T; 2]> {
        self.observed
            .iter()
            .zip(&self.expected)
            .map(|(o, e)| [0, 1].map(|j| T::from_count(o[j]) - e[j].clone()))
            .collect()
    }

    pub fn is_independent(&self) -> bool {
        self.contingencies()
            .iter()
            .all(|row| row.iter().all(|c| c.is_zero()))
    }
}

/// Contingency table of a dataset's protected attribute against its target.
pub fn build_contingency<T: Scalar>(dataset: &Dataset) -> Result<ContingencyTable<T>> {
    ContingencyTable::from_counts(dataset.protected_levels().to_vec(), dataset.counts())
}

/// Pearson χ², the sum over cells of `(O - E)^2 / E`.
pub fn chi_square<T: Scalar>(table: &ContingencyTable<T>) -> T {
    table
        .contingencies()
        .into_iter()
        .zip(table.expected())
        .flat_map(|(c, e)| [0, 1].map(|j| c[j].clone() * c[j].clone() / e[j].clone()))
        .fold(T::zero(), |acc, term| acc + term)
}

/// `sqrt(chi2 / (chi2 + n))`, in `[0, 1)`.
pub fn contingency_coefficient<T: RealScalar>(chi_square: T, n: u64) -> T {
    debug_assert!(n >= 1 && chi_square >= T::zero());
    (chi_square / (chi_square + T::from_count(n))).sqrt()
}

/// Sum over all cells of `(P1 - P0)^2 / P0` with observed proportions P1 and
/// independence proportions P0. Equals `chi2 / n`.
pub fn effect_size_w_squared<T: Scalar>(table: &ContingencyTable<T>) -> T {
    table
        .observed_prop()
        .iter()
        .zip(table.expected_prop())
        .flat_map(|(p1, p0)| {
            [0, 1].map(|j| {
                let d = p1[j].clone() - p0[j].clone();
                d.clone() * d / p0[j].clone()
            })
        })
        .fold(T::zero(), |acc, term| acc + term)
}

/// Effect size index w computed from cell proportions.
pub fn effect_size_w<T: RealScalar>(table: &ContingencyTable<T>) -> T {
    effect_size_w_squared(table).sqrt()
}

/// w recovered from the contingency coefficient, `sqrt(C^2 / (1 - C^2))`.
pub fn w_from_coefficient<T: RealScalar>(c: T) -> T {
    let c2 = c * c;
    (c2 / (T::one() - c2)).sqrt()
}

/// Conventional reading of w.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Magnitude {
    #[serde(rename = "VERY SMALL")]
    VerySmall,
    #[serde(rename = "SMALL")]
    Small,
    #[serde(rename = "MEDIUM")]
    Medium,
    #[serde(rename = "LARGE")]
    Large,
}

impl Magnitude {
    pub fn label(self) -> &'static str {
        match self {
            Magnitude::VerySmall => "VERY SMALL",
            Magnitude::Small => "SMALL",
            Magnitude::Medium => "MEDIUM",
            Magnitude::Large => "LARGE",
        }
    }

    pub const ALL: [Magnitude; 4] = [
        Magnitude::VerySmall,
        Magnitude::Small,
        Magnitude::Medium,
        Magnitude::Large,
    ];
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Bin w with closed lower bounds at 0.1, 0.3 and 0.5.
pub fn classify_magnitude<T: Scalar>(w: &T) -> Magnitude {
    if *w >= T::from_ratio(1, 2) {
        Magnitude::Large
    } else if *w >= T::from_ratio(3, 10) {
        Magnitude::Medium
    } else if *w >= T::from_ratio(1, 10) {
        Magnitude::Small
    } else {
        Magnitude::VerySmall
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DependenceSummary<T> {
    pub n: u64,
    pub chi_square: T,
    pub contingency_coefficient: T,
    pub effect_size_w: T,
    pub magnitude: Magnitude,
}

pub fn summarize<T: RealScalar>(table: &ContingencyTable<T>) -> DependenceSummary<T> {
    let chi2 = chi_square(table);
    let w = effect_size_w(table);
    DependenceSummary {
        n: table.n(),
        chi_square: chi2,
        contingency_coefficient: contingency_coefficient(chi2, table.n()),
        effect_size_w: w,
        magnitude: classify_magnitude(&w),
    }
}
