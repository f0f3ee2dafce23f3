//! Priors, joints and conditionals over the event partition formed by the
//! protected levels and the two target levels.
//!
//! Count-based tables divide integer counts exactly once per cell, so for an
//! exact scalar type every value is the true frequency ratio.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Dataset;
use crate::scalar::Scalar;

/// Tolerance on caller-supplied probability vectors.
pub const SPECIFIED_TOLERANCE: f64 = 1e-9;

/// A conditional probability whose conditioning event may have zero mass.
#[derive(Debug, Clone, PartialEq)]
pub enum Conditional<T> {
    Defined(T),
    /// The conditioning event has probability zero.
    Undefined,
}

impl<T> Conditional<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Conditional::Defined(v) => Some(v),
            Conditional::Undefined => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Conditional::Defined(_))
    }
}

impl<T: Scalar> Conditional<T> {
    fn ratio(numerator: u64, denominator: u64) -> Self {
        if denominator == 0 {
            Conditional::Undefined
        } else {
            Conditional::Defined(T::from_ratio(numerator, denominator))
        }
    }

    fn quotient(numerator: &T, denominator: &T) -> Self {
        if denominator.is_zero() {
            Conditional::Undefined
        } else {
            Conditional::Defined(numerator.clone() / denominator.clone())
        }
    }
}

/// Diverseness, inclusiveness and training-likelihood tables.
///
/// Matrices are indexed `[protected level][target level]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTables<T> {
    protected_levels: Vec<String>,
    prior_target: [T; 2],
    prior_protected: Vec<T>,
    joint: Vec<[T; 2]>,
    target_given_protected: Vec<[Conditional<T>; 2]>,
    protected_given_target: Vec<[Conditional<T>; 2]>,
    support: Option<Vec<[u64; 2]>>,
    stated_joint: Option<Vec<[T; 2]>>,
    warnings: Vec<String>,
}

/// `P(Y = y)` and `P(A = a)` as count ratios.
pub fn priors<T: Scalar>(dataset: &Dataset) -> ([T; 2], Vec<T>) {
    let counts = dataset.counts();
    let n = dataset.n_rows();
    let target = [0, 1].map(|y| T::from_ratio(counts.iter().map(|c| c[y]).sum(), n));
    let protected = counts
        .iter()
        .map(|c| T::from_ratio(c[0] + c[1], n))
        .collect();
    (target, protected)
}

/// `P(Y = y ∩ A = a)` as count ratios.
pub fn joints<T: Scalar>(dataset: &Dataset) -> Vec<[T; 2]> {
    let n = dataset.n_rows();
    dataset
        .counts()
        .iter()
        .map(|c| c.map(|k| T::from_ratio(k, n)))
        .collect()
}

/// `(P(Y=y | A=a), P(A=a | Y=y))`, each a count ratio.
#[allow(clippy::type_complexity)]
pub fn posteriors<T: Scalar>(
    dataset: &Dataset,
) -> (Vec<[Conditional<T>; 2]>, Vec<[Conditional<T>; 2]>) {
    let counts = dataset.counts();
    let col = [0, 1].map(|y| counts.iter().map(|c| c[y]).sum::<u64>());
    let given_protected = counts
        .iter()
        .map(|c| c.map(|k| Conditional::ratio(k, c[0] + c[1])))
        .collect();
    let given_target = counts
        .iter()
        .map(|c| [0, 1].map(|y| Conditional::ratio(c[y], col[y])))
        .collect();
    (given_protected, given_target)
}

impl<T: Scalar> ProbabilityTables<T> {
    /// All tables from the dataset's counts.
    pub fn from_dataset(dataset: &Dataset) -> Self {
        let (prior_target, prior_protected) = priors(dataset);
        let (target_given_protected, protected_given_target) = posteriors(dataset);
        ProbabilityTables {
            protected_levels: dataset.protected_levels().to_vec(),
            prior_target,
            prior_protected,
            joint: joints(dataset),
            target_given_protected,
            protected_given_target,
            support: Some(dataset.counts()),
            stated_joint: None,
            warnings: Vec::new(),
        }
    }

    /// Tables from a stated population: protected-level shares and the
    /// per-level target distribution `[P(Y=0|A=a), P(Y=1|A=a)]`.
    ///
    /// Shares that do not sum to one are rescaled and a warning is recorded;
    /// the products of the shares as stated are kept in
    /// [`stated_joint`](Self::stated_joint).
    pub fn from_specified_priors(
        protected_levels: Vec<String>,
        prior_protected: Vec<T>,
        target_given_protected: Vec<[T; 2]>,
    ) -> Result<Self> {
        if protected_levels.len() != prior_protected.len()
            || protected_levels.len() != target_given_protected.len()
            || protected_levels.is_empty()
        {
            return Err(Error::ShapeMismatch(format!(
                "{} levels, {} priors, {} conditional rows",
                protected_levels.len(),
                prior_protected.len(),
                target_given_protected.len()
            )));
        }
        for (level, p) in protected_levels.iter().zip(&prior_protected) {
            if *p < T::zero() {
                return Err(Error::NegativeProbability {
                    location: format!("P(A={level})"),
                    value: p.to_f64_lossy(),
                });
            }
        }
        for (level, row) in protected_levels.iter().zip(&target_given_protected) {
            for (y, p) in row.iter().enumerate() {
                if *p < T::zero() {
                    return Err(Error::NegativeProbability {
                        location: format!("P(Y={y}|A={level})"),
                        value: p.to_f64_lossy(),
                    });
                }
            }
            let sum = row[0].clone() + row[1].clone();
            if (sum.clone() - T::one()).abs_value().to_f64_lossy() > SPECIFIED_TOLERANCE {
                return Err(Error::RowNotNormalized {
                    level: level.clone(),
                    sum: sum.to_f64_lossy(),
                });
            }
        }

        let total = prior_protected
            .iter()
            .cloned()
            .fold(T::zero(), |acc, p| acc + p);
        if total.is_zero() {
            return Err(Error::ShapeMismatch("protected priors sum to zero".into()));
        }
        let mut warnings = Vec::new();
        let mut stated_joint = None;
        let prior_protected: Vec<T> =
            if (total.clone() - T::one()).abs_value().to_f64_lossy() > SPECIFIED_TOLERANCE {
                warnings.push(format!(
                    "protected-attribute priors sum to {} instead of 1; rescaled to a partition",
                    total.to_f64_lossy()
                ));
                stated_joint = Some(product_rows(&prior_protected, &target_given_protected));
                prior_protected
                    .into_iter()
                    .map(|p| p / total.clone())
                    .collect()
            } else {
                prior_protected
            };

        let joint = product_rows(&prior_protected, &target_given_protected);
        let prior_target =
            [0, 1].map(|y| joint.iter().fold(T::zero(), |acc, j| acc + j[y].clone()));
        let protected_given_target = joint
            .iter()
            .map(|j| [0, 1].map(|y| Conditional::quotient(&j[y], &prior_target[y])))
            .collect();
        let target_given_protected = target_given_protected
            .into_iter()
            .map(|row| row.map(Conditional::Defined))
            .collect();

        Ok(ProbabilityTables {
            protected_levels,
            prior_target,
            prior_protected,
            joint,
            target_given_protected,
            protected_given_target,
            support: None,
            stated_joint,
            warnings,
        })
    }

    pub fn protected_levels(&self) -> &[String] {
        &self.protected_levels
    }

    pub fn prior_target(&self) -> &[T; 2] {
        &self.prior_target
    }

    pub fn prior_protected(&self) -> &[T] {
        &self.prior_protected
    }

    pub fn joint(&self) -> &[[T; 2]] {
        &self.joint
    }

    /// `[a][y] = P(Y = y | A = a)`.
    pub fn target_given_protected(&self) -> &[[Conditional<T>; 2]] {
        &self.target_given_protected
    }

    /// `[a][y] = P(A = a | Y = y)`.
    pub fn protected_given_target(&self) -> &[[Conditional<T>; 2]] {
        &self.protected_given_target
    }

    /// Raw row counts, when the tables came from data.
    pub fn support(&self) -> Option<&[[u64; 2]]> {
        self.support.as_deref()
    }

    /// Joints implied by the priors as stated, before rescaling. Present
    /// only when rescaling happened.
    pub fn stated_joint(&self) -> Option<&[[T; 2]]> {
        self.stated_joint.as_deref()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn level_index(&self, level: &str) -> Option<usize> {
        self.protected_levels.iter().position(|l| l == level)
    }

    /// `P(Y = y) = Σ_a P(Y = y | A = a) P(A = a)`.
    pub fn total_probability_target(&self) -> [T; 2] {
        [0, 1].map(|y| {
            self.target_given_protected
                .iter()
                .zip(&self.prior_protected)
                .filter_map(|(c, p)| c[y].value().map(|v| v.clone() * p.clone()))
                .fold(T::zero(), |acc, t| acc + t)
        })
    }

    /// `P(A = a | Y = y)` by Bayes' rule with the total-probability
    /// denominator, independent of the direct count ratio.
    pub fn bayes_protected_given_target(&self) -> Vec<[Conditional<T>; 2]> {
        let denominators = self.total_probability_target();
        self.target_given_protected
            .iter()
            .zip(&self.prior_protected)
            .map(|(c, p)| {
                [0, 1].map(|y| match c[y].value() {
                    Some(v) => Conditional::quotient(&(p.clone() * v.clone()), &denominators[y]),
                    None => Conditional::Undefined,
                })
            })
            .collect()
    }

    /// `P(Y = y | A = a)` by Bayes' rule from `P(A = a | Y = y)` with the
    /// total-probability denominator over target levels.
    pub fn bayes_target_given_protected(&self) -> Vec<[Conditional<T>; 2]> {
        self.protected_given_target
            .iter()
            .map(|c| {
                let terms: [Option<T>; 2] = [0, 1].map(|y| {
                    c[y].value()
                        .map(|v| v.clone() * self.prior_target[y].clone())
                });
                let denominator = terms
                    .iter()
                    .flatten()
                    .cloned()
                    .fold(T::zero(), |acc, t| acc + t);
                terms.map(|t| match t {
                    Some(t) => Conditional::quotient(&t, &denominator),
                    None => Conditional::Undefined,
                })
            })
            .collect()
    }

    /// Convert every value to `f64`.
    pub fn to_f64(&self) -> ProbabilityTables<f64> {
        let v = |x: &T| x.to_f64_lossy();
        let row = |r: &[T; 2]| [v(&r[0]), v(&r[1])];
        let cond = |c: &Conditional<T>| match c {
            Conditional::Defined(x) => Conditional::Defined(v(x)),
            Conditional::Undefined => Conditional::Undefined,
        };
        let cond_row = |r: &[Conditional<T>; 2]| [cond(&r[0]), cond(&r[1])];
        ProbabilityTables {
            protected_levels: self.protected_levels.clone(),
            prior_target: row(&self.prior_target),
            prior_protected: self.prior_protected.iter().map(v).collect(),
            joint: self.joint.iter().map(row).collect(),
            target_given_protected: self.target_given_protected.iter().map(cond_row).collect(),
            protected_given_target: self.protected_given_target.iter().map(cond_row).collect(),
            support: self.support.clone(),
            stated_joint: self
                .stated_joint
                .as_ref()
                .map(|j| j.iter().map(row).collect()),
            warnings: self.warnings.clone(),
        }
    }
}

fn product_rows<T: Scalar>(priors: &[T], rows: &[[T; 2]]) -> Vec<[T; 2]> {
    priors
        .iter()
        .zip(rows)
        .map(|(p, r)| [p.clone() * r[0].clone(), p.clone() * r[1].clone()])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Info,
    Warning,
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlagKind {
    /// A (level, target) pair with no rows.
    ZeroSupport,
    /// A protected level whose prior is below the threshold.
    LowPrior,
    /// `|P(Y=1|A=a) - P(Y=1)|` above the threshold.
    HighSkew,
}

impl FlagKind {
    pub fn severity(self) -> Severity {
        match self {
            FlagKind::ZeroSupport => Severity::Critical,
            FlagKind::LowPrior => Severity::Warning,
            FlagKind::HighSkew => Severity::Info,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiskFlag {
    pub severity: Severity,
    pub kind: FlagKind,
    pub protected: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<u8>,
    pub message: String,
}

impl RiskFlag {
    fn new(kind: FlagKind, protected: &str, target: Option<u8>, message: String) -> Self {
        RiskFlag {
            severity: kind.severity(),
            kind,
            protected: protected.to_string(),
            target,
            message,
        }
    }

    /// Severity descending, then level name, then target, then kind.
    pub fn sort_key(&self) -> (std::cmp::Reverse<Severity>, &str, Option<u8>, FlagKind) {
        (
            std::cmp::Reverse(self.severity),
            &self.protected,
            self.target,
            self.kind,
        )
    }
}

impl fmt::Display for RiskFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}] {}", self.severity, self.message)
    }
}

pub const DEFAULT_LOW_PRIOR_THRESHOLD: f64 = 0.01;
pub const DEFAULT_SKEW_THRESHOLD: f64 = 0.2;

/// Zero-support cells and rare protected levels.
///
/// Without raw counts (stated populations) a cell is zero-support when its
/// joint probability is exactly zero.
pub fn zero_support_flags<T: Scalar>(
    tables: &ProbabilityTables<T>,
    low_prior_threshold: f64,
) -> Vec<RiskFlag> {
    let mut flags = Vec::new();
    for (a, level) in tables.protected_levels().iter().enumerate() {
        for y in 0..2u8 {
            let empty = match tables.support() {
                Some(s) => s[a][y as usize] == 0,
                None => tables.joint()[a][y as usize].is_zero(),
            };
            if empty {
                flags.push(RiskFlag::new(
                    FlagKind::ZeroSupport,
                    level,
                    Some(y),
                    format!(
                        "no examples with target {y} for level {level:?}; \
                         P(Y={y}|A={level}) is degenerate"
                    ),
                ));
            }
        }
        let prior = tables.prior_protected()[a].to_f64_lossy();
        if prior < low_prior_threshold {
            flags.push(RiskFlag::new(
                FlagKind::LowPrior,
                level,
                None,
                format!("level {level:?} has prior {prior:.3}, below {low_prior_threshold}"),
            ));
        }
    }
    flags
}

/// Levels whose positive rate departs from the overall positive rate by more
/// than `threshold`.
pub fn high_skew_flags<T: Scalar>(tables: &ProbabilityTables<T>, threshold: f64) -> Vec<RiskFlag> {
    let overall = tables.prior_target()[1].to_f64_lossy();
    tables
        .protected_levels()
        .iter()
        .zip(tables.target_given_protected())
        .filter_map(|(level, cond)| {
            let rate = cond[1].value()?.to_f64_lossy();
            ((rate - overall).abs() > threshold).then(|| {
                RiskFlag::new(
                    FlagKind::HighSkew,
                    level,
                    Some(1),
                    format!(
                        "P(Y=1|A={level}) = {rate:.3} differs from P(Y=1) = {overall:.3} \
                         by more than {threshold}"
                    ),
                )
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Record;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn levels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn toy_priors_by_counting() {
        // 10 rows, 4 with target 0
        let rows: Vec<(&str, u8)> = [0, 0, 0, 0, 1, 1, 1, 1, 1, 1]
            .iter()
            .enumerate()
            .map(|(i, &t)| (if i % 2 == 0 { "a" } else { "b" }, t))
            .collect();
        let ds = Dataset::from_labels("toy", &rows).unwrap();
        let (target, protected) = priors::<BigRational>(&ds);
        assert_eq!(target, [rat(2, 5), rat(3, 5)]);
        assert_eq!(protected, vec![rat(1, 2), rat(1, 2)]);
        let (t, _) = priors::<f64>(&ds);
        assert_eq!(t[0], 0.4);
    }

    #[test]
    fn single_level_prior_is_one() {
        let ds = Dataset::from_labels("one", &[("x", 0), ("x", 1), ("x", 1)]).unwrap();
        let (_, protected) = priors::<BigRational>(&ds);
        assert_eq!(protected, vec![rat(1, 1)]);
    }

    #[test]
    fn zero_cooccurrence_has_zero_joint_and_degenerate_conditional() {
        let ds = Dataset::from_labels("z", &[("a", 0), ("a", 1), ("b", 1), ("b", 1)]).unwrap();
        let t = ProbabilityTables::<BigRational>::from_dataset(&ds);
        assert_eq!(t.joint()[1][0], rat(0, 1));
        assert_eq!(
            t.target_given_protected()[1][1],
            Conditional::Defined(rat(1, 1))
        );
        let flags = zero_support_flags(&t, 0.01);
        assert_eq!(flags.len(), 1);
        assert_eq!(flags[0].kind, FlagKind::ZeroSupport);
        assert_eq!(flags[0].protected, "b");
        assert_eq!(flags[0].target, Some(0));
    }

    #[test]
    fn unused_level_gives_undefined_conditionals() {
        let ds = Dataset::from_records(
            "u",
            levels(&["a", "b"]),
            vec![
                Record {
                    protected: 0,
                    target: 0,
                },
                Record {
                    protected: 0,
                    target: 1,
                },
            ],
        )
        .unwrap();
        let t = ProbabilityTables::<f64>::from_dataset(&ds);
        assert_eq!(
            t.target_given_protected()[1],
            [Conditional::Undefined, Conditional::Undefined]
        );
        assert_eq!(
            t.protected_given_target()[1],
            [Conditional::Defined(0.0), Conditional::Defined(0.0)]
        );
    }

    #[test]
    fn independent_data_conditionals_equal_prior() {
        let rows = [("a", 0), ("a", 1), ("a", 1), ("b", 0), ("b", 1), ("b", 1)];
        let ds = Dataset::from_labels("ind", &rows).unwrap();
        let t = ProbabilityTables::<BigRational>::from_dataset(&ds);
        for row in t.target_given_protected() {
            for (cell, prior) in row.iter().zip(t.prior_target()) {
                assert_eq!(cell.value(), Some(prior));
            }
        }
    }

    fn motivating() -> ProbabilityTables<BigRational> {
        ProbabilityTables::from_specified_priors(
            levels(&["white", "black", "Asian"]),
            vec![rat(60, 100), rat(35, 100), rat(15, 100)],
            vec![
                [rat(7, 10), rat(3, 10)],
                [rat(2, 10), rat(8, 10)],
                [rat(6, 10), rat(4, 10)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn stated_population_joints() {
        let t = motivating();
        let stated = t.stated_joint().expect("priors sum to 1.1");
        assert_eq!(stated[0], [rat(42, 100), rat(18, 100)]);
        assert_eq!(stated[1], [rat(7, 100), rat(28, 100)]);
        assert_eq!(stated[2], [rat(9, 100), rat(6, 100)]);
        assert_eq!(t.warnings().len(), 1);

        // rescaled tables are a partition
        let sum = t
            .joint()
            .iter()
            .flatten()
            .cloned()
            .fold(rat(0, 1), |a, b| a + b);
        assert_eq!(sum, rat(1, 1));
        // P(white | Y=1) = 0.18 / 0.52 survives the rescaling
        assert_eq!(
            t.protected_given_target()[0][1],
            Conditional::Defined(rat(18, 52))
        );
        assert_eq!(
            t.target_given_protected()[0][0],
            Conditional::Defined(rat(7, 10))
        );
    }

    #[test]
    fn normalized_priors_have_no_warning() {
        let t = ProbabilityTables::<f64>::from_specified_priors(
            levels(&["a", "b"]),
            vec![0.5, 0.5],
            vec![[0.3, 0.7], [0.3, 0.7]],
        )
        .unwrap();
        assert!(t.warnings().is_empty());
        assert!(t.stated_joint().is_none());
        // identical conditional rows: posteriors equal priors
        for (a, row) in t.protected_given_target().iter().enumerate() {
            for c in row {
                assert!((c.value().unwrap() - t.prior_protected()[a]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn specified_prior_errors() {
        let err = ProbabilityTables::<f64>::from_specified_priors(
            levels(&["a", "b"]),
            vec![-0.1, 1.1],
            vec![[0.5, 0.5], [0.5, 0.5]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NegativeProbability { .. }));

        let err = ProbabilityTables::<f64>::from_specified_priors(
            levels(&["a", "b"]),
            vec![0.5, 0.5],
            vec![[0.5, 0.5], [0.5, 0.6]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::RowNotNormalized { ref level, .. } if level == "b"));

        let err = ProbabilityTables::<f64>::from_specified_priors(
            levels(&["a"]),
            vec![0.5, 0.5],
            vec![[0.5, 0.5]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch(_)));
    }

    #[test]
    fn balanced_data_has_no_flags() {
        let rows = [("a", 0), ("a", 1), ("b", 0), ("b", 1)];
        let ds = Dataset::from_labels("bal", &rows).unwrap();
        let t = ProbabilityTables::<f64>::from_dataset(&ds);
        assert!(zero_support_flags(&t, DEFAULT_LOW_PRIOR_THRESHOLD).is_empty());
        assert!(high_skew_flags(&t, DEFAULT_SKEW_THRESHOLD).is_empty());
    }

    #[test]
    fn low_prior_and_skew_flags() {
        let mut rows = vec![("rare", 1u8)];
        rows.extend(std::iter::repeat_n(("big", 0u8), 100));
        rows.extend(std::iter::repeat_n(("big", 1u8), 99));
        let ds = Dataset::from_labels("lp", &rows).unwrap();
        let t = ProbabilityTables::<f64>::from_dataset(&ds);
        let flags = zero_support_flags(&t, 0.01);
        assert!(flags
            .iter()
            .any(|f| f.kind == FlagKind::LowPrior && f.protected == "rare"));
        assert!(flags.iter().any(|f| f.kind == FlagKind::ZeroSupport
            && f.protected == "rare"
            && f.target == Some(0)));
        let skew = high_skew_flags(&t, 0.2);
        assert_eq!(skew.len(), 1);
        assert_eq!(skew[0].protected, "rare");
    }

    #[test]
    fn bayes_routes_agree_exactly() {
        let rows = [
            ("a", 0),
            ("a", 1),
            ("a", 1),
            ("b", 0),
            ("c", 1),
            ("c", 0),
            ("c", 0),
        ];
        let ds = Dataset::from_labels("x", &rows).unwrap();
        let t = ProbabilityTables::<BigRational>::from_dataset(&ds);
        assert_eq!(t.bayes_protected_given_target(), t.protected_given_target());
        assert_eq!(t.bayes_target_given_protected(), t.target_given_protected());
        assert_eq!(&t.total_probability_target(), t.prior_target());
    }
}
