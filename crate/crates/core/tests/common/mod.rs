//! Brute-force oracles and random data shared by the integration tests.
//!
//! Nothing here calls into the crate's counting or statistics code: every
//! expected value is recomputed from the raw `(label, target)` rows.

#![allow(dead_code)]

use std::collections::BTreeSet;

use biasgauge::Rational;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

pub type Row = (String, u8);

pub fn rat(n: u64, d: u64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Rows matching the predicate, by linear scan.
pub fn count_where(rows: &[Row], pred: impl Fn(&Row) -> bool) -> u64 {
    rows.iter().filter(|r| pred(r)).count() as u64
}

pub fn sorted_levels(rows: &[Row]) -> Vec<String> {
    rows.iter()
        .map(|r| r.0.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// A probability as an integer ratio, as the oracle computes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn exact(self) -> Rational {
        rat(self.num, self.den)
    }

    /// One division of the two integers.
    pub fn float(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

pub struct OracleTables {
    pub levels: Vec<String>,
    pub prior_target: [Ratio; 2],
    pub prior_protected: Vec<Ratio>,
    /// `[level][target]`
    pub joint: Vec<[Ratio; 2]>,
    /// `[level][target]`, `None` when the level has no rows
    pub target_given_protected: Vec<[Option<Ratio>; 2]>,
    /// `[level][target]`, `None` when the target level has no rows
    pub protected_given_target: Vec<[Option<Ratio>; 2]>,
}

pub fn oracle_tables(rows: &[Row]) -> OracleTables {
    let n = rows.len() as u64;
    let levels = sorted_levels(rows);
    let target_count = [0u8, 1].map(|y| count_where(rows, |r| r.1 == y));
    let prior_target = target_count.map(|c| Ratio { num: c, den: n });
    let mut prior_protected = Vec::new();
    let mut joint = Vec::new();
    let mut tgp = Vec::new();
    let mut pgt = Vec::new();
    for level in &levels {
        let level_count = count_where(rows, |r| &r.0 == level);
        prior_protected.push(Ratio {
            num: level_count,
            den: n,
        });
        let both = [0u8, 1].map(|y| count_where(rows, |r| &r.0 == level && r.1 == y));
        joint.push(both.map(|c| Ratio { num: c, den: n }));
        tgp.push(both.map(|c| {
            (level_count > 0).then_some(Ratio {
                num: c,
                den: level_count,
            })
        }));
        pgt.push([0usize, 1].map(|y| {
            (target_count[y] > 0).then_some(Ratio {
                num: both[y],
                den: target_count[y],
            })
        }));
    }
    OracleTables {
        levels,
        prior_target,
        prior_protected,
        joint,
        target_given_protected: tgp,
        protected_given_target: pgt,
    }
}

/// Cell counts `[level][target]` by scanning rows once per cell.
pub fn oracle_counts(rows: &[Row]) -> Vec<[u64; 2]> {
    sorted_levels(rows)
        .iter()
        .map(|level| [0u8, 1].map(|y| count_where(rows, |r| &r.0 == level && r.1 == y)))
        .collect()
}

/// Pearson χ² in exact arithmetic, `Σ (O - E)^2 / E` with
/// `E = row total * column total / n`. `None` if a marginal is zero.
pub fn oracle_chi_square(counts: &[[u64; 2]]) -> Option<Rational> {
    let n: u64 = counts.iter().map(|c| c[0] + c[1]).sum();
    let cols = [0, 1].map(|j| counts.iter().map(|c| c[j]).sum::<u64>());
    if cols.contains(&0) || counts.iter().any(|c| c[0] + c[1] == 0) {
        return None;
    }
    let mut total = rat(0, 1);
    for c in counts {
        let row = c[0] + c[1];
        for j in 0..2 {
            let expected = rat(row * cols[j], n);
            let diff = rat(c[j], 1) - expected.clone();
            total += diff.clone() * diff / expected;
        }
    }
    Some(total)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= tol * scale.max(f64::MIN_POSITIVE)
}

/// Random dataset with at most `max_levels` protected levels and
/// `1..=max_rows` rows. Level skew varies from case to case.
pub fn random_rows(rng: &mut impl Rng, max_levels: usize, max_rows: usize) -> Vec<Row> {
    let n_levels = rng.gen_range(1..=max_levels);
    let n_rows = rng.gen_range(1..=max_rows);
    let names: Vec<String> = (0..n_levels)
        .map(|i| match rng.gen_range(0..4) {
            0 => format!("L{i:02}"),
            1 => format!("group {i}"),
            2 => format!("Grp/{i}"),
            _ => format!("ω{i}"),
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let weights: Vec<f64> = names.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
    let rates: Vec<f64> = names.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
    let total: f64 = weights.iter().sum();
    (0..n_rows)
        .map(|_| {
            let mut u = rng.gen_range(0.0..total);
            let mut idx = 0;
            while idx + 1 < weights.len() && u >= weights[idx] {
                u -= weights[idx];
                idx += 1;
            }
            let y = u8::from(rng.gen_bool(rates[idx]));
            (names[idx].clone(), y)
        })
        .collect()
}

/// Counts `row_weights[i] * col_weights[j]`, independent by construction.
pub fn independent_counts(row_weights: &[u64], col_weights: [u64; 2]) -> Vec<[u64; 2]> {
    row_weights
        .iter()
        .map(|&r| [r * col_weights[0], r * col_weights[1]])
        .collect()
}

pub fn shuffled(rows: &[Row], rng: &mut impl Rng) -> Vec<Row> {
    let mut out = rows.to_vec();
    out.shuffle(rng);
    out
}

pub fn to_pairs(rows: &[Row]) -> Vec<(&str, u8)> {
    rows.iter().map(|(l, t)| (l.as_str(), *t)).collect()
}
