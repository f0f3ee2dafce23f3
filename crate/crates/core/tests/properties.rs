mod common;

use biasgauge::dependence::{effect_size_w_squared, summarize};
use biasgauge::probability::Conditional;
use biasgauge::{
    chi_square, classify_magnitude, Contingency, Dataset, ExactContingency, ExactTables, Magnitude,
    Tables,
};
use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn rows_strategy() -> impl Strategy<Value = Vec<Row>> {
    prop::collection::vec((0usize..12, 0u8..2), 1..400).prop_map(|v| {
        v.into_iter()
            .map(|(l, t)| (format!("level-{l:02}"), t))
            .collect()
    })
}

fn counts_strategy() -> impl Strategy<Value = Vec<[u64; 2]>> {
    prop::collection::vec((1u64..60, 1u64..60), 1..12)
        .prop_map(|v| v.into_iter().map(|(a, b)| [a, b]).collect())
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("L{i:02}")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn counting_oracle_exact(rows in rows_strategy()) {
        let ds = Dataset::from_labels("p", &to_pairs(&rows)).unwrap();
        let exact = ExactTables::from_dataset(&ds);
        let float = Tables::from_dataset(&ds);
        let oracle = oracle_tables(&rows);
        prop_assert_eq!(exact.protected_levels(), &oracle.levels[..]);
        for y in 0..2 {
            prop_assert_eq!(&exact.prior_target()[y], &oracle.prior_target[y].exact());
            prop_assert_eq!(float.prior_target()[y], oracle.prior_target[y].float());
        }
        for a in 0..oracle.levels.len() {
            prop_assert_eq!(&exact.prior_protected()[a], &oracle.prior_protected[a].exact());
            prop_assert_eq!(float.prior_protected()[a], oracle.prior_protected[a].float());
            for y in 0..2 {
                prop_assert_eq!(&exact.joint()[a][y], &oracle.joint[a][y].exact());
                prop_assert_eq!(float.joint()[a][y], oracle.joint[a][y].float());
                let expect = |r: Option<Ratio>| r.map(|r| r.float());
                prop_assert_eq!(
                    float.target_given_protected()[a][y].value().copied(),
                    expect(oracle.target_given_protected[a][y])
                );
                prop_assert_eq!(
                    float.protected_given_target()[a][y].value().copied(),
                    expect(oracle.protected_given_target[a][y])
                );
            }
        }
    }

    #[test]
    fn partition_and_bayes_identities(rows in rows_strategy()) {
        let ds = Dataset::from_labels("p", &to_pairs(&rows)).unwrap();
        let t = Tables::from_dataset(&ds);
        prop_assert!((t.prior_target().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!((t.prior_protected().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!((t.joint().iter().flatten().sum::<f64>() - 1.0).abs() <= 1e-12);
        for a in 0..t.protected_levels().len() {
            let pa = t.prior_protected()[a];
            let row: f64 = t.target_given_protected()[a].iter().filter_map(|c| c.value()).sum();
            prop_assert!((row - 1.0).abs() <= 1e-12);
            for y in 0..2 {
                let py = t.prior_target()[y];
                let j = t.joint()[a][y];
                prop_assert!((0.0..=1.0).contains(&j));
                let y_given_a = *t.target_given_protected()[a][y].value().unwrap();
                if let Conditional::Defined(a_given_y) = t.protected_given_target()[a][y] {
                    prop_assert!((a_given_y * py - y_given_a * pa).abs() <= 1e-12);
                    prop_assert!((a_given_y * py - j).abs() <= 1e-12);
                }
                prop_assert!((y_given_a * pa - j).abs() <= 1e-12);
            }
        }
        for y in 0..2 {
            if t.prior_target()[y] > 0.0 {
                let col: f64 = t.protected_given_target().iter().filter_map(|c| c[y].value()).sum();
                prop_assert!((col - 1.0).abs() <= 1e-12);
            }
        }
        let total = t.total_probability_target();
        for (total, prior) in total.iter().zip(t.prior_target()) {
            prop_assert!((total - prior).abs() <= 1e-12);
        }
        for (direct, bayes) in t.protected_given_target().iter().zip(t.bayes_protected_given_target()) {
            for y in 0..2 {
                match (direct[y].value(), bayes[y].value()) {
                    (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-12),
                    (None, None) => {}
                    other => prop_assert!(false, "definedness differs: {:?}", other),
                }
            }
        }
    }

    #[test]
    fn chi_square_matches_cell_oracle(counts in counts_strategy()) {
        let oracle = oracle_chi_square(&counts).unwrap();
        let exact = ExactContingency::from_counts(names(counts.len()), counts.clone()).unwrap();
        prop_assert_eq!(chi_square(&exact), oracle.clone());
        let float = Contingency::from_counts(names(counts.len()), counts.clone()).unwrap();
        let oracle_f = biasgauge::Scalar::to_f64_lossy(&oracle);
        prop_assert!(rel_close(chi_square(&float), oracle_f, 1e-9));
    }

    #[test]
    fn coefficient_effect_size_identity(counts in counts_strategy()) {
        let t = Contingency::from_counts(names(counts.len()), counts).unwrap();
        let s = summarize(&t);
        let w = s.effect_size_w;
        let via_w = (w * w / (w * w + 1.0)).sqrt();
        prop_assert!(rel_close(s.contingency_coefficient, via_w, 1e-9)
            || (s.contingency_coefficient == 0.0 && w == 0.0));
        let exact = ExactContingency::from_counts(t.levels().to_vec(), t.observed().to_vec()).unwrap();
        let n = rat(t.n(), 1);
        prop_assert_eq!(effect_size_w_squared(&exact), chi_square(&exact) / n);
    }

    #[test]
    fn scaling_counts(counts in counts_strategy(), k in 2u64..20) {
        let scaled: Vec<[u64; 2]> = counts.iter().map(|c| [c[0] * k, c[1] * k]).collect();
        let a = summarize(&Contingency::from_counts(names(counts.len()), counts).unwrap());
        let b = summarize(&Contingency::from_counts(names(scaled.len()), scaled).unwrap());
        prop_assert!((a.effect_size_w - b.effect_size_w).abs() <= 1e-9);
        prop_assert!(rel_close(b.chi_square, a.chi_square * k as f64, 1e-9)
            || (a.chi_square.abs() < 1e-12 && b.chi_square.abs() < 1e-9));
    }

    #[test]
    fn independent_tables_have_zero_association(
        rows in prop::collection::vec(1u64..30, 1..12),
        cols in (1u64..30, 1u64..30),
    ) {
        let counts = independent_counts(&rows, [cols.0, cols.1]);
        let t = Contingency::from_counts(names(counts.len()), counts.clone()).unwrap();
        prop_assert!(t.is_independent());
        prop_assert_eq!(chi_square(&t), 0.0);
        prop_assert_eq!(summarize(&t).effect_size_w, 0.0);
        prop_assert_eq!(classify_magnitude(&0.0f64), Magnitude::VerySmall);
    }

    #[test]
    fn row_order_is_irrelevant(rows in rows_strategy(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let other = shuffled(&rows, &mut rng);
        let a = Dataset::from_labels("p", &to_pairs(&rows)).unwrap();
        let b = Dataset::from_labels("p", &to_pairs(&other)).unwrap();
        prop_assert_eq!(a.protected_levels(), b.protected_levels());
        prop_assert_eq!(Tables::from_dataset(&a), Tables::from_dataset(&b));
    }

    #[test]
    fn magnitude_is_monotone(a in 0.0f64..2.0, b in 0.0f64..2.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(classify_magnitude(&lo) <= classify_magnitude(&hi));
    }
}

#[test]
fn dependence_examples_in_exact_arithmetic() {
    // independence in distribution: observed equals expected
    let t =
        ExactContingency::from_counts(names(3), independent_counts(&[1, 2, 3], [4, 5])).unwrap();
    assert!(t.is_independent());
    assert_eq!(chi_square(&t), rat(0, 1));
}
