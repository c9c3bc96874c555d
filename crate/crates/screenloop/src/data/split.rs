//! Target/validation/test splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use screenloop_core::Dataset;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

/// Either fractional sizes resolved over a seeded shuffle, or explicit id
/// lists. Explicit lists must be disjoint but need not be exhaustive, so a
/// large source file can be subsampled by listing only the ids wanted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SplitSpec {
    Fractions {
        target_fraction: f64,
        val_fraction: f64,
        test_fraction: f64,
        split_seed: u64,
    },
    Explicit {
        target: Vec<usize>,
        val: Vec<usize>,
        test: Vec<usize>,
    },
}

/// The three split datasets. `test` is absent when its share is empty.
#[derive(Debug, Clone)]
pub struct SplitDatasets {
    pub target: Dataset,
    pub val: Dataset,
    pub test: Option<Dataset>,
}

/// Splits as `spec` directs. Fraction mode shuffles ids `0..n` with the split seed
/// and cuts at cumulative-rounded boundaries, so the three parts are
/// disjoint and exhaustive; corruption transforms should already have been
/// applied so all splits share the corrupted distribution.
pub fn split_dataset(dataset: &Dataset, spec: &SplitSpec) -> AppResult<SplitDatasets> {
    let n = dataset.n_samples();
    let (target_ids, val_ids, test_ids): (Vec<usize>, Vec<usize>, Vec<usize>) = match spec {
        SplitSpec::Fractions {
            target_fraction,
            val_fraction,
            test_fraction,
            split_seed,
        } => {
            let fractions = [*target_fraction, *val_fraction, *test_fraction];
            if fractions.iter().any(|f| !f.is_finite() || *f < 0.0) {
                return Err(AppError::usage("split: fractions must be non-negative"));
            }
            let sum: f64 = fractions.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(AppError::usage(format!(
                    "split: fractions sum to {sum}, expected 1"
                )));
            }
            let mut ids: Vec<usize> = (0..n).collect();
            ids.shuffle(&mut ChaCha8Rng::seed_from_u64(*split_seed));
            // Cumulative rounding keeps the three sizes summing to n exactly.
            let b1 = (n as f64 * target_fraction).round() as usize;
            let b2 = (n as f64 * (target_fraction + val_fraction)).round() as usize;
            (ids[..b1].to_vec(), ids[b1..b2].to_vec(), ids[b2..].to_vec())
        }
        SplitSpec::Explicit { target, val, test } => {
            let mut seen = std::collections::BTreeSet::new();
            for &id in target.iter().chain(val).chain(test) {
                if id >= n {
                    return Err(AppError::usage(format!(
                        "split: id {id} out of range for {n} samples"
                    )));
                }
                if !seen.insert(id) {
                    return Err(AppError::usage(format!(
                        "split: id {id} appears in more than one part"
                    )));
                }
            }
            (target.clone(), val.clone(), test.clone())
        }
    };

    if target_ids.is_empty() {
        return Err(AppError::usage("split: target part is empty"));
    }
    if val_ids.is_empty() {
        return Err(AppError::usage(
            "split: validation part is empty (early stopping needs one)",
        ));
    }
    Ok(SplitDatasets {
        target: dataset.subset(&target_ids)?,
        val: dataset.subset(&val_ids)?,
        test: if test_ids.is_empty() {
            None
        } else {
            Some(dataset.subset(&test_ids)?)
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use screenloop_core::Label;

    fn dataset(n: usize) -> Dataset {
        let features: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
        Dataset::from_classification(features, 1, labels, 2).unwrap()
    }

    fn spec(t: f64, v: f64, te: f64, seed: u64) -> SplitSpec {
        SplitSpec::Fractions {
            target_fraction: t,
            val_fraction: v,
            test_fraction: te,
            split_seed: seed,
        }
    }

    #[test]
    fn fraction_boundaries_round_cumulatively() {
        let parts = split_dataset(&dataset(1000), &spec(0.8, 0.05, 0.15, 5)).unwrap();
        assert_eq!(parts.target.n_samples(), 800);
        assert_eq!(parts.val.n_samples(), 50);
        assert_eq!(parts.test.unwrap().n_samples(), 150);
    }

    #[test]
    fn fraction_splits_partition_the_ids_exactly() {
        let ds = dataset(101);
        let parts = split_dataset(&ds, &spec(0.6, 0.2, 0.2, 9)).unwrap();
        // Feature values are the original ids; collect them back.
        let mut all: Vec<i64> = parts
            .target
            .features()
            .iter()
            .chain(parts.val.features())
            .chain(parts.test.as_ref().unwrap().features())
            .map(|&v| v as i64)
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..101).collect::<Vec<i64>>());
        // Replays are identical; a different seed shuffles differently.
        let again = split_dataset(&ds, &spec(0.6, 0.2, 0.2, 9)).unwrap();
        assert_eq!(again.target.features(), parts.target.features());
        let other = split_dataset(&ds, &spec(0.6, 0.2, 0.2, 10)).unwrap();
        assert_ne!(other.target.features(), parts.target.features());
    }

    #[test]
    fn labels_travel_with_their_samples() {
        let ds = dataset(40);
        let parts = split_dataset(&ds, &spec(0.5, 0.25, 0.25, 1)).unwrap();
        for part in [&parts.target, &parts.val] {
            for id in 0..part.n_samples() {
                let original = part.feature_row(id)[0] as usize;
                assert_eq!(part.label(id), Label::Class(original % 2));
            }
        }
    }

    #[test]
    fn bad_fractions_and_overlapping_lists_are_usage_errors() {
        let ds = dataset(10);
        let err = split_dataset(&ds, &spec(0.5, 0.2, 0.2, 0)).unwrap_err();
        assert_eq!(err.exit_code(), 2);

        let err = split_dataset(
            &ds,
            &SplitSpec::Explicit {
                target: vec![0, 1, 2],
                val: vec![2, 3],
                test: vec![],
            },
        )
        .unwrap_err();
        assert!(err.to_string().contains("more than one part"), "{err}");
    }

    #[test]
    fn explicit_lists_may_subsample() {
        let ds = dataset(50);
        let parts = split_dataset(
            &ds,
            &SplitSpec::Explicit {
                target: (0..10).collect(),
                val: (10..15).collect(),
                test: vec![],
            },
        )
        .unwrap();
        assert_eq!(parts.target.n_samples(), 10);
        assert_eq!(parts.val.n_samples(), 5);
        assert!(parts.test.is_none());
    }

    #[test]
    fn empty_validation_part_is_rejected() {
        // 4 samples at (0.75, 0, 0.25): the validation share rounds to zero.
        let err = split_dataset(&dataset(4), &spec(0.75, 0.0, 0.25, 0)).unwrap_err();
        assert!(
            err.to_string().contains("validation part is empty"),
            "{err}"
        );
    }
}
