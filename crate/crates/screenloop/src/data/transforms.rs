//! Dataset corruption transforms, applied before splitting so every split
//! sees the same corrupted world.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use screenloop_core::{AuxColumn, Dataset, Labels};

use crate::error::{AppError, AppResult};

/// Clones `dataset` with new contents, preserving whatever is not replaced.
fn rebuild(dataset: &Dataset, features: Vec<f64>, labels: Option<Labels>) -> AppResult<Dataset> {
    let labels = labels.unwrap_or_else(|| dataset.labels().clone());
    let mut out = match labels {
        Labels::Classes { values, n_classes } => {
            Dataset::from_classification(features, dataset.n_features(), values, n_classes)
        }
        Labels::Values(values) => Dataset::from_regression(features, dataset.n_features(), values),
    }
    .map_err(|e| AppError::runtime(format!("transform: {e}")))?;
    let names: Vec<String> = dataset.aux_names().map(str::to_string).collect();
    for name in names {
        let col = match dataset.aux_bits(&name) {
            Ok(bits) => AuxColumn::Bits(bits.to_vec()),
            Err(_) => AuxColumn::Real(dataset.aux_real(&name)?.to_vec()),
        };
        out = out.with_aux(&name, col)?;
    }
    Ok(out)
}

/// Zeroes every pixel row with index `>= ceil(image_height * keep_fraction)`,
/// keeping the feature width constant (the cropped region goes blank rather
/// than shrinking the input).
pub fn crop_bottom(
    dataset: &Dataset,
    image_height: usize,
    image_width: usize,
    keep_fraction: f64,
) -> AppResult<Dataset> {
    if image_height * image_width != dataset.n_features() {
        return Err(AppError::runtime(format!(
            "crop: {image_height}x{image_width} does not match {} features",
            dataset.n_features()
        )));
    }
    if !(keep_fraction.is_finite() && 0.0 < keep_fraction && keep_fraction <= 1.0) {
        return Err(AppError::usage(format!(
            "crop: keep_fraction must be in (0, 1], got {keep_fraction}"
        )));
    }
    let keep_rows = (image_height as f64 * keep_fraction).ceil() as usize;
    let mut features = dataset.features().to_vec();
    for sample in 0..dataset.n_samples() {
        let base = sample * dataset.n_features();
        for row in keep_rows..image_height {
            let at = base + row * image_width;
            features[at..at + image_width].fill(0.0);
        }
    }
    rebuild(dataset, features, None)
}

/// Replaces the label of every sample whose class is in `class_set` with a
/// uniformly drawn class over all `K` classes (a corrupted sample may keep
/// its original label with probability `1/K`). Seeded and deterministic;
/// samples outside `class_set` are untouched.
pub fn shuffle_labels(dataset: &Dataset, class_set: &[usize], seed: u64) -> AppResult<Dataset> {
    let Labels::Classes { values, n_classes } = dataset.labels() else {
        return Err(AppError::runtime(
            "shuffle_labels: dataset has regression targets, not classes",
        ));
    };
    let n_classes = *n_classes;
    if let Some(&bad) = class_set.iter().find(|&&c| c >= n_classes) {
        return Err(AppError::usage(format!(
            "shuffle_labels: class {bad} out of range for {n_classes} classes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shuffled: Vec<usize> = values
        .iter()
        .map(|&label| {
            if class_set.contains(&label) {
                rng.gen_range(0..n_classes)
            } else {
                label
            }
        })
        .collect();
    rebuild(
        dataset,
        dataset.features().to_vec(),
        Some(Labels::Classes {
            values: shuffled,
            n_classes,
        }),
    )
}

/// Converts a regression dataset into a balanced two-class dataset by
/// thresholding its targets at the median (see [`discretize_median`]).
pub fn discretize_median_dataset(dataset: &Dataset) -> AppResult<Dataset> {
    let Labels::Values(values) = dataset.labels() else {
        return Err(AppError::runtime(
            "discretize_median: dataset already has class labels",
        ));
    };
    let classes = discretize_median(values)?;
    rebuild(
        dataset,
        dataset.features().to_vec(),
        Some(Labels::Classes {
            values: classes,
            n_classes: 2,
        }),
    )
}

/// Thresholds real values at their median into two classes: class 1 iff
/// strictly above the median, so ties go to class 0 deterministically.
pub fn discretize_median(values: &[f64]) -> AppResult<Vec<usize>> {
    if values.len() < 2 {
        return Err(AppError::runtime(
            "discretize_median: need at least 2 values",
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(AppError::runtime(
            "discretize_median: values must be finite",
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    Ok(values.iter().map(|&v| usize::from(v > median)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use screenloop_core::Label;

    fn image_dataset(n: usize, height: usize, width: usize) -> Dataset {
        let features: Vec<f64> = (0..n * height * width)
            .map(|i| (i % 7) as f64 / 7.0 + 0.01)
            .collect();
        let labels: Vec<usize> = (0..n).map(|i| i % 10).collect();
        Dataset::from_classification(features, height * width, labels, 10).unwrap()
    }

    #[test]
    fn cropping_keeps_the_declared_rows_and_zeroes_the_rest() {
        let ds = image_dataset(2, 28, 28);
        let cropped = crop_bottom(&ds, 28, 28, 1.0 / 3.0).unwrap();
        assert_eq!(cropped.n_features(), 784);
        for sample in 0..2 {
            let row = |r: usize| &cropped.feature_row(sample)[r * 28..(r + 1) * 28];
            // ceil(28/3) = 10: rows 0..9 kept, rows 10..27 zeroed.
            assert!(row(9).iter().any(|&v| v != 0.0));
            for r in 10..28 {
                assert!(row(r).iter().all(|&v| v == 0.0));
            }
        }
        // Idempotent and identity at keep_fraction = 1.
        let twice = crop_bottom(&cropped, 28, 28, 1.0 / 3.0).unwrap();
        assert_eq!(twice, cropped);
        assert_eq!(crop_bottom(&ds, 28, 28, 1.0).unwrap(), ds);
    }

    #[test]
    fn cropping_rejects_mismatched_dimensions() {
        let ds = image_dataset(1, 4, 4);
        assert!(crop_bottom(&ds, 28, 28, 0.5).is_err());
    }

    #[test]
    fn shuffling_touches_only_the_chosen_classes() {
        let ds = image_dataset(200, 4, 4);
        let out = shuffle_labels(&ds, &[6, 8, 9], 11).unwrap();
        for id in 0..200 {
            let (Label::Class(before), Label::Class(after)) = (ds.label(id), out.label(id)) else {
                unreachable!()
            };
            if ![6, 8, 9].contains(&before) {
                assert_eq!(before, after);
            }
        }
        assert_eq!(out.features(), ds.features());
        // Deterministic for a fixed seed; empty class set is the identity.
        assert_eq!(shuffle_labels(&ds, &[6, 8, 9], 11).unwrap(), out);
        assert_eq!(shuffle_labels(&ds, &[], 11).unwrap(), ds);
    }

    #[test]
    fn shuffling_all_classes_keeps_the_original_a_tenth_of_the_time() {
        let n = 100_000;
        let labels: Vec<usize> = (0..n).map(|i| i % 10).collect();
        let ds = Dataset::from_classification(vec![0.5; n], 1, labels, 10).unwrap();
        let out = shuffle_labels(&ds, &(0..10).collect::<Vec<_>>(), 3).unwrap();
        let kept = (0..n).filter(|&id| ds.label(id) == out.label(id)).count();
        let fraction = kept as f64 / n as f64;
        assert!(
            (fraction - 0.1).abs() < 0.01,
            "kept fraction {fraction} should be ~0.1"
        );
    }

    #[test]
    fn median_discretization_follows_the_strict_rule() {
        assert_eq!(
            discretize_median(&[1.0, 2.0, 3.0, 4.0]).unwrap(),
            vec![0, 0, 1, 1]
        );
        assert_eq!(discretize_median(&[5.0, 1.0, 9.0]).unwrap(), vec![0, 0, 1]);
        assert_eq!(discretize_median(&[2.0, 2.0, 2.0]).unwrap(), vec![0, 0, 0]);
        assert!(discretize_median(&[1.0]).is_err());
    }
}
