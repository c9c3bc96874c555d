//! Ground-truth evaluation, calibration diagnostics, a Monte-Carlo check of
//! the batch-vs-remaining accuracy ordering, and hard-example analysis.
//!
//! Everything here other than [`calibration_bins`] consumes full ground
//! truth, which a deployed campaign does not have. These functions exist for
//! simulation harnesses and validation suites only; the acquisition loop
//! itself never calls them.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::dataset::{Dataset, Label, Labels};
use crate::error::{Error, Result};
use crate::partition::PartitionState;
use crate::prediction::Prediction;
use crate::predictor::{predict_proba, train};

/// System accuracy over the whole target set: observed samples count as
/// correct by definition (their labels were measured), inference samples
/// count when the prediction's top class matches the true label.
///
/// `predictions` covers the inference set in ascending-id order; `labels`
/// covers the full target set. Simulation-only: requires ground truth.
pub fn system_accuracy(
    state: &PartitionState,
    predictions: &[Prediction],
    labels: &Labels,
) -> Result<f64> {
    if predictions.len() != state.n_inf() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: state.n_inf(),
        });
    }
    if labels.len() != state.n_target() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: state.n_target(),
        });
    }
    let mut correct = 0usize;
    for (pred, id) in predictions.iter().zip(state.inf_ids()) {
        match labels.get(id) {
            Label::Class(y) => {
                if pred.top_class()? == y {
                    correct += 1;
                }
            }
            Label::Value(_) => {
                return Err(Error::PolicyMismatch {
                    expected: "classification labels",
                    got: "regression labels",
                })
            }
        }
    }
    Ok((state.n_obs() + correct) as f64 / state.n_target() as f64)
}

/// Fraction of predictions whose top class matches the paired label.
pub fn batch_accuracy(predictions: &[Prediction], labels: &[Label]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: labels.len(),
        });
    }
    let mut correct = 0usize;
    for (pred, label) in predictions.iter().zip(labels) {
        match label {
            Label::Class(y) => {
                if pred.top_class()? == *y {
                    correct += 1;
                }
            }
            Label::Value(_) => {
                return Err(Error::PolicyMismatch {
                    expected: "classification labels",
                    got: "regression labels",
                })
            }
        }
    }
    Ok(correct as f64 / predictions.len() as f64)
}

/// Mean squared error between point predictions and regression labels — the
/// regression counterpart of [`batch_accuracy`].
pub fn batch_mse(predicted: &[f64], labels: &[Label]) -> Result<f64> {
    if predicted.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if predicted.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: labels.len(),
        });
    }
    let mut sum = 0.0;
    for (p, label) in predicted.iter().zip(labels) {
        match label {
            Label::Value(y) => sum += (p - y) * (p - y),
            Label::Class(_) => {
                return Err(Error::PolicyMismatch {
                    expected: "regression labels",
                    got: "classification labels",
                })
            }
        }
    }
    Ok(sum / predicted.len() as f64)
}

/// One confidence bin: sample count, mean confidence, and accuracy.
/// `mean_confidence` and `accuracy` are `None` for empty bins — never 0 —
/// so monotonicity diagnostics can skip them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub count: usize,
    pub mean_confidence: Option<f64>,
    pub accuracy: Option<f64>,
}

/// Equal-width, right-closed confidence bins over `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    /// `n_bins + 1` edges: bin `i` covers `(edges[i], edges[i+1]]`, except
    /// bin 0 which also includes 0.
    pub bin_edges: Vec<f64>,
    pub bins: Vec<CalibrationBin>,
}

/// Bins `(confidence, correct)` pairs into `n_bins` equal-width right-closed
/// bins on `[0, 1]`: confidence 0 lands in bin 0, confidence 1 in the last
/// bin, and a confidence exactly on an interior edge belongs to the bin
/// below it.
pub fn calibration_bins(
    confidences: &[f64],
    correct: &[bool],
    n_bins: usize,
) -> Result<CalibrationReport> {
    if n_bins < 2 {
        return Err(Error::InvalidArgument(
            "calibration needs at least 2 bins".into(),
        ));
    }
    if confidences.len() != correct.len() {
        return Err(Error::LengthMismatch {
            left: confidences.len(),
            right: correct.len(),
        });
    }
    if confidences.iter().any(|c| !(0.0..=1.0).contains(c)) {
        return Err(Error::InvalidArgument(
            "confidences must lie in [0, 1]".into(),
        ));
    }
    let mut counts = alloc::vec![0usize; n_bins];
    let mut conf_sums = alloc::vec![0.0f64; n_bins];
    let mut correct_counts = alloc::vec![0usize; n_bins];
    for (&c, &ok) in confidences.iter().zip(correct) {
        let bin = if c == 0.0 {
            0
        } else {
            (libm::ceil(c * n_bins as f64) as usize)
                .saturating_sub(1)
                .min(n_bins - 1)
        };
        counts[bin] += 1;
        conf_sums[bin] += c;
        if ok {
            correct_counts[bin] += 1;
        }
    }
    let bin_edges = (0..=n_bins).map(|i| i as f64 / n_bins as f64).collect();
    let bins = (0..n_bins)
        .map(|i| CalibrationBin {
            count: counts[i],
            mean_confidence: (counts[i] > 0).then(|| conf_sums[i] / counts[i] as f64),
            accuracy: (counts[i] > 0).then(|| correct_counts[i] as f64 / counts[i] as f64),
        })
        .collect();
    Ok(CalibrationReport { bin_edges, bins })
}

/// Largest drop in accuracy between successive non-empty bins (empty bins
/// are skipped, not treated as zeros): `max(0, acc_low - acc_high)` maximized
/// over the pairs. 0 means the report is weakly calibrated at this bin
/// resolution. `None` when fewer than two bins are populated.
pub fn weak_calibration_violation(report: &CalibrationReport) -> Option<f64> {
    let accs: Vec<f64> = report.bins.iter().filter_map(|b| b.accuracy).collect();
    if accs.len() < 2 {
        return None;
    }
    let mut worst = 0.0f64;
    for pair in accs.windows(2) {
        worst = worst.max(pair[0] - pair[1]);
    }
    Some(worst.max(0.0))
}

/// Conditional-accuracy curve for the synthetic batch-ordering experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AccuracyCurve {
    /// `g(v) = v` — the calibrated case.
    Identity,
    /// `g(v) = c` — no relationship between confidence and accuracy.
    Constant(f64),
    /// `g(v) = 1 - v` — a deliberately anti-calibrated negative control.
    OneMinus,
}

impl AccuracyCurve {
    fn eval(&self, v: f64) -> f64 {
        match self {
            AccuracyCurve::Identity => v,
            AccuracyCurve::Constant(c) => *c,
            AccuracyCurve::OneMinus => 1.0 - v,
        }
    }
}

/// Synthetic population for [`validate_lemma1`]: `n` samples with
/// confidences drawn uniformly from `[confidence_low, confidence_high]` and
/// correctness drawn `Bernoulli(g(confidence))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticBatchSpec {
    pub n: usize,
    pub confidence_low: f64,
    pub confidence_high: f64,
    pub g: AccuracyCurve,
}

/// Trial means from the synthetic batch-ordering experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchOrderingOutcome {
    pub mean_batch_accuracy: f64,
    pub mean_remaining_accuracy: f64,
}

/// Monte-Carlo check that selecting the `n_b` *lowest*-confidence samples
/// yields a batch no more accurate than the remaining pool, provided
/// accuracy is non-decreasing in confidence.
///
/// Each trial draws `spec.n` confidences, draws per-sample correctness from
/// `g(confidence)`, takes the `n_b` lowest confidences (ties by index) as
/// the batch, and records batch vs remaining accuracy; means over `trials`
/// are returned. With a decreasing `g` the inequality flips — that curve is
/// accepted so callers can run the negative control.
pub fn validate_lemma1<R: Rng>(
    spec: &SyntheticBatchSpec,
    n_b: usize,
    trials: usize,
    rng: &mut R,
) -> Result<BatchOrderingOutcome> {
    if spec.n == 0 || n_b == 0 || trials == 0 {
        return Err(Error::InvalidArgument(
            "n, n_b, and trials must all be at least 1".into(),
        ));
    }
    if n_b >= spec.n {
        return Err(Error::InvalidArgument(
            "the batch must be smaller than the population".into(),
        ));
    }
    if !(0.0..=1.0).contains(&spec.confidence_low)
        || !(0.0..=1.0).contains(&spec.confidence_high)
        || spec.confidence_low > spec.confidence_high
    {
        return Err(Error::InvalidArgument(
            "confidence range must satisfy 0 <= low <= high <= 1".into(),
        ));
    }

    let mut batch_sum = 0.0;
    let mut remaining_sum = 0.0;
    let mut order: Vec<usize> = Vec::with_capacity(spec.n);
    for _ in 0..trials {
        let confidences: Vec<f64> = (0..spec.n)
            .map(|_| rng.gen_range(spec.confidence_low..=spec.confidence_high))
            .collect();
        let correct: Vec<bool> = confidences
            .iter()
            .map(|&v| rng.gen::<f64>() < spec.g.eval(v).clamp(0.0, 1.0))
            .collect();
        order.clear();
        order.extend(0..spec.n);
        order.sort_unstable_by(|&a, &b| confidences[a].total_cmp(&confidences[b]).then(a.cmp(&b)));
        let batch_correct = order[..n_b].iter().filter(|&&i| correct[i]).count();
        let remaining_correct = order[n_b..].iter().filter(|&&i| correct[i]).count();
        batch_sum += batch_correct as f64 / n_b as f64;
        remaining_sum += remaining_correct as f64 / (spec.n - n_b) as f64;
    }
    Ok(BatchOrderingOutcome {
        mean_batch_accuracy: batch_sum / trials as f64,
        mean_remaining_accuracy: remaining_sum / trials as f64,
    })
}

/// Flags samples that are systematically misclassified under cross-validated
/// retraining: `n_folds` models are trained, model `m` (seed `base_seed+m`)
/// on the complement of contiguous fold `m` with fold `m` as its validation
/// split; every sample is then evaluated by all models and flagged when at
/// least `n_folds - 1` of them get it wrong. Returns the flagged ids in
/// ascending order.
///
/// Evaluating with all models — including the one that trained on the
/// sample — is deliberate: it makes the flag conservative (such samples are
/// hard even for models that saw them).
pub fn flag_hard_examples(
    dataset: &Dataset,
    n_folds: usize,
    model_config: &ModelConfig,
    base_seed: u64,
) -> Result<Vec<usize>> {
    if n_folds < 2 {
        return Err(Error::InvalidArgument(
            "hard-example flagging needs at least 2 folds".into(),
        ));
    }
    let n = dataset.n_samples();
    if n < n_folds {
        return Err(Error::InvalidArgument(
            "dataset smaller than the fold count".into(),
        ));
    }
    let true_classes: Vec<usize> = match dataset.labels() {
        Labels::Classes { values, .. } => values.clone(),
        Labels::Values(_) => {
            return Err(Error::PolicyMismatch {
                expected: "classification labels",
                got: "regression labels",
            })
        }
    };

    let mut wrong_counts = alloc::vec![0usize; n];
    for m in 0..n_folds {
        let lo = m * n / n_folds;
        let hi = (m + 1) * n / n_folds;
        let val_ids: Vec<usize> = (lo..hi).collect();
        let train_ids: Vec<usize> = (0..lo).chain(hi..n).collect();
        let train_ds = dataset.subset(&train_ids)?;
        let val_ds = dataset.subset(&val_ids)?;
        let model = train(
            model_config,
            &train_ds,
            &val_ds,
            base_seed.wrapping_add(m as u64),
        )?;
        let preds = predict_proba(&model, dataset.features())?;
        for (i, pred) in preds.iter().enumerate() {
            if pred.top_class()? != true_classes[i] {
                wrong_counts[i] += 1;
            }
        }
    }
    Ok((0..n).filter(|&i| wrong_counts[i] >= n_folds - 1).collect())
}

/// Fraction of the hard set already acquired: `|obs ∩ hard| / |hard|`,
/// 0 when the hard set is empty. `hard_ids` is treated as a set of target
/// ids.
pub fn hard_set_fraction_acquired(state: &PartitionState, hard_ids: &[usize]) -> f64 {
    if hard_ids.is_empty() {
        return 0.0;
    }
    let mut observed = alloc::vec![false; state.n_target()];
    for &id in state.obs_ids() {
        observed[id] = true;
    }
    let acquired = hard_ids
        .iter()
        .filter(|&&id| id < observed.len() && observed[id])
        .count();
    acquired as f64 / hard_ids.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cls(probs: &[f64]) -> Prediction {
        Prediction::Classification {
            probs: probs.to_vec(),
        }
    }

    fn classes(values: &[usize], k: usize) -> Labels {
        Labels::Classes {
            values: values.to_vec(),
            n_classes: k,
        }
    }

    #[test]
    fn system_accuracy_counts_observed_as_correct() {
        // 4 targets, ids 1 and 3 observed; predictions for inference ids
        // {0, 2}: id 0 correct, id 2 wrong -> (2 + 1) / 4.
        let mut state = PartitionState::init(4).unwrap();
        state.transfer_batch(&[1, 3]).unwrap();
        let labels = classes(&[0, 1, 0, 1], 2);
        let preds = [cls(&[0.9, 0.1]), cls(&[0.2, 0.8])];
        let acc = system_accuracy(&state, &preds, &labels).unwrap();
        assert_eq!(acc, 0.75);
    }

    #[test]
    fn system_accuracy_everything_observed_is_one() {
        let mut state = PartitionState::init(3).unwrap();
        state.transfer_batch(&[0, 1, 2]).unwrap();
        let labels = classes(&[0, 1, 0], 2);
        assert_eq!(system_accuracy(&state, &[], &labels).unwrap(), 1.0);
    }

    #[test]
    fn system_accuracy_all_predictions_correct_is_one() {
        let state = PartitionState::init(2).unwrap();
        let labels = classes(&[0, 1], 2);
        let preds = [cls(&[0.9, 0.1]), cls(&[0.1, 0.9])];
        assert_eq!(system_accuracy(&state, &preds, &labels).unwrap(), 1.0);
    }

    #[test]
    fn system_accuracy_validates_lengths() {
        let state = PartitionState::init(2).unwrap();
        let labels = classes(&[0, 1], 2);
        assert!(matches!(
            system_accuracy(&state, &[cls(&[1.0, 0.0])], &labels),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn batch_accuracy_examples() {
        let preds: Vec<Prediction> = (0..10)
            .map(|i| {
                if i < 9 {
                    cls(&[0.9, 0.1])
                } else {
                    cls(&[0.1, 0.9])
                }
            })
            .collect();
        let labels = alloc::vec![Label::Class(0); 10];
        assert_eq!(batch_accuracy(&preds, &labels).unwrap(), 0.9);
        assert_eq!(batch_accuracy(&preds[..9], &labels[..9]).unwrap(), 1.0);
        assert!(matches!(batch_accuracy(&[], &[]), Err(Error::EmptyBatch)));
    }

    #[test]
    fn batch_mse_matches_hand_arithmetic() {
        let labels = [Label::Value(1.0), Label::Value(-1.0)];
        let mse = batch_mse(&[1.5, -2.0], &labels).unwrap();
        assert!((mse - (0.25 + 1.0) / 2.0).abs() < 1e-15);
        assert!(batch_mse(&[], &[]).is_err());
        assert!(batch_mse(&[1.0], &[Label::Class(0)]).is_err());
    }

    #[test]
    fn calibration_bins_place_confident_correct_samples_in_the_top_bin() {
        let confidences = alloc::vec![0.95; 7];
        let correct = alloc::vec![true; 7];
        let report = calibration_bins(&confidences, &correct, 10).unwrap();
        assert_eq!(report.bins[9].count, 7);
        assert_eq!(report.bins[9].accuracy, Some(1.0));
        assert_eq!(report.bins[..9].iter().map(|b| b.count).sum::<usize>(), 0);
        assert_eq!(report.bin_edges.len(), 11);
    }

    #[test]
    fn calibration_boundaries_are_right_closed() {
        // 1.0 -> last bin; 0.9 -> bin (0.8, 0.9]; 0.0 -> bin 0.
        let report = calibration_bins(&[1.0, 0.9, 0.0], &[true, true, false], 10).unwrap();
        assert_eq!(report.bins[9].count, 1);
        assert_eq!(report.bins[8].count, 1);
        assert_eq!(report.bins[0].count, 1);
    }

    #[test]
    fn calibration_rejects_one_bin_and_bad_inputs() {
        assert!(calibration_bins(&[0.5], &[true], 1).is_err());
        assert!(calibration_bins(&[0.5], &[], 10).is_err());
        assert!(calibration_bins(&[1.5], &[true], 10).is_err());
    }

    #[test]
    fn calibration_conserves_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let confidences: Vec<f64> = (0..500).map(|_| rng.gen::<f64>()).collect();
        let correct: Vec<bool> = (0..500).map(|_| rng.gen::<bool>()).collect();
        let report = calibration_bins(&confidences, &correct, 7).unwrap();
        assert_eq!(report.bins.iter().map(|b| b.count).sum::<usize>(), 500);
    }

    fn report_from_accuracies(accs: &[Option<f64>]) -> CalibrationReport {
        CalibrationReport {
            bin_edges: (0..=accs.len())
                .map(|i| i as f64 / accs.len() as f64)
                .collect(),
            bins: accs
                .iter()
                .map(|a| CalibrationBin {
                    count: if a.is_some() { 10 } else { 0 },
                    mean_confidence: a.map(|_| 0.5),
                    accuracy: *a,
                })
                .collect(),
        }
    }

    #[test]
    fn weak_violation_is_zero_for_monotone_accuracies() {
        let report = report_from_accuracies(&[Some(0.5), Some(0.7), Some(0.9)]);
        assert_eq!(weak_calibration_violation(&report), Some(0.0));
    }

    #[test]
    fn weak_violation_measures_the_largest_drop() {
        let report = report_from_accuracies(&[Some(0.9), Some(0.7)]);
        let v = weak_calibration_violation(&report).unwrap();
        assert!((v - 0.2).abs() < 1e-12);
        // Empty bins are skipped, not treated as zeros.
        let gappy = report_from_accuracies(&[Some(0.9), None, Some(0.7)]);
        let v = weak_calibration_violation(&gappy).unwrap();
        assert!((v - 0.2).abs() < 1e-12);
    }

    #[test]
    fn weak_violation_needs_two_populated_bins() {
        let report = report_from_accuracies(&[None, Some(0.8), None]);
        assert_eq!(weak_calibration_violation(&report), None);
    }

    #[test]
    fn lemma1_identity_curve_orders_batch_below_remaining() {
        let spec = SyntheticBatchSpec {
            n: 1000,
            confidence_low: 0.5,
            confidence_high: 1.0,
            g: AccuracyCurve::Identity,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let out = validate_lemma1(&spec, 100, 400, &mut rng).unwrap();
        // Closed-form means: lowest decile of U(0.5, 1) has mean confidence
        // 0.525; the remainder has mean 0.775.
        assert!((out.mean_batch_accuracy - 0.525).abs() < 0.015, "{out:?}");
        assert!(
            (out.mean_remaining_accuracy - 0.775).abs() < 0.015,
            "{out:?}"
        );
        assert!(out.mean_batch_accuracy <= out.mean_remaining_accuracy);
    }

    #[test]
    fn lemma1_constant_curve_shows_no_gap() {
        let spec = SyntheticBatchSpec {
            n: 1000,
            confidence_low: 0.5,
            confidence_high: 1.0,
            g: AccuracyCurve::Constant(0.7),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let out = validate_lemma1(&spec, 100, 400, &mut rng).unwrap();
        assert!(
            (out.mean_batch_accuracy - out.mean_remaining_accuracy).abs() < 0.01,
            "{out:?}"
        );
    }

    #[test]
    fn lemma1_decreasing_curve_flips_the_inequality() {
        let spec = SyntheticBatchSpec {
            n: 1000,
            confidence_low: 0.5,
            confidence_high: 1.0,
            g: AccuracyCurve::OneMinus,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let out = validate_lemma1(&spec, 100, 400, &mut rng).unwrap();
        assert!(
            out.mean_batch_accuracy > out.mean_remaining_accuracy + 0.1,
            "{out:?}"
        );
    }

    #[test]
    fn lemma1_rejects_degenerate_setups() {
        let spec = SyntheticBatchSpec {
            n: 10,
            confidence_low: 0.0,
            confidence_high: 1.0,
            g: AccuracyCurve::Identity,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(validate_lemma1(&spec, 10, 5, &mut rng).is_err());
        assert!(validate_lemma1(&spec, 0, 5, &mut rng).is_err());
    }

    fn blob_dataset_with_noise(
        n: usize,
        shuffled_fraction: f64,
        seed: u64,
    ) -> (Dataset, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut features = Vec::with_capacity(n * 2);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let class = i % 2;
            let cx = if class == 0 { -2.0 } else { 2.0 };
            features.push(cx + rng.gen_range(-0.9..0.9));
            features.push(rng.gen_range(-0.9..0.9));
            labels.push(class);
        }
        let n_shuffled = (n as f64 * shuffled_fraction) as usize;
        let mut shuffled_ids = Vec::new();
        for i in 0..n_shuffled {
            // Deterministic spread of corrupted ids; labels drawn uniformly.
            let id = i * n / n_shuffled.max(1);
            labels[id] = (rng.gen::<u32>() % 2) as usize;
            shuffled_ids.push(id);
        }
        (
            Dataset::from_classification(features, 2, labels, 2).unwrap(),
            shuffled_ids,
        )
    }

    fn tiny_config() -> ModelConfig {
        ModelConfig {
            n_hidden_layers: 1,
            hidden_size: 8,
            learning_rate: 0.05,
            grad_norm_clip: 5.0,
            dropout: 0.0,
            max_epochs: 40,
            train_batch_size: 32,
            early_stop_patience: 40,
            n_ensemble_members: 1,
        }
    }

    #[test]
    fn hard_examples_are_empty_on_clean_separable_data() {
        let (ds, _) = blob_dataset_with_noise(100, 0.0, 4);
        let hard = flag_hard_examples(&ds, 4, &tiny_config(), 7).unwrap();
        assert!(hard.is_empty(), "flagged {hard:?} on separable data");
    }

    #[test]
    fn hard_examples_concentrate_on_mislabeled_samples() {
        // 30% of labels redrawn uniformly; flagged ids should be mislabeled
        // ones (precision > 0.8). Samples whose redrawn label matches the
        // true class stay learnable, which hurts recall, not precision.
        let (ds, shuffled) = blob_dataset_with_noise(200, 0.3, 9);
        let hard = flag_hard_examples(&ds, 5, &tiny_config(), 11).unwrap();
        assert!(!hard.is_empty());
        let in_shuffled = hard.iter().filter(|id| shuffled.contains(id)).count();
        let precision = in_shuffled as f64 / hard.len() as f64;
        assert!(precision > 0.8, "precision {precision} over {hard:?}");
    }

    #[test]
    fn hard_example_preconditions() {
        let (ds, _) = blob_dataset_with_noise(10, 0.0, 4);
        assert!(flag_hard_examples(&ds, 1, &tiny_config(), 0).is_err());
        assert!(flag_hard_examples(&ds, 11, &tiny_config(), 0).is_err());
    }

    #[test]
    fn hard_set_fraction_examples() {
        let mut state = PartitionState::init(6).unwrap();
        state.transfer_batch(&[0, 1, 2]).unwrap();
        assert_eq!(hard_set_fraction_acquired(&state, &[0, 1]), 1.0);
        assert_eq!(hard_set_fraction_acquired(&state, &[4, 5]), 0.0);
        assert_eq!(hard_set_fraction_acquired(&state, &[0, 4]), 0.5);
        assert_eq!(hard_set_fraction_acquired(&state, &[]), 0.0);
    }
}
