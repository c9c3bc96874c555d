//! The campaign loop: train → predict → select → transfer → label → stop.
//!
//! Each step retrains the predictor from scratch on the current observation
//! set (step 0 skips training and scores with a uniform predictor unless the
//! cold-start mode says otherwise), predicts the whole inference set, selects
//! up to `batch_size` candidates under the acquisition policy, moves them to
//! the observation set, fetches their labels from the oracle, and evaluates
//! the stopping rule on post-transfer set sizes.
//!
//! The oracle is consulted exactly once per acquired sample and never for
//! inference-set samples. Ground-truth diagnostics (true system accuracy,
//! inference accuracy, per-prediction correctness) are filled in by a
//! post-loop pass that reads the target labels directly — they are
//! simulation-only numbers, and keeping them out of the loop makes the
//! oracle-call economy auditable from the log itself.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::acquisition::{
    score_bald, score_fixed_order, score_least_confidence, score_qbc_variance, score_random,
    score_tanimoto_diversity, select_batch, ScoredCandidates,
};
use crate::config::{AcquisitionPolicy, CampaignConfig, ColdStart, StoppingRule};
use crate::dataset::{Dataset, Fingerprint, Label, Labels};
use crate::error::{Error, Result};
use crate::metrics::{batch_accuracy, batch_mse};
use crate::partition::PartitionState;
use crate::prediction::Prediction;
use crate::predictor::{predict_proba, predict_regression, train_ensemble, Model};
use crate::seedmix::{mix_seed, STREAM_ACQUIRE, STREAM_COLD_START, STREAM_TRAIN};
use crate::stopping::{
    should_stop_chernoff, should_stop_naive, should_stop_regression, StopDecision, StopReason,
};

/// Supplies the true label for a target id — the stand-in for actually
/// running the experiment on that sample. Implementations may fail (a lost
/// sample, a broken assay); the engine then aborts with a partial log.
pub trait LabelOracle {
    fn label(&mut self, id: usize) -> Result<Label>;
}

/// A [`LabelOracle`] that reads from a pre-labeled dataset and counts how
/// often it was consulted — the counter is the audit hook for the
/// one-call-per-acquired-sample guarantee.
pub struct DatasetOracle<'a> {
    labels: &'a Labels,
    calls: usize,
}

impl<'a> DatasetOracle<'a> {
    pub fn new(labels: &'a Labels) -> Self {
        DatasetOracle { labels, calls: 0 }
    }

    pub fn calls(&self) -> usize {
        self.calls
    }
}

impl LabelOracle for DatasetOracle<'_> {
    fn label(&mut self, id: usize) -> Result<Label> {
        if id >= self.labels.len() {
            return Err(Error::OracleFailure { id });
        }
        self.calls += 1;
        Ok(self.labels.get(id))
    }
}

/// One audit row per acquisition step. Sizes are post-transfer. In
/// regression mode `batch_accuracy`, `inference_accuracy`, and
/// `test_accuracy` carry mean squared errors instead of accuracies, and
/// `true_system_accuracy` is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub n_obs: usize,
    pub n_inf: usize,
    /// Accuracy (or MSE) of this step's model on the batch it just acquired.
    pub batch_accuracy: f64,
    /// Confidence lower bound on the batch accuracy; absent for stopping
    /// rules that do not compute one.
    pub alpha: Option<f64>,
    pub est_system_accuracy: Option<f64>,
    /// Simulation-only, filled after the loop.
    pub true_system_accuracy: Option<f64>,
    /// Accuracy (or MSE) on the remaining inference set; simulation-only,
    /// absent when the inference set is empty.
    pub inference_accuracy: Option<f64>,
    /// Accuracy (or MSE) on the held-out test set, when one is supplied.
    pub test_accuracy: Option<f64>,
    pub stopped: bool,
}

/// This step's model output for one sample that stayed in the inference set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepPrediction {
    Classification {
        id: usize,
        class: usize,
        confidence: f64,
        /// Simulation-only, filled after the loop.
        correct: Option<bool>,
    },
    Regression {
        id: usize,
        mean: f64,
        variance: f64,
    },
}

impl StepPrediction {
    pub fn id(&self) -> usize {
        match self {
            StepPrediction::Classification { id, .. } => *id,
            StepPrediction::Regression { id, .. } => *id,
        }
    }
}

/// Where a hybrid-output label came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSource {
    Observed,
    Predicted,
}

/// One row of the campaign's final output: a label for every target id,
/// measured where acquired and predicted everywhere else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridEntry {
    pub id: usize,
    pub label: Label,
    pub source: LabelSource,
}

/// Complete, replayable record of one campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignLog {
    pub config: CampaignConfig,
    pub n_target: usize,
    pub records: Vec<StepRecord>,
    /// Step index at which the stopping rule fired (threshold met or
    /// inference exhausted); `None` when the run was cut off by `max_steps`
    /// or aborted.
    pub stopping_time: Option<usize>,
    pub stop_reason: StopReason,
    /// Ids acquired at each step, in selection order.
    pub acquired: Vec<Vec<usize>>,
    /// Per step: this step's predictions for every sample still in the
    /// inference set after the transfer, ascending by id.
    pub predictions: Vec<Vec<StepPrediction>>,
    /// One label per target id, ascending: observed ∪ predicted.
    pub hybrid: Vec<HybridEntry>,
    pub oracle_calls: usize,
    /// `Some(reason)` when the campaign aborted (oracle failure) and the log
    /// holds only the steps completed before the failure.
    pub incomplete: Option<String>,
}

/// This step's trained predictor (absent on a uniform cold start).
enum StepModel {
    Uniform,
    Single(Model),
    Ensemble(Vec<Model>),
}

/// Predictions for the current inference candidates, in candidate order.
struct InfOutputs {
    /// Classification: combined (ensemble-mean) class probabilities.
    combined: Option<Vec<Prediction>>,
    /// Classification with an ensemble: per-member probabilities.
    members: Option<Vec<Vec<Prediction>>>,
    /// Regression: ensemble means and population variances.
    reg_means: Option<Vec<f64>>,
    reg_vars: Option<Vec<f64>>,
}

fn policy_needs_classification(policy: &AcquisitionPolicy) -> Option<bool> {
    match policy {
        AcquisitionPolicy::LeastConfidence | AcquisitionPolicy::Bald => Some(true),
        AcquisitionPolicy::QbcVariance => Some(false),
        AcquisitionPolicy::Random
        | AcquisitionPolicy::FixedOrder { .. }
        | AcquisitionPolicy::TanimotoDiversity { .. } => None,
    }
}

fn check_split_congruence(name: &'static str, split: &Dataset, target: &Dataset) -> Result<()> {
    if split.n_features() != target.n_features() {
        return Err(Error::DimensionMismatch {
            got: split.n_features(),
            expected: target.n_features(),
        });
    }
    if split.is_classification() != target.is_classification()
        || split.n_classes() != target.n_classes()
    {
        return Err(Error::PolicyMismatch {
            expected: "splits sharing the target's task",
            got: name,
        });
    }
    Ok(())
}

/// Uniform-predictor outputs for the cold start: equal class probabilities,
/// or zero-mean zero-variance regression outputs.
fn uniform_outputs(n: usize, classification: Option<usize>, ensemble: usize) -> InfOutputs {
    match classification {
        Some(k) => {
            let probs = alloc::vec![1.0 / k as f64; k];
            let combined: Vec<Prediction> = (0..n)
                .map(|_| Prediction::Classification {
                    probs: probs.clone(),
                })
                .collect();
            let members = (ensemble > 1).then(|| alloc::vec![combined.clone(); ensemble]);
            InfOutputs {
                combined: Some(combined),
                members,
                reg_means: None,
                reg_vars: None,
            }
        }
        None => InfOutputs {
            combined: None,
            members: None,
            reg_means: Some(alloc::vec![0.0; n]),
            reg_vars: Some(alloc::vec![0.0; n]),
        },
    }
}

/// Mean class probabilities across ensemble members.
fn combine_members(members: &[Vec<Prediction>]) -> Result<Vec<Prediction>> {
    let n = members[0].len();
    let m = members.len() as f64;
    let mut combined = Vec::with_capacity(n);
    for i in 0..n {
        let mut mean: Vec<f64> = match &members[0][i] {
            Prediction::Classification { probs } => alloc::vec![0.0; probs.len()],
            Prediction::Regression { .. } => {
                return Err(Error::PolicyMismatch {
                    expected: "classification predictions",
                    got: "regression predictions",
                })
            }
        };
        for member in members {
            if let Prediction::Classification { probs } = &member[i] {
                for (acc, &p) in mean.iter_mut().zip(probs) {
                    *acc += p;
                }
            }
        }
        for acc in &mut mean {
            *acc /= m;
        }
        combined.push(Prediction::Classification { probs: mean });
    }
    Ok(combined)
}

/// Runs one campaign. Deterministic: a fixed `(config, data)` pair yields a
/// byte-identical log on replay.
pub fn run_campaign(
    config: &CampaignConfig,
    target: &Dataset,
    val: &Dataset,
    test: Option<&Dataset>,
    oracle: &mut dyn LabelOracle,
) -> Result<CampaignLog> {
    config.validate()?;

    // --- Pre-flight: policy/task/stopping compatibility. ---
    let classification = target.is_classification();
    if let Some(needs_cls) = policy_needs_classification(&config.policy) {
        if needs_cls != classification {
            return Err(Error::PolicyMismatch {
                expected: if needs_cls {
                    "a classification target set"
                } else {
                    "a regression target set"
                },
                got: config.policy.name(),
            });
        }
    }
    match config.stopping {
        StoppingRule::Chernoff | StoppingRule::Naive { .. } => {
            if !classification {
                return Err(Error::PolicyMismatch {
                    expected: "a classification target set",
                    got: "an accuracy-based stopping rule on regression labels",
                });
            }
        }
        StoppingRule::MseThreshold { .. } => {
            if classification {
                return Err(Error::PolicyMismatch {
                    expected: "a regression target set",
                    got: "an error-based stopping rule on classification labels",
                });
            }
        }
    }
    let n_classes = target.n_classes();
    if classification && n_classes.unwrap_or(0) < 2 {
        return Err(Error::InvalidArgument(
            "classification needs at least 2 classes".into(),
        ));
    }
    check_split_congruence("validation split", val, target)?;
    if let Some(test) = test {
        check_split_congruence("test split", test, target)?;
    }

    // Static per-id scores and fingerprints resolve (and fail) up front.
    let static_scores: Option<Vec<f64>> = match &config.policy {
        AcquisitionPolicy::FixedOrder { key, direction } => {
            Some(score_fixed_order(target, key, *direction)?)
        }
        _ => None,
    };
    let fingerprints: Option<&[Fingerprint]> = match &config.policy {
        AcquisitionPolicy::TanimotoDiversity { fingerprint_column } => {
            Some(target.aux_bits(fingerprint_column)?)
        }
        _ => None,
    };

    let ensemble_size = if config.policy.needs_ensemble() || !classification {
        config.model.n_ensemble_members
    } else {
        1
    };

    let n_target = target.n_samples();
    let mut partition = PartitionState::init(n_target)?;
    let mut obs_labels: Vec<Label> = Vec::new();
    let mut records: Vec<StepRecord> = Vec::new();
    let mut acquired: Vec<Vec<usize>> = Vec::new();
    let mut predictions: Vec<Vec<StepPrediction>> = Vec::new();
    let mut metric_history: Vec<f64> = Vec::new();
    let mut stop_reason = StopReason::NotStopped;
    let mut stopping_time: Option<usize> = None;
    let mut incomplete: Option<String> = None;
    let mut step = 0usize;

    let test_features: Option<Vec<f64>> = test.map(|t| t.features().to_vec());

    loop {
        let inf: Vec<usize> = partition.inf_ids().collect();
        if inf.is_empty() {
            break;
        }
        let inf_features = target.gather_features(&inf);

        // (a) Train from scratch on the observation set (skip when empty).
        let model = if partition.n_obs() == 0 {
            StepModel::Uniform
        } else {
            let obs_features = target.gather_features(partition.obs_ids());
            let train_ds = if classification {
                let classes: Vec<usize> = obs_labels
                    .iter()
                    .map(|l| match l {
                        Label::Class(c) => Ok(*c),
                        Label::Value(_) => Err(Error::PolicyMismatch {
                            expected: "class labels from the oracle",
                            got: "a regression label",
                        }),
                    })
                    .collect::<Result<_>>()?;
                Dataset::from_classification(
                    obs_features,
                    target.n_features(),
                    classes,
                    n_classes.expect("classification target"),
                )?
            } else {
                let values: Vec<f64> = obs_labels
                    .iter()
                    .map(|l| match l {
                        Label::Value(v) => Ok(*v),
                        Label::Class(_) => Err(Error::PolicyMismatch {
                            expected: "real-valued labels from the oracle",
                            got: "a class label",
                        }),
                    })
                    .collect::<Result<_>>()?;
                Dataset::from_regression(obs_features, target.n_features(), values)?
            };
            let mut step_config = config.model.clone();
            step_config.n_ensemble_members = ensemble_size;
            let base_seed = mix_seed(config.seed, STREAM_TRAIN, step as u64);
            let mut models = train_ensemble(&step_config, &train_ds, val, base_seed)?;
            if models.len() == 1 {
                StepModel::Single(models.pop().expect("one member"))
            } else {
                StepModel::Ensemble(models)
            }
        };

        // (b) Predict the whole inference set.
        let outputs = match &model {
            StepModel::Uniform => uniform_outputs(inf.len(), n_classes, ensemble_size),
            StepModel::Single(m) => {
                if classification {
                    InfOutputs {
                        combined: Some(predict_proba(m, &inf_features)?),
                        members: None,
                        reg_means: None,
                        reg_vars: None,
                    }
                } else {
                    let (means, vars) =
                        predict_regression(core::slice::from_ref(m), &inf_features)?;
                    InfOutputs {
                        combined: None,
                        members: None,
                        reg_means: Some(means),
                        reg_vars: Some(vars),
                    }
                }
            }
            StepModel::Ensemble(ms) => {
                if classification {
                    let members: Vec<Vec<Prediction>> = ms
                        .iter()
                        .map(|m| predict_proba(m, &inf_features))
                        .collect::<Result<_>>()?;
                    InfOutputs {
                        combined: Some(combine_members(&members)?),
                        members: Some(members),
                        reg_means: None,
                        reg_vars: None,
                    }
                } else {
                    let (means, vars) = predict_regression(ms, &inf_features)?;
                    InfOutputs {
                        combined: None,
                        members: None,
                        reg_means: Some(means),
                        reg_vars: Some(vars),
                    }
                }
            }
        };

        // Per-candidate predictions for the log (and the abort path).
        let step_predictions: Vec<StepPrediction> = if classification {
            let combined = outputs.combined.as_ref().expect("classification outputs");
            inf.iter()
                .zip(combined)
                .map(|(&id, p)| {
                    Ok(StepPrediction::Classification {
                        id,
                        class: p.top_class()?,
                        confidence: p.confidence()?,
                        correct: None,
                    })
                })
                .collect::<Result<_>>()?
        } else {
            let means = outputs.reg_means.as_ref().expect("regression outputs");
            let vars = outputs.reg_vars.as_ref().expect("regression outputs");
            inf.iter()
                .zip(means.iter().zip(vars))
                .map(|(&id, (&mean, &variance))| StepPrediction::Regression { id, mean, variance })
                .collect()
        };

        // (c) Score and select min(batch_size, |inf|) candidates.
        let cold = matches!(model, StepModel::Uniform);
        let scores: Vec<f64> = if cold
            && matches!(
                config.policy,
                AcquisitionPolicy::LeastConfidence
                    | AcquisitionPolicy::Bald
                    | AcquisitionPolicy::QbcVariance
            ) {
            match config.cold_start {
                ColdStart::UniformScores => alloc::vec![0.0; inf.len()],
                ColdStart::RandomFirstBatch => {
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(mix_seed(config.seed, STREAM_COLD_START, 0));
                    score_random(inf.len(), &mut rng)?
                }
            }
        } else {
            match &config.policy {
                AcquisitionPolicy::LeastConfidence => score_least_confidence(
                    outputs.combined.as_ref().expect("classification outputs"),
                )?,
                AcquisitionPolicy::Bald => {
                    score_bald(outputs.members.as_ref().expect("ensemble outputs"))?
                }
                AcquisitionPolicy::QbcVariance => {
                    score_qbc_variance(outputs.reg_vars.as_ref().expect("regression outputs"))?
                }
                AcquisitionPolicy::Random => {
                    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(
                        config.seed,
                        STREAM_ACQUIRE,
                        step as u64,
                    ));
                    score_random(inf.len(), &mut rng)?
                }
                AcquisitionPolicy::FixedOrder { .. } => {
                    let table = static_scores.as_ref().expect("static scores");
                    inf.iter().map(|&id| table[id]).collect()
                }
                AcquisitionPolicy::TanimotoDiversity { .. } => score_tanimoto_diversity(
                    fingerprints.expect("fingerprints"),
                    partition.obs_ids(),
                    &inf,
                )?,
            }
        };
        let scored = ScoredCandidates::new(inf.clone(), scores, config.policy.name())?;
        let batch = select_batch(&scored, config.batch_size, fingerprints)?;

        // (e) Labels first, so an oracle failure leaves the partition
        // untouched and the partial log consistent; then (d) transfer.
        let mut batch_labels: Vec<Label> = Vec::with_capacity(batch.len());
        let mut failure: Option<Error> = None;
        for &id in &batch {
            match oracle.label(id) {
                Ok(label) => batch_labels.push(label),
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failure {
            incomplete = Some(e.to_string());
            predictions.push(step_predictions);
            break;
        }
        partition.transfer_batch(&batch)?;
        obs_labels.extend(batch_labels.iter().copied());

        // (f) Batch metric: this step's model on the batch it just chose.
        let batch_positions: Vec<usize> = batch
            .iter()
            .map(|id| inf.binary_search(id).expect("batch drawn from candidates"))
            .collect();
        let batch_metric = if classification {
            let combined = outputs.combined.as_ref().expect("classification outputs");
            let preds: Vec<Prediction> = batch_positions
                .iter()
                .map(|&pos| combined[pos].clone())
                .collect();
            batch_accuracy(&preds, &batch_labels)?
        } else {
            let means = outputs.reg_means.as_ref().expect("regression outputs");
            let preds: Vec<f64> = batch_positions.iter().map(|&pos| means[pos]).collect();
            batch_mse(&preds, &batch_labels)?
        };
        metric_history.push(batch_metric);

        // (g) Stopping rule on post-transfer sizes.
        let decision: StopDecision = match config.stopping {
            StoppingRule::Chernoff => should_stop_chernoff(
                &partition,
                batch_metric,
                batch.len(),
                config.gamma,
                config.delta,
            )?,
            StoppingRule::Naive { patience } => {
                should_stop_naive(&metric_history, config.gamma, patience)?
            }
            StoppingRule::MseThreshold { t_mse, patience } => {
                should_stop_regression(&metric_history, t_mse, patience)?
            }
        };
        let (stopped, reason) = if decision.stop {
            (true, decision.reason)
        } else if partition.n_inf() == 0 {
            (true, StopReason::InferenceExhausted)
        } else {
            (false, StopReason::NotStopped)
        };

        // Test metric from this step's model, when a test split exists.
        let test_metric: Option<f64> = match (test, test_features.as_deref()) {
            (Some(test_ds), Some(tf)) => Some(match &model {
                StepModel::Uniform => {
                    let outs = uniform_outputs(test_ds.n_samples(), n_classes, 1);
                    test_split_metric(test_ds, &outs)?
                }
                StepModel::Single(m) => {
                    let outs = single_outputs(m, tf, classification)?;
                    test_split_metric(test_ds, &outs)?
                }
                StepModel::Ensemble(ms) => {
                    let outs = ensemble_outputs(ms, tf, classification)?;
                    test_split_metric(test_ds, &outs)?
                }
            }),
            _ => None,
        };

        // Keep only predictions for samples still in the inference set.
        let remaining: Vec<StepPrediction> = step_predictions
            .into_iter()
            .filter(|p| partition.contains_inf(p.id()))
            .collect();

        records.push(StepRecord {
            step,
            n_obs: partition.n_obs(),
            n_inf: partition.n_inf(),
            batch_accuracy: batch_metric,
            alpha: decision.alpha,
            est_system_accuracy: decision.est_system_accuracy,
            true_system_accuracy: None,
            inference_accuracy: None,
            test_accuracy: test_metric,
            stopped,
        });
        acquired.push(batch);
        predictions.push(remaining);

        if stopped {
            stop_reason = reason;
            stopping_time = Some(step);
            break;
        }
        step += 1;
        if let Some(max_steps) = config.max_steps {
            if records.len() >= max_steps {
                stop_reason = StopReason::MaxSteps;
                break;
            }
        }
    }

    let mut log = CampaignLog {
        config: config.clone(),
        n_target,
        records,
        stopping_time,
        stop_reason,
        acquired,
        predictions,
        hybrid: Vec::new(),
        oracle_calls: partition.n_obs(),
        incomplete,
    };
    fill_hybrid(&mut log, &partition, &obs_labels);
    fill_ground_truth(&mut log, target)?;
    Ok(log)
}

fn single_outputs(m: &Model, features: &[f64], classification: bool) -> Result<InfOutputs> {
    if classification {
        Ok(InfOutputs {
            combined: Some(predict_proba(m, features)?),
            members: None,
            reg_means: None,
            reg_vars: None,
        })
    } else {
        let (means, vars) = predict_regression(core::slice::from_ref(m), features)?;
        Ok(InfOutputs {
            combined: None,
            members: None,
            reg_means: Some(means),
            reg_vars: Some(vars),
        })
    }
}

fn ensemble_outputs(ms: &[Model], features: &[f64], classification: bool) -> Result<InfOutputs> {
    if classification {
        let members: Vec<Vec<Prediction>> = ms
            .iter()
            .map(|m| predict_proba(m, features))
            .collect::<Result<_>>()?;
        Ok(InfOutputs {
            combined: Some(combine_members(&members)?),
            members: Some(members),
            reg_means: None,
            reg_vars: None,
        })
    } else {
        let (means, vars) = predict_regression(ms, features)?;
        Ok(InfOutputs {
            combined: None,
            members: None,
            reg_means: Some(means),
            reg_vars: Some(vars),
        })
    }
}

/// Accuracy (classification) or MSE (regression) on a labeled split.
fn test_split_metric(split: &Dataset, outputs: &InfOutputs) -> Result<f64> {
    match split.labels() {
        Labels::Classes { values, .. } => {
            let combined = outputs.combined.as_ref().ok_or(Error::PolicyMismatch {
                expected: "classification predictions",
                got: "regression predictions",
            })?;
            let labels: Vec<Label> = values.iter().map(|&c| Label::Class(c)).collect();
            batch_accuracy(combined, &labels)
        }
        Labels::Values(values) => {
            let means = outputs.reg_means.as_ref().ok_or(Error::PolicyMismatch {
                expected: "regression predictions",
                got: "classification predictions",
            })?;
            let labels: Vec<Label> = values.iter().map(|&v| Label::Value(v)).collect();
            batch_mse(means, &labels)
        }
    }
}

/// Builds the final hybrid output: observed labels where acquired, the last
/// step's predicted labels everywhere else. Covers every target id once.
fn fill_hybrid(log: &mut CampaignLog, partition: &PartitionState, obs_labels: &[Label]) {
    let mut by_id: Vec<Option<(Label, LabelSource)>> = alloc::vec![None; log.n_target];
    for (&id, &label) in partition.obs_ids().iter().zip(obs_labels) {
        by_id[id] = Some((label, LabelSource::Observed));
    }
    if let Some(last) = log.predictions.last() {
        for p in last {
            let entry = match p {
                StepPrediction::Classification { id, class, .. } => (*id, Label::Class(*class)),
                StepPrediction::Regression { id, mean, .. } => (*id, Label::Value(*mean)),
            };
            if by_id[entry.0].is_none() {
                by_id[entry.0] = Some((entry.1, LabelSource::Predicted));
            }
        }
    }
    log.hybrid = by_id
        .into_iter()
        .enumerate()
        .filter_map(|(id, slot)| slot.map(|(label, source)| HybridEntry { id, label, source }))
        .collect();
}

/// Simulation-only post-pass: scores every logged prediction against the
/// target labels and fills per-step true system accuracy and inference
/// accuracy (classification) or inference MSE (regression). Reads labels
/// directly — never through the oracle — so the loop's oracle-call count
/// stays exactly one per acquired sample.
fn fill_ground_truth(log: &mut CampaignLog, target: &Dataset) -> Result<()> {
    let classification = target.is_classification();
    for (record, step_preds) in log.records.iter_mut().zip(log.predictions.iter_mut()) {
        let mut correct_count = 0usize;
        let mut mse_sum = 0.0f64;
        for pred in step_preds.iter_mut() {
            let truth = target.label(pred.id());
            match (pred, truth) {
                (StepPrediction::Classification { class, correct, .. }, Label::Class(y)) => {
                    let ok = *class == y;
                    *correct = Some(ok);
                    if ok {
                        correct_count += 1;
                    }
                }
                (StepPrediction::Regression { mean, .. }, Label::Value(y)) => {
                    mse_sum += (*mean - y) * (*mean - y);
                }
                _ => {
                    return Err(Error::PolicyMismatch {
                        expected: "predictions matching the target task",
                        got: "mismatched prediction kind",
                    })
                }
            }
        }
        let n_inf = step_preds.len();
        if classification {
            if n_inf > 0 {
                record.inference_accuracy = Some(correct_count as f64 / n_inf as f64);
            }
            record.true_system_accuracy =
                Some((record.n_obs + correct_count) as f64 / log.n_target as f64);
        } else if n_inf > 0 {
            record.inference_accuracy = Some(mse_sum / n_inf as f64);
        }
    }
    Ok(())
}

/// Runs one campaign per config against the same datasets, each with its own
/// label oracle over the target labels — head-to-head curves on identical
/// data. Campaigns run sequentially here; callers may parallelize across
/// seeds with independent oracles.
pub fn run_comparison(
    configs: &[CampaignConfig],
    target: &Dataset,
    val: &Dataset,
    test: Option<&Dataset>,
) -> Result<Vec<CampaignLog>> {
    if configs.is_empty() {
        return Err(Error::InvalidArgument(
            "comparison needs at least one config".into(),
        ));
    }
    configs
        .iter()
        .map(|config| {
            let mut oracle = DatasetOracle::new(target.labels());
            run_campaign(config, target, val, test, &mut oracle)
        })
        .collect()
}
