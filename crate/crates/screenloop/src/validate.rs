//! Self-check suites: Monte-Carlo coverage of the accuracy lower bound,
//! the batch-ordering inequality, and weak calibration of recorded runs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use screenloop_core::{
    calibration_bins, validate_bound_coverage, validate_lemma1, weak_calibration_violation,
    AccuracyCurve, StepPrediction, SyntheticBatchSpec,
};
use serde::Deserialize;

use crate::error::{AppError, AppResult};
use crate::logio::read_log_json;

fn parse_params<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> AppResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::usage(format!("params: read {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        AppError::usage(format!(
            "params {}: {} (at field path '{}')",
            path.display(),
            e.inner(),
            e.path()
        ))
    })
}

// ---------------------------------------------------------------- bound ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundParams {
    pub mu: Vec<f64>,
    pub n: Vec<usize>,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            mu: vec![0.8, 0.9, 0.95, 0.99],
            n: vec![100, 1000],
            delta: 0.05,
            trials: 10_000,
            seed: 0,
        }
    }
}

/// Checks, for every `(mu, n)` cell, that the bound's empirical failure rate
/// stays within `delta` plus three standard errors of the Monte-Carlo
/// estimate. A violating cell is a contract failure (exit 3).
pub fn validate_bound(params_path: Option<&Path>) -> AppResult<String> {
    let params: BoundParams = parse_params(params_path)?;
    if params.trials == 0 {
        return Err(AppError::usage("bound: trials must be positive"));
    }
    let limit =
        params.delta + 3.0 * (params.delta * (1.0 - params.delta) / params.trials as f64).sqrt();
    let mut out = String::new();
    let mut cell = 0u64;
    for &mu in &params.mu {
        for &n in &params.n {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(cell));
            cell += 1;
            let rate = validate_bound_coverage(mu, n, params.delta, params.trials, &mut rng)
                .map_err(|e| AppError::usage(format!("bound: {e}")))?;
            if rate > limit {
                return Err(AppError::contract(format!(
                    "bound: mu={mu} n={n}: violation rate {rate} exceeds {limit} \
                     (delta {} + 3 standard errors over {} trials)",
                    params.delta, params.trials
                )));
            }
            writeln!(
                out,
                "bound: mu={mu} n={n} violation_rate={rate} limit={limit} OK"
            )
            .unwrap();
        }
    }
    writeln!(out, "bound: all {cell} cells within the Monte-Carlo limit").unwrap();
    Ok(out)
}

// --------------------------------------------------------------- lemma1 ----

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CurveSpec {
    Name(String),
    Constant { constant: f64 },
}

impl CurveSpec {
    fn resolve(&self) -> AppResult<AccuracyCurve> {
        Ok(match self {
            CurveSpec::Name(name) => match name.as_str() {
                "identity" => AccuracyCurve::Identity,
                "one_minus" => AccuracyCurve::OneMinus,
                other => {
                    return Err(AppError::usage(format!(
                        "lemma1: unknown curve '{other}' (expected identity, one_minus, \
                         or {{\"constant\": c}})"
                    )))
                }
            },
            CurveSpec::Constant { constant } => AccuracyCurve::Constant(*constant),
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrderingParams {
    n: usize,
    n_b: usize,
    trials: usize,
    confidence_low: f64,
    confidence_high: f64,
    g: CurveSpec,
    seed: u64,
}

impl Default for OrderingParams {
    fn default() -> Self {
        OrderingParams {
            n: 1000,
            n_b: 100,
            trials: 2000,
            confidence_low: 0.05,
            confidence_high: 0.95,
            g: CurveSpec::Name("identity".into()),
            seed: 0,
        }
    }
}

/// Checks that picking the lowest-confidence batch is pessimistic: its mean
/// accuracy must not exceed the remaining pool's. A flip (as produced by the
/// anti-calibrated `one_minus` curve) is a contract failure (exit 3).
pub fn validate_ordering(params_path: Option<&Path>) -> AppResult<String> {
    let params: OrderingParams = parse_params(params_path)?;
    let spec = SyntheticBatchSpec {
        n: params.n,
        confidence_low: params.confidence_low,
        confidence_high: params.confidence_high,
        g: params.g.resolve()?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let outcome = validate_lemma1(&spec, params.n_b, params.trials, &mut rng)
        .map_err(|e| AppError::usage(format!("lemma1: {e}")))?;
    let line = format!(
        "batch ordering: mean_batch={} mean_remaining={} (n={}, n_b={}, trials={})",
        outcome.mean_batch_accuracy,
        outcome.mean_remaining_accuracy,
        params.n,
        params.n_b,
        params.trials
    );
    if outcome.mean_batch_accuracy > outcome.mean_remaining_accuracy {
        return Err(AppError::contract(format!(
            "batch ordering violated: mean_batch {} > mean_remaining {}",
            outcome.mean_batch_accuracy, outcome.mean_remaining_accuracy
        )));
    }
    Ok(format!("{line}\nbatch ordering: OK (batch <= remaining)\n"))
}

// ---------------------------------------------------------- calibration ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationParams {
    /// A `log.json` written by `run`.
    pub log: PathBuf,
    #[serde(default = "default_n_bins")]
    pub n_bins: usize,
    #[serde(default = "default_min_bin_count")]
    pub min_bin_count: usize,
    #[serde(default = "default_max_violation")]
    pub max_violation: f64,
    #[serde(default = "default_min_pass_fraction")]
    pub min_pass_fraction: f64,
}

fn default_n_bins() -> usize {
    10
}
fn default_min_bin_count() -> usize {
    50
}
fn default_max_violation() -> f64 {
    0.1
}
fn default_min_pass_fraction() -> f64 {
    0.8
}

/// Checks that recorded inference-set confidences were weakly calibrated at
/// enough checkpoints: per step, bin `(confidence, correct)` pairs, ignore
/// bins thinner than `min_bin_count`, and measure the largest accuracy drop
/// between successive populated bins. The run passes when at least
/// `min_pass_fraction` of assessable checkpoints stay within
/// `max_violation`; otherwise the check fails with exit 3.
pub fn validate_calibration(params_path: Option<&Path>) -> AppResult<String> {
    let Some(params_path) = params_path else {
        return Err(AppError::usage(
            "calibration: --params is required (it names the log to check)",
        ));
    };
    let text = fs::read_to_string(params_path)
        .map_err(|e| AppError::usage(format!("params: read {}: {e}", params_path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let params: CalibrationParams = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        AppError::usage(format!(
            "params {}: {} (at field path '{}')",
            params_path.display(),
            e.inner(),
            e.path()
        ))
    })?;
    let log = read_log_json(&params.log)?;

    let mut out = String::new();
    let mut assessed = 0usize;
    let mut passed = 0usize;
    let mut saw_classification = false;
    for (step_index, step_predictions) in log.predictions.iter().enumerate() {
        let mut confidences = Vec::new();
        let mut correct = Vec::new();
        for prediction in step_predictions {
            if let StepPrediction::Classification {
                confidence,
                correct: Some(is_correct),
                ..
            } = prediction
            {
                confidences.push(*confidence);
                correct.push(*is_correct);
            }
        }
        if confidences.is_empty() {
            continue;
        }
        saw_classification = true;
        let mut report = calibration_bins(&confidences, &correct, params.n_bins)
            .map_err(|e| AppError::usage(format!("calibration: {e}")))?;
        for bin in &mut report.bins {
            if bin.count < params.min_bin_count {
                bin.accuracy = None;
            }
        }
        // `predictions[i]` belongs to `records[i]`, whose `step` field is
        // 0-based everywhere else (steps.csv, summary.json), so label it the
        // same way here.
        let step = step_index;
        match weak_calibration_violation(&report) {
            None => {
                writeln!(
                    out,
                    "calibration: step {step}: skipped (fewer than 2 bins with >= {} samples)",
                    params.min_bin_count
                )
                .unwrap();
            }
            Some(violation) => {
                assessed += 1;
                let ok = violation <= params.max_violation;
                passed += usize::from(ok);
                writeln!(
                    out,
                    "calibration: step {step}: violation={violation} (limit {}) {}",
                    params.max_violation,
                    if ok { "PASS" } else { "FAIL" }
                )
                .unwrap();
            }
        }
    }
    if !saw_classification {
        return Err(AppError::usage(
            "calibration: the log contains no classification predictions",
        ));
    }
    if assessed == 0 {
        return Err(AppError::usage(
            "calibration: no checkpoint had 2 sufficiently populated bins",
        ));
    }
    let fraction = passed as f64 / assessed as f64;
    if fraction < params.min_pass_fraction {
        return Err(AppError::contract(format!(
            "calibration: only {passed}/{assessed} checkpoints pass \
             ({fraction} < {})",
            params.min_pass_fraction
        )));
    }
    writeln!(
        out,
        "calibration: {passed}/{assessed} checkpoints pass ({fraction} >= {}) OK",
        params.min_pass_fraction
    )
    .unwrap();
    Ok(out)
}
