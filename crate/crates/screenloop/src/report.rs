//! Cross-run report tables: one metric against acquisition fraction, with
//! per-run columns and per-policy mean/SEM aggregates.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use screenloop_core::CampaignLog;

use crate::error::{AppError, AppResult};
use crate::logio::{fmt_f64, read_log_json};

/// A per-step quantity that can be tabulated across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    InferenceAccuracy,
    TestAccuracy,
    TrueSystemAccuracy,
    EstSystemAccuracy,
    BatchAccuracy,
    /// Fraction of a given hard-example set already acquired; needs the id
    /// list from `--hard-ids`.
    HardSetFraction,
}

impl Metric {
    pub fn from_name(name: &str) -> AppResult<Metric> {
        Ok(match name {
            "inference_accuracy" => Metric::InferenceAccuracy,
            "test_accuracy" => Metric::TestAccuracy,
            "true_system_accuracy" => Metric::TrueSystemAccuracy,
            "est_system_accuracy" => Metric::EstSystemAccuracy,
            "batch_accuracy" => Metric::BatchAccuracy,
            "hard_set_fraction" => Metric::HardSetFraction,
            other => {
                return Err(AppError::usage(format!(
                    "report: unknown metric '{other}' (expected one of \
                     inference_accuracy, test_accuracy, true_system_accuracy, \
                     est_system_accuracy, batch_accuracy, hard_set_fraction)"
                )))
            }
        })
    }
}

/// One run's `(fraction_acquired, value)` curve for `metric`.
fn metric_series(
    log: &CampaignLog,
    metric: Metric,
    hard_ids: Option<&[usize]>,
) -> AppResult<Vec<(f64, Option<f64>)>> {
    let fraction = |n_obs: usize| n_obs as f64 / log.n_target as f64;
    if metric == Metric::HardSetFraction {
        let hard = hard_ids.ok_or_else(|| {
            AppError::usage("report: --hard-ids is required for hard_set_fraction")
        })?;
        let hard: HashSet<usize> = hard.iter().copied().collect();
        let mut acquired: HashSet<usize> = HashSet::new();
        return Ok(log
            .records
            .iter()
            .zip(&log.acquired)
            .map(|(record, batch)| {
                acquired.extend(batch.iter().copied());
                let value = if hard.is_empty() {
                    0.0
                } else {
                    let got = hard.iter().filter(|id| acquired.contains(id)).count();
                    got as f64 / hard.len() as f64
                };
                (fraction(record.n_obs), Some(value))
            })
            .collect());
    }
    Ok(log
        .records
        .iter()
        .map(|r| {
            let value = match metric {
                Metric::InferenceAccuracy => r.inference_accuracy,
                Metric::TestAccuracy => r.test_accuracy,
                Metric::TrueSystemAccuracy => r.true_system_accuracy,
                Metric::EstSystemAccuracy => r.est_system_accuracy,
                Metric::BatchAccuracy => Some(r.batch_accuracy),
                Metric::HardSetFraction => unreachable!("handled above"),
            };
            (fraction(r.n_obs), value)
        })
        .collect())
}

fn mean_and_sem(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

/// Builds the report CSV: a `fraction` column, one `<policy>_s<seed>` column
/// per run, then `mean_<policy>` and `sem_<policy>` per distinct policy
/// (SEM blank when a policy has a single run at that fraction).
pub fn build_report(
    logs: &[CampaignLog],
    metric: Metric,
    hard_ids: Option<&[usize]>,
) -> AppResult<String> {
    if logs.is_empty() {
        return Err(AppError::usage("report: no logs given"));
    }
    let series: Vec<Vec<(f64, Option<f64>)>> = logs
        .iter()
        .map(|log| metric_series(log, metric, hard_ids))
        .collect::<AppResult<_>>()?;

    // Rows keyed by the fraction's bit pattern: fractions are in [0, 1], so
    // bit order equals numeric order.
    let mut grid: BTreeMap<u64, Vec<Option<f64>>> = BTreeMap::new();
    for (i, run) in series.iter().enumerate() {
        for &(x, value) in run {
            grid.entry(x.to_bits())
                .or_insert_with(|| vec![None; logs.len()])[i] = value;
        }
    }

    let mut policies: Vec<&str> = Vec::new();
    for log in logs {
        let name = log.config.policy.name();
        if !policies.contains(&name) {
            policies.push(name);
        }
    }

    let mut out = String::from("fraction");
    for log in logs {
        out.push_str(&format!(
            ",{}_s{}",
            log.config.policy.name(),
            log.config.seed
        ));
    }
    for policy in &policies {
        out.push_str(&format!(",mean_{policy},sem_{policy}"));
    }
    out.push('\n');

    for (bits, row) in &grid {
        out.push_str(&fmt_f64(f64::from_bits(*bits)));
        for cell in row {
            out.push(',');
            if let Some(v) = cell {
                out.push_str(&fmt_f64(*v));
            }
        }
        for policy in &policies {
            let values: Vec<f64> = logs
                .iter()
                .enumerate()
                .filter(|(_, log)| log.config.policy.name() == *policy)
                .filter_map(|(i, _)| row[i])
                .collect();
            if values.is_empty() {
                out.push_str(",,");
            } else {
                let (mean, sem) = mean_and_sem(&values);
                out.push(',');
                out.push_str(&fmt_f64(mean));
                out.push(',');
                if let Some(s) = sem {
                    out.push_str(&fmt_f64(s));
                }
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// CLI entry: loads the logs (and the optional hard-id list), writes the CSV.
pub fn run_report(
    metric_name: &str,
    log_paths: &[PathBuf],
    out: &Path,
    hard_ids_path: Option<&Path>,
) -> AppResult<()> {
    let metric = Metric::from_name(metric_name)?;
    let hard_ids: Option<Vec<usize>> = match hard_ids_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| AppError::usage(format!("report: read {}: {e}", path.display())))?;
            Some(serde_json::from_str(&text).map_err(|e| {
                AppError::usage(format!(
                    "report: {} is not a JSON id array: {e}",
                    path.display()
                ))
            })?)
        }
        None => None,
    };
    let logs: Vec<CampaignLog> = log_paths
        .iter()
        .map(|p| read_log_json(p))
        .collect::<AppResult<_>>()?;
    let table = build_report(&logs, metric, hard_ids.as_deref())?;
    fs::write(out, table).map_err(AppError::from)
}
