//! Campaign log serialization: per-step CSV, run summary JSON, the final
//! hybrid label table, and the complete replayable log.

use std::fs;
use std::path::Path;

use screenloop_core::{CampaignLog, Label, LabelSource, StepRecord};
use serde::Serialize;

use crate::error::{AppError, AppResult};

/// Header of the per-step table, one column per tracked quantity.
pub const STEP_CSV_HEADER: &str =
    "step,n_obs,n_inf,batch_acc,alpha,est_sys_acc,true_sys_acc,inf_acc,test_acc,stopped";

/// Formats a float with the shortest digit string that reparses to the same
/// value, so downstream tools can consume the CSV without precision loss.
pub(crate) fn fmt_f64(value: f64) -> String {
    format!("{value}")
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_default()
}

/// Writes `records` as CSV; optional metrics render as empty cells.
pub fn write_step_csv(path: &Path, records: &[StepRecord]) -> AppResult<()> {
    let mut out = String::from(STEP_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.step,
            r.n_obs,
            r.n_inf,
            fmt_f64(r.batch_accuracy),
            fmt_opt(r.alpha),
            fmt_opt(r.est_system_accuracy),
            fmt_opt(r.true_system_accuracy),
            fmt_opt(r.inference_accuracy),
            fmt_opt(r.test_accuracy),
            r.stopped,
        ));
    }
    fs::write(path, out).map_err(AppError::from)
}

#[derive(Serialize)]
struct Summary<'a> {
    policy: &'a str,
    seed: u64,
    n_target: usize,
    n_steps: usize,
    stopping_time: Option<usize>,
    stop_reason: &'a screenloop_core::StopReason,
    oracle_calls: usize,
    incomplete: &'a Option<String>,
    final_record: Option<&'a StepRecord>,
    config: &'a screenloop_core::CampaignConfig,
}

/// Writes a one-object overview of the run (pretty-printed JSON).
pub fn write_summary_json(path: &Path, log: &CampaignLog) -> AppResult<()> {
    let summary = Summary {
        policy: log.config.policy.name(),
        seed: log.config.seed,
        n_target: log.n_target,
        n_steps: log.records.len(),
        stopping_time: log.stopping_time,
        stop_reason: &log.stop_reason,
        oracle_calls: log.oracle_calls,
        incomplete: &log.incomplete,
        final_record: log.records.last(),
        config: &log.config,
    };
    let text = serde_json::to_string_pretty(&summary).map_err(runtime_json)?;
    fs::write(path, text).map_err(AppError::from)
}

/// Writes the hybrid label table: every target sample with its label and
/// whether the label was measured or predicted.
pub fn write_hybrid_csv(path: &Path, log: &CampaignLog) -> AppResult<()> {
    let mut out = String::from("sample_id,label,source\n");
    for entry in &log.hybrid {
        let label = match entry.label {
            Label::Class(c) => c.to_string(),
            Label::Value(v) => fmt_f64(v),
        };
        let source = match entry.source {
            LabelSource::Observed => "observed",
            LabelSource::Predicted => "predicted",
        };
        out.push_str(&format!("{},{},{}\n", entry.id, label, source));
    }
    fs::write(path, out).map_err(AppError::from)
}

/// Writes the complete log, sufficient to replay or re-analyze the run.
pub fn write_log_json(path: &Path, log: &CampaignLog) -> AppResult<()> {
    let text = serde_json::to_string(log).map_err(runtime_json)?;
    fs::write(path, text).map_err(AppError::from)
}

/// Reads a log written by [`write_log_json`].
pub fn read_log_json(path: &Path) -> AppResult<CampaignLog> {
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::runtime(format!("log: read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| AppError::runtime(format!("log: parse {}: {e}", path.display())))
}

fn runtime_json(e: serde_json::Error) -> AppError {
    AppError::runtime(format!("serialize: {e}"))
}
