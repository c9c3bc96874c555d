//! Command-line interface: `run`, `validate`, and `report`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use screenloop_core::StopReason;

use crate::config_file::load_config;
use crate::error::{AppError, AppResult};
use crate::report::run_report;
use crate::runner::run_seeds;
use crate::validate::{validate_bound, validate_calibration, validate_ordering};

#[derive(Debug, Parser)]
#[command(
    name = "screenloop",
    version,
    about = "Confidence-driven screening campaigns with a certified stopping rule"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run campaigns described by a JSON config, one per seed.
    Run {
        /// Path to the JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output.dir` from the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated seeds, e.g. "1,2,3"; defaults to the configured
        /// campaign seed.
        #[arg(long)]
        seeds: Option<String>,
    },
    /// Check a statistical contract; a violation exits with code 3.
    Validate {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Tabulate one metric across recorded runs as CSV.
    Report {
        /// Metric name, e.g. inference_accuracy or hard_set_fraction.
        #[arg(long)]
        metric: String,
        /// One or more log.json files written by `run`.
        #[arg(long, num_args = 1.., required = true)]
        logs: Vec<PathBuf>,
        /// Where to write the CSV table.
        #[arg(long)]
        out: PathBuf,
        /// JSON array of hard-example ids (required for hard_set_fraction).
        #[arg(long)]
        hard_ids: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// Monte-Carlo coverage of the accuracy lower bound.
    Bound {
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Ordering inequality: a lowest-confidence batch cannot beat the pool.
    Lemma1 {
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Weak calibration of a recorded run's confidences.
    Calibration {
        #[arg(long)]
        params: Option<PathBuf>,
    },
}

fn parse_seeds(raw: &str) -> AppResult<Vec<u64>> {
    let seeds: Vec<u64> = raw
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| AppError::usage(format!("--seeds: '{part}' is not a seed")))
        })
        .collect::<AppResult<_>>()?;
    if seeds.is_empty() {
        return Err(AppError::usage("--seeds: empty list"));
    }
    Ok(seeds)
}

fn reason_name(reason: StopReason) -> &'static str {
    match reason {
        StopReason::ThresholdMet => "threshold_met",
        StopReason::InferenceExhausted => "inference_exhausted",
        StopReason::MaxSteps => "max_steps",
        StopReason::NotStopped => "not_stopped",
    }
}

/// Executes a parsed command, returning the text to print on success.
pub fn execute(cli: Cli) -> AppResult<String> {
    match cli.command {
        Command::Run { config, out, seeds } => {
            let file = load_config(&config)?;
            let mut resolved = file.resolve()?;
            if let Some(dir) = out {
                resolved.out_dir = dir;
            }
            let seeds = match seeds {
                Some(raw) => parse_seeds(&raw)?,
                None => vec![resolved.campaign.seed],
            };
            let outcomes = run_seeds(&resolved, &seeds)?;
            let mut out = String::new();
            for o in &outcomes {
                let stopped = match o.stopping_time {
                    Some(t) => format!("stopped at step {t}"),
                    None => "did not stop".into(),
                };
                let est = o
                    .est_system_accuracy
                    .map(|v| format!(", est_sys_acc={v}"))
                    .unwrap_or_default();
                writeln!(
                    out,
                    "seed {}: {} steps, {} ({}){}, oracle_calls={} -> {}",
                    o.seed,
                    o.n_steps,
                    stopped,
                    reason_name(o.stop_reason),
                    est,
                    o.oracle_calls,
                    o.dir.display()
                )
                .unwrap();
            }
            Ok(out)
        }
        Command::Validate { suite } => match suite {
            Suite::Bound { params } => validate_bound(params.as_deref()),
            Suite::Lemma1 { params } => validate_ordering(params.as_deref()),
            Suite::Calibration { params } => validate_calibration(params.as_deref()),
        },
        Command::Report {
            metric,
            logs,
            out,
            hard_ids,
        } => {
            run_report(&metric, &logs, &out, hard_ids.as_deref())?;
            Ok(format!("wrote {}\n", out.display()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists_parse_and_reject_garbage() {
        assert_eq!(parse_seeds("1,2,3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_seeds(" 7 ").unwrap(), vec![7]);
        assert_eq!(parse_seeds("1,x").unwrap_err().exit_code(), 2);
        assert_eq!(parse_seeds("").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn the_cli_grammar_accepts_the_documented_forms() {
        Cli::try_parse_from([
            "screenloop",
            "run",
            "--config",
            "c.json",
            "--out",
            "o",
            "--seeds",
            "1,2",
        ])
        .unwrap();
        Cli::try_parse_from(["screenloop", "validate", "bound"]).unwrap();
        Cli::try_parse_from(["screenloop", "validate", "lemma1", "--params", "p.json"]).unwrap();
        Cli::try_parse_from([
            "screenloop",
            "report",
            "--metric",
            "test_accuracy",
            "--logs",
            "a.json",
            "b.json",
            "--out",
            "table.csv",
        ])
        .unwrap();
        assert!(Cli::try_parse_from(["screenloop", "report", "--out", "t.csv"]).is_err());
    }
}
