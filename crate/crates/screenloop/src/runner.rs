//! Campaign execution: data preparation, per-seed runs, and output files.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use screenloop_core::{
    run_campaign, CampaignConfig, CampaignLog, Dataset, DatasetOracle, StopReason,
};

use crate::config_file::{DataSection, DataSource, ResolvedConfig};
use crate::data::csvio::load_csv_features;
use crate::data::idx::load_idx;
use crate::data::split::split_dataset;
use crate::data::transforms::{crop_bottom, discretize_median_dataset, shuffle_labels};
use crate::error::{AppError, AppResult};
use crate::logio;
use crate::synth::{synthetic_digits, synthetic_regression};

/// Environment variable capping the worker threads used to run seeds in
/// parallel. Unset or `0` means one worker per available core.
pub const THREADS_ENV: &str = "SCREENLOOP_THREADS";

pub struct PreparedData {
    pub target: Dataset,
    pub val: Dataset,
    pub test: Option<Dataset>,
}

/// Loads the source and applies the corruption transforms *before* the
/// split, so target, validation, and test all see the same labels.
pub fn prepare_data(section: &DataSection) -> AppResult<PreparedData> {
    let mut dataset = match &section.source {
        DataSource::Idx { images, labels } => load_idx(images, labels)?,
        DataSource::Csv {
            path,
            label_column,
            label_kind,
            feature_columns,
            aux_columns,
        } => load_csv_features(
            path,
            label_column,
            *label_kind,
            feature_columns,
            aux_columns,
        )?,
        DataSource::SyntheticDigits { n, side, seed } => synthetic_digits(*n, *side, *seed)?,
        DataSource::SyntheticRegression { n, seed } => synthetic_regression(*n, *seed)?,
    };
    if section.discretize_median {
        dataset = discretize_median_dataset(&dataset)?;
    }
    if let Some(crop) = &section.crop {
        dataset = crop_bottom(
            &dataset,
            crop.image_height,
            crop.image_width,
            crop.keep_fraction,
        )?;
    }
    if let Some(shuffle) = &section.shuffle {
        dataset = shuffle_labels(&dataset, &shuffle.classes, shuffle.seed)?;
    }
    let split = split_dataset(&dataset, &section.split)?;
    Ok(PreparedData {
        target: split.target,
        val: split.val,
        test: split.test,
    })
}

/// Runs one campaign and writes its outputs under `seed_dir`.
pub fn run_one_seed(
    campaign: &CampaignConfig,
    data: &PreparedData,
    seed_dir: &Path,
    write_full_log: bool,
) -> AppResult<CampaignLog> {
    let mut oracle = DatasetOracle::new(data.target.labels());
    let log = run_campaign(
        campaign,
        &data.target,
        &data.val,
        data.test.as_ref(),
        &mut oracle,
    )
    .map_err(|e| AppError::runtime(format!("campaign: {e}")))?;
    fs::create_dir_all(seed_dir)?;
    logio::write_step_csv(&seed_dir.join("steps.csv"), &log.records)?;
    logio::write_summary_json(&seed_dir.join("summary.json"), &log)?;
    logio::write_hybrid_csv(&seed_dir.join("hybrid.csv"), &log)?;
    if write_full_log {
        logio::write_log_json(&seed_dir.join("log.json"), &log)?;
    }
    Ok(log)
}

/// Resolves the worker count from [`THREADS_ENV`], the number of seeds, and
/// the machine.
fn worker_count(n_seeds: usize) -> AppResult<usize> {
    let configured = match std::env::var(THREADS_ENV) {
        Ok(raw) => raw.trim().parse::<usize>().map_err(|_| {
            AppError::usage(format!("{THREADS_ENV}: '{raw}' is not a thread count"))
        })?,
        Err(_) => 0,
    };
    let available = std::thread::available_parallelism().map_or(1, usize::from);
    let cap = if configured == 0 {
        available
    } else {
        configured
    };
    Ok(cap.min(n_seeds).max(1))
}

/// What one seed produced, light enough to keep for every seed.
#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub seed: u64,
    pub dir: PathBuf,
    pub n_steps: usize,
    pub stopping_time: Option<usize>,
    pub stop_reason: StopReason,
    pub est_system_accuracy: Option<f64>,
    pub oracle_calls: usize,
}

impl SeedOutcome {
    fn from_log(seed: u64, dir: PathBuf, log: &CampaignLog) -> Self {
        SeedOutcome {
            seed,
            dir,
            n_steps: log.records.len(),
            stopping_time: log.stopping_time,
            stop_reason: log.stop_reason,
            est_system_accuracy: log.records.last().and_then(|r| r.est_system_accuracy),
            oracle_calls: log.oracle_calls,
        }
    }
}

/// Runs the resolved configuration once per seed (in parallel, up to the
/// worker cap), writing `<out_dir>/seed_<s>/{steps.csv, summary.json,
/// hybrid.csv[, log.json]}`. Returns per-seed outcomes in seed order.
pub fn run_seeds(config: &ResolvedConfig, seeds: &[u64]) -> AppResult<Vec<SeedOutcome>> {
    if seeds.is_empty() {
        return Err(AppError::usage("run: empty seed list"));
    }
    let data = prepare_data(&config.data)?;
    let dirs: Vec<PathBuf> = seeds
        .iter()
        .map(|s| config.out_dir.join(format!("seed_{s}")))
        .collect();

    let workers = worker_count(seeds.len())?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<AppResult<SeedOutcome>>>> =
        Mutex::new(seeds.iter().map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= seeds.len() {
                    break;
                }
                let campaign = CampaignConfig {
                    seed: seeds[i],
                    ..config.campaign.clone()
                };
                let result = run_one_seed(&campaign, &data, &dirs[i], config.write_full_log)
                    .map(|log| SeedOutcome::from_log(seeds[i], dirs[i].clone(), &log));
                results.lock().unwrap()[i] = Some(result);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("every seed index was claimed by a worker"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config_file::{CropSpec, ShuffleSpec};
    use crate::data::split::SplitSpec;

    fn digits_section() -> DataSection {
        DataSection {
            source: DataSource::SyntheticDigits {
                n: 60,
                side: 8,
                seed: 3,
            },
            crop: None,
            shuffle: None,
            discretize_median: false,
            split: SplitSpec::Fractions {
                target_fraction: 0.5,
                val_fraction: 0.25,
                test_fraction: 0.25,
                split_seed: 9,
            },
        }
    }

    #[test]
    fn preparation_applies_source_transforms_and_split() {
        let mut section = digits_section();
        section.crop = Some(CropSpec {
            image_height: 8,
            image_width: 8,
            keep_fraction: 0.5,
        });
        section.shuffle = Some(ShuffleSpec {
            classes: vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
            seed: 11,
        });
        let data = prepare_data(&section).unwrap();
        assert_eq!(data.target.n_samples(), 30);
        assert_eq!(data.val.n_samples(), 15);
        assert_eq!(data.test.as_ref().unwrap().n_samples(), 15);
        // Crop zeroed the bottom half of every image in every part.
        for part in [&data.target, &data.val] {
            for id in 0..part.n_samples() {
                let row = part.feature_row(id);
                assert!(row[32..].iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn discretization_turns_regression_into_two_classes() {
        let section = DataSection {
            source: DataSource::SyntheticRegression { n: 40, seed: 5 },
            crop: None,
            shuffle: None,
            discretize_median: true,
            split: SplitSpec::Fractions {
                target_fraction: 0.5,
                val_fraction: 0.5,
                test_fraction: 0.0,
                split_seed: 1,
            },
        };
        let data = prepare_data(&section).unwrap();
        assert_eq!(data.target.n_classes(), Some(2));
        assert!(data.test.is_none());
    }

    #[test]
    fn worker_count_respects_the_env_cap() {
        // Only this test touches the variable, so the process-global write
        // cannot race with another reader.
        std::env::set_var(THREADS_ENV, "2");
        assert_eq!(worker_count(8).unwrap(), 2);
        assert_eq!(worker_count(1).unwrap(), 1);
        std::env::set_var(THREADS_ENV, "nope");
        assert_eq!(worker_count(4).unwrap_err().exit_code(), 2);
        std::env::set_var(THREADS_ENV, "0");
        assert!(worker_count(64).unwrap() >= 1);
        std::env::remove_var(THREADS_ENV);
    }
}
