//! The JSON run configuration: one document with sections
//! `{profile?, data, model, campaign, stopping, output}`.
//!
//! A named profile supplies hyperparameter defaults; explicit fields always
//! win. Without a profile, every model field and the campaign batch size
//! must be spelled out.

use std::fs;
use std::path::{Path, PathBuf};

use screenloop_core::{AcquisitionPolicy, CampaignConfig, ColdStart, ModelConfig, StoppingRule};
use serde::{Deserialize, Serialize};

use crate::data::csvio::LabelKind;
use crate::data::split::SplitSpec;
use crate::error::{AppError, AppResult};

/// Named hyperparameter defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Full-scale handwritten-digit protocol: batches of 1000, a 2x512
    /// residual network, lr 0.001, clip 1.0, dropout 0.1, up to 1000 epochs
    /// with train batches of 1024 and early-stop patience 50.
    Mnist,
}

impl Profile {
    fn model_defaults(self) -> ModelConfig {
        match self {
            Profile::Mnist => ModelConfig {
                n_hidden_layers: 2,
                hidden_size: 512,
                learning_rate: 0.001,
                grad_norm_clip: 1.0,
                dropout: 0.1,
                max_epochs: 1000,
                train_batch_size: 1024,
                early_stop_patience: 50,
                n_ensemble_members: 1,
            },
        }
    }

    fn batch_size_default(self) -> usize {
        match self {
            Profile::Mnist => 1000,
        }
    }
}

/// Where the samples come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// Big-endian image/label pair.
    Idx { images: PathBuf, labels: PathBuf },
    /// Tabular features with optional fingerprint/sort-key columns.
    Csv {
        path: PathBuf,
        label_column: String,
        #[serde(default)]
        label_kind: LabelKind,
        feature_columns: Vec<String>,
        #[serde(default)]
        aux_columns: Vec<String>,
    },
    /// Generated seven-segment digit images.
    SyntheticDigits {
        n: usize,
        #[serde(default = "default_side")]
        side: usize,
        seed: u64,
    },
    /// Generated 1-D heteroscedastic regression benchmark.
    SyntheticRegression { n: usize, seed: u64 },
}

fn default_side() -> usize {
    16
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CropSpec {
    pub image_height: usize,
    pub image_width: usize,
    pub keep_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShuffleSpec {
    pub classes: Vec<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub source: DataSource,
    /// Blank out the bottom of each image (applied before splitting).
    #[serde(default)]
    pub crop: Option<CropSpec>,
    /// Resample labels of the listed classes (applied before splitting).
    #[serde(default)]
    pub shuffle: Option<ShuffleSpec>,
    /// Turn regression targets into two balanced classes at the median.
    #[serde(default)]
    pub discretize_median: bool,
    pub split: SplitSpec,
}

/// Per-field model overrides; anything absent falls back to the profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub n_hidden_layers: Option<usize>,
    pub hidden_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub grad_norm_clip: Option<f64>,
    pub dropout: Option<f64>,
    pub max_epochs: Option<usize>,
    pub train_batch_size: Option<usize>,
    pub early_stop_patience: Option<usize>,
    pub n_ensemble_members: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    pub policy: AcquisitionPolicy,
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub cold_start: Option<ColdStart>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum StoppingSection {
    /// Stop when the bound-backed system-accuracy estimate exceeds `gamma`;
    /// each check holds with probability `1 - delta`.
    Chernoff {
        gamma: f64,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    /// Plug-in estimate above `gamma` for `patience` consecutive steps.
    Naive { gamma: f64, patience: usize },
    /// Batch MSE below `t_mse` for `patience` consecutive steps.
    MseThreshold { t_mse: f64, patience: usize },
}

fn default_delta() -> f64 {
    0.05
}

impl StoppingSection {
    fn gamma(&self) -> f64 {
        match self {
            StoppingSection::Chernoff { gamma, .. } | StoppingSection::Naive { gamma, .. } => {
                *gamma
            }
            // The MSE rule never reads gamma; any valid placeholder works.
            StoppingSection::MseThreshold { .. } => 0.5,
        }
    }

    fn delta(&self) -> f64 {
        match self {
            StoppingSection::Chernoff { delta, .. } => *delta,
            _ => default_delta(),
        }
    }

    fn rule(&self) -> StoppingRule {
        match self {
            StoppingSection::Chernoff { .. } => StoppingRule::Chernoff,
            StoppingSection::Naive { patience, .. } => StoppingRule::Naive {
                patience: *patience,
            },
            StoppingSection::MseThreshold { t_mse, patience } => StoppingRule::MseThreshold {
                t_mse: *t_mse,
                patience: *patience,
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Output directory; each seed writes to `<dir>/seed_<s>/`.
    pub dir: Option<PathBuf>,
    /// Also write the complete replayable log as `log.json` (needed by
    /// `validate calibration` and `report --metric hard_set_fraction`).
    pub write_full_log: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub profile: Option<Profile>,
    pub data: DataSection,
    #[serde(default)]
    pub model: ModelSection,
    pub campaign: CampaignSection,
    pub stopping: StoppingSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// A configuration with every default applied and every constraint checked.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub data: DataSection,
    pub campaign: CampaignConfig,
    pub out_dir: PathBuf,
    pub write_full_log: bool,
}

impl ConfigFile {
    pub fn resolve(&self) -> AppResult<ResolvedConfig> {
        let defaults = self.profile.map(Profile::model_defaults);
        fn pick<T: Copy>(name: &str, explicit: Option<T>, fallback: Option<T>) -> AppResult<T> {
            explicit.or(fallback).ok_or_else(|| {
                AppError::usage(format!(
                    "config: model.{name} is required without a profile"
                ))
            })
        }
        let m = &self.model;
        let model = ModelConfig {
            n_hidden_layers: pick(
                "n_hidden_layers",
                m.n_hidden_layers,
                defaults.as_ref().map(|d| d.n_hidden_layers),
            )?,
            hidden_size: pick(
                "hidden_size",
                m.hidden_size,
                defaults.as_ref().map(|d| d.hidden_size),
            )?,
            learning_rate: pick(
                "learning_rate",
                m.learning_rate,
                defaults.as_ref().map(|d| d.learning_rate),
            )?,
            grad_norm_clip: pick(
                "grad_norm_clip",
                m.grad_norm_clip,
                defaults.as_ref().map(|d| d.grad_norm_clip),
            )?,
            dropout: pick("dropout", m.dropout, defaults.as_ref().map(|d| d.dropout))?,
            max_epochs: pick(
                "max_epochs",
                m.max_epochs,
                defaults.as_ref().map(|d| d.max_epochs),
            )?,
            train_batch_size: pick(
                "train_batch_size",
                m.train_batch_size,
                defaults.as_ref().map(|d| d.train_batch_size),
            )?,
            early_stop_patience: pick(
                "early_stop_patience",
                m.early_stop_patience,
                defaults.as_ref().map(|d| d.early_stop_patience),
            )?,
            n_ensemble_members: pick(
                "n_ensemble_members",
                m.n_ensemble_members,
                defaults.as_ref().map(|d| d.n_ensemble_members),
            )?,
        };
        let batch_size = self
            .campaign
            .batch_size
            .or(self.profile.map(Profile::batch_size_default))
            .ok_or_else(|| {
                AppError::usage("config: campaign.batch_size is required without a profile")
            })?;

        let campaign = CampaignConfig {
            gamma: self.stopping.gamma(),
            delta: self.stopping.delta(),
            batch_size,
            policy: self.campaign.policy.clone(),
            stopping: self.stopping.rule(),
            model,
            seed: self.campaign.seed.unwrap_or(0),
            max_steps: self.campaign.max_steps,
            cold_start: self.campaign.cold_start.unwrap_or(ColdStart::UniformScores),
        };
        campaign
            .validate()
            .map_err(|e| AppError::usage(format!("config: {e}")))?;

        Ok(ResolvedConfig {
            data: self.data.clone(),
            campaign,
            out_dir: self
                .output
                .dir
                .clone()
                .unwrap_or_else(|| PathBuf::from("out")),
            write_full_log: self.output.write_full_log.unwrap_or(true),
        })
    }
}

/// Parses a config file, reporting schema violations with the JSON path of
/// the offending field.
pub fn load_config(path: &Path) -> AppResult<ConfigFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::usage(format!("config: read {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        AppError::usage(format!(
            "config {}: {} (at field path '{}')",
            path.display(),
            e.inner(),
            e.path()
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> serde_json::Value {
        serde_json::json!({
            "profile": "mnist",
            "data": {
                "source": {"kind": "synthetic_digits", "n": 100, "seed": 1},
                "split": {
                    "target_fraction": 0.8,
                    "val_fraction": 0.1,
                    "test_fraction": 0.1,
                    "split_seed": 5
                }
            },
            "campaign": {"policy": "least_confidence"},
            "stopping": {"rule": "chernoff", "gamma": 0.98}
        })
    }

    #[test]
    fn profile_defaults_fill_missing_fields_and_overrides_win() {
        let mut json = minimal_json();
        json["model"] = serde_json::json!({"hidden_size": 48});
        let file: ConfigFile = serde_json::from_value(json).unwrap();
        let resolved = file.resolve().unwrap();
        assert_eq!(resolved.campaign.model.hidden_size, 48); // explicit
        assert_eq!(resolved.campaign.model.n_hidden_layers, 2); // profile
        assert_eq!(resolved.campaign.model.learning_rate, 0.001);
        assert_eq!(resolved.campaign.batch_size, 1000);
        assert_eq!(resolved.campaign.gamma, 0.98);
        assert_eq!(resolved.campaign.delta, 0.05); // default
        assert!(resolved.write_full_log);
    }

    #[test]
    fn missing_fields_without_a_profile_name_the_field() {
        let mut json = minimal_json();
        json["profile"] = serde_json::Value::Null;
        let file: ConfigFile = serde_json::from_value(json).unwrap();
        let err = file.resolve().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("model.n_hidden_layers"), "{err}");
    }

    #[test]
    fn parse_serialize_parse_is_a_fixed_point() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        std::fs::write(&path, minimal_json().to_string()).unwrap();
        let first = load_config(&path).unwrap();
        let reserialized = serde_json::to_string(&first).unwrap();
        let second: ConfigFile = serde_json::from_str(&reserialized).unwrap();
        assert_eq!(first, second);
        assert_eq!(reserialized, serde_json::to_string(&second).unwrap());
    }

    #[test]
    fn schema_violations_carry_the_field_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        let mut json = minimal_json();
        json["campaign"]["policy"] = serde_json::json!("definitely_not_a_policy");
        std::fs::write(&path, json.to_string()).unwrap();
        let err = load_config(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("campaign.policy"), "{err}");
    }

    #[test]
    fn domain_violations_are_usage_errors() {
        let mut json = minimal_json();
        json["stopping"]["gamma"] = serde_json::json!(1.5);
        let file: ConfigFile = serde_json::from_value(json).unwrap();
        assert_eq!(file.resolve().unwrap_err().exit_code(), 2);
    }
}
