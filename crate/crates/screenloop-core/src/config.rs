//! Campaign and model hyperparameter containers.
//!
//! These are plain serializable values; [`CampaignConfig::validate`] checks
//! every domain constraint that does not require looking at a dataset
//! (dataset-dependent checks, such as policy/task compatibility, happen in the
//! engine's pre-flight).

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Static ranking key for the fixed-order policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKey {
    /// Acquire in dataset load order.
    SampleId,
    /// Acquire by a real-valued auxiliary column (e.g. a size or synthetic-
    /// accessibility key).
    Aux(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortDirection {
    Ascending,
    Descending,
}

/// How the inference set is scored each round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcquisitionPolicy {
    /// 1 - confidence of the current model (classification).
    LeastConfidence,
    /// Seeded uniform scores.
    Random,
    /// Ensemble mutual information (classification, needs >= 2 members).
    Bald,
    /// Ensemble prediction variance (regression, needs >= 2 members).
    QbcVariance,
    /// A static ranking given by a key column and direction.
    FixedOrder {
        key: OrderKey,
        direction: SortDirection,
    },
    /// Greedy farthest-point selection by Tanimoto distance on a fingerprint
    /// column.
    TanimotoDiversity { fingerprint_column: String },
}

impl AcquisitionPolicy {
    /// Whether scoring requires a trained ensemble rather than a single model.
    pub fn needs_ensemble(&self) -> bool {
        matches!(
            self,
            AcquisitionPolicy::Bald | AcquisitionPolicy::QbcVariance
        )
    }

    /// Short stable name used in logs and report columns.
    pub fn name(&self) -> &'static str {
        match self {
            AcquisitionPolicy::LeastConfidence => "least_confidence",
            AcquisitionPolicy::Random => "random",
            AcquisitionPolicy::Bald => "bald",
            AcquisitionPolicy::QbcVariance => "qbc_variance",
            AcquisitionPolicy::FixedOrder { .. } => "fixed_order",
            AcquisitionPolicy::TanimotoDiversity { .. } => "tanimoto_diversity",
        }
    }
}

/// When to declare the campaign done.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingRule {
    /// Stop once `(n_obs + alpha * n_inf) / n_target > gamma`, where `alpha`
    /// is the KL-Chernoff lower bound on inference accuracy computed from the
    /// batch just acquired. Classification only.
    Chernoff,
    /// Stop once the plug-in estimate `(n_obs + mu_b * n_inf) / n_target`
    /// exceeds `gamma` for `patience` consecutive steps. No guarantee;
    /// classification only.
    Naive { patience: usize },
    /// Stop once the acquired-batch MSE is below `t_mse` for `patience`
    /// consecutive steps. Heuristic; regression only.
    MseThreshold { t_mse: f64, patience: usize },
}

/// What the first round scores with, given that there is no trained model yet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColdStart {
    /// Score with the untrained/uniform predictor; ties break by ascending id,
    /// so the first batch is a deterministic arbitrary batch.
    UniformScores,
    /// Draw the first batch uniformly at random (seeded).
    RandomFirstBatch,
}

/// Network and optimizer hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Number of residual blocks between the input projection and the head.
    pub n_hidden_layers: usize,
    pub hidden_size: usize,
    pub learning_rate: f64,
    /// Global gradient 2-norm ceiling applied per optimizer step.
    pub grad_norm_clip: f64,
    /// Dropout probability inside each residual block; [0, 1).
    pub dropout: f64,
    pub max_epochs: usize,
    pub train_batch_size: usize,
    /// Epochs without validation-loss improvement before training halts.
    pub early_stop_patience: usize,
    /// Ensemble size; 1 = single model.
    pub n_ensemble_members: usize,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: usize) -> Result<()> {
            if v == 0 {
                return Err(Error::InvalidConfig(alloc::format!(
                    "{name} must be positive"
                )));
            }
            Ok(())
        }
        positive("n_hidden_layers", self.n_hidden_layers)?;
        positive("hidden_size", self.hidden_size)?;
        positive("max_epochs", self.max_epochs)?;
        positive("train_batch_size", self.train_batch_size)?;
        positive("early_stop_patience", self.early_stop_patience)?;
        positive("n_ensemble_members", self.n_ensemble_members)?;
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(
                "learning_rate must be positive".into(),
            ));
        }
        if !(self.grad_norm_clip.is_finite() && self.grad_norm_clip > 0.0) {
            return Err(Error::InvalidConfig(
                "grad_norm_clip must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::InvalidConfig("dropout must be in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Everything that defines one campaign run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    /// Target system accuracy; (0, 1].
    pub gamma: f64,
    /// Bound failure probability per stop check; (0, 1).
    pub delta: f64,
    /// Samples acquired per round.
    pub batch_size: usize,
    pub policy: AcquisitionPolicy,
    pub stopping: StoppingRule,
    pub model: ModelConfig,
    /// Master seed; model training, dropout, and any stochastic policy derive
    /// per-purpose streams from it.
    pub seed: u64,
    /// Optional cap on the number of acquisition rounds.
    pub max_steps: Option<usize>,
    pub cold_start: ColdStart,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && 0.0 < self.gamma && self.gamma <= 1.0) {
            return Err(Error::InvalidConfig("gamma must be in (0, 1]".into()));
        }
        if !(self.delta.is_finite() && 0.0 < self.delta && self.delta < 1.0) {
            return Err(Error::InvalidConfig("delta must be in (0, 1)".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        if let Some(0) = self.max_steps {
            return Err(Error::InvalidConfig("max_steps must be >= 1".into()));
        }
        self.model.validate()?;
        if self.policy.needs_ensemble() && self.model.n_ensemble_members < 2 {
            return Err(Error::InvalidConfig(alloc::format!(
                "policy {} needs n_ensemble_members >= 2",
                self.policy.name()
            )));
        }
        match &self.stopping {
            StoppingRule::Chernoff => {}
            StoppingRule::Naive { patience } => {
                if *patience == 0 {
                    return Err(Error::InvalidConfig("naive patience must be >= 1".into()));
                }
            }
            StoppingRule::MseThreshold { t_mse, patience } => {
                if !(t_mse.is_finite() && *t_mse > 0.0) {
                    return Err(Error::InvalidConfig("t_mse must be positive".into()));
                }
                if *patience == 0 {
                    return Err(Error::InvalidConfig(
                        "mse_threshold patience must be >= 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn small_model() -> ModelConfig {
        ModelConfig {
            n_hidden_layers: 1,
            hidden_size: 8,
            learning_rate: 0.1,
            grad_norm_clip: 1.0,
            dropout: 0.0,
            max_epochs: 5,
            train_batch_size: 16,
            early_stop_patience: 2,
            n_ensemble_members: 1,
        }
    }

    fn base() -> CampaignConfig {
        CampaignConfig {
            gamma: 0.98,
            delta: 0.05,
            batch_size: 10,
            policy: AcquisitionPolicy::LeastConfidence,
            stopping: StoppingRule::Chernoff,
            model: small_model(),
            seed: 7,
            max_steps: None,
            cold_start: ColdStart::UniformScores,
        }
    }

    #[test]
    fn valid_config_passes() {
        base().validate().unwrap();
    }

    #[test]
    fn scalar_domains_are_enforced() {
        for (mutate, _) in [
            (
                Box::new(|c: &mut CampaignConfig| c.gamma = 0.0)
                    as Box<dyn Fn(&mut CampaignConfig)>,
                "gamma",
            ),
            (Box::new(|c: &mut CampaignConfig| c.gamma = 1.5), "gamma"),
            (Box::new(|c: &mut CampaignConfig| c.delta = 0.0), "delta"),
            (Box::new(|c: &mut CampaignConfig| c.delta = 1.0), "delta"),
            (Box::new(|c: &mut CampaignConfig| c.batch_size = 0), "batch"),
            (
                Box::new(|c: &mut CampaignConfig| c.max_steps = Some(0)),
                "max_steps",
            ),
            (
                Box::new(|c: &mut CampaignConfig| c.model.dropout = 1.0),
                "dropout",
            ),
            (
                Box::new(|c: &mut CampaignConfig| c.model.learning_rate = -0.1),
                "lr",
            ),
            (
                Box::new(|c: &mut CampaignConfig| c.model.max_epochs = 0),
                "epochs",
            ),
            (
                Box::new(|c: &mut CampaignConfig| c.stopping = StoppingRule::Naive { patience: 0 }),
                "patience",
            ),
            (
                Box::new(|c: &mut CampaignConfig| {
                    c.stopping = StoppingRule::MseThreshold {
                        t_mse: 0.0,
                        patience: 3,
                    }
                }),
                "t_mse",
            ),
        ] {
            let mut config = base();
            mutate(&mut config);
            assert!(config.validate().is_err());
        }
    }

    #[test]
    fn ensemble_policies_require_two_members() {
        let mut config = base();
        config.policy = AcquisitionPolicy::QbcVariance;
        config.model.n_ensemble_members = 1;
        assert!(matches!(config.validate(), Err(Error::InvalidConfig(_))));
        config.model.n_ensemble_members = 2;
        config.stopping = StoppingRule::MseThreshold {
            t_mse: 0.1,
            patience: 10,
        };
        config.validate().unwrap();

        let mut bald = base();
        bald.policy = AcquisitionPolicy::Bald;
        assert!(bald.validate().is_err());
    }

    #[test]
    fn policies_serialize_with_snake_case_tags() {
        let policy = AcquisitionPolicy::FixedOrder {
            key: OrderKey::Aux("molecule_size".into()),
            direction: SortDirection::Descending,
        };
        let json = serde_json::to_string(&policy).unwrap();
        assert_eq!(
            json,
            r#"{"fixed_order":{"key":{"aux":"molecule_size"},"direction":"descending"}}"#
        );
        let back: AcquisitionPolicy = serde_json::from_str(&json).unwrap();
        assert_eq!(back, policy);
        assert_eq!(
            serde_json::to_string(&AcquisitionPolicy::LeastConfidence).unwrap(),
            r#""least_confidence""#
        );
    }
}
