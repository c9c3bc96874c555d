//! Core algorithms for *hybrid screens*: screening campaigns over a fixed,
//! finite target set in which part of the readout is measured and the rest is
//! predicted by a model trained on the measured part.
//!
//! A campaign maintains a partition of the target set into an observation set
//! (labels acquired from an oracle, i.e. the simulated experiment) and an
//! inference set (labels filled in by the model). Each round the model is
//! retrained from scratch on the observation set, the inference set is scored
//! by an acquisition policy, the highest-scoring batch is transferred to the
//! observation set and labeled, and a stopping rule decides whether the
//! combined *system accuracy*
//!
//! ```text
//! mu_sys = (|obs| + #correct predictions on inf) / |target|
//! ```
//!
//! is already above the campaign threshold `gamma`. The flagship stopping rule
//! lower-bounds the unknown inference-set accuracy from the accuracy measured
//! on the batch just acquired, via a KL-Chernoff tail inversion, so the claim
//! "`mu_sys > gamma`" holds with probability at least `1 - delta` per check.
//!
//! The crate is `no_std` + `alloc`: it performs no I/O and spawns no threads.
//! File formats, configuration files, and the command-line surface live in the
//! companion `screenloop` crate.
//!
//! Module map:
//!
//! - [`dataset`]: immutable feature/label storage plus named auxiliary columns
//!   (heuristic sort keys, bit fingerprints).
//! - [`partition`]: the observation/inference index bookkeeping.
//! - [`prediction`]: per-sample prediction values (class probabilities or
//!   ensemble regression outputs).
//! - [`config`]: campaign and model hyperparameter containers with validation.
//! - [`predictor`]: a from-scratch residual MLP trained by minibatch gradient
//!   descent with early stopping, plus ensembles.
//! - [`acquisition`]: scoring policies and batch selection.
//! - [`stopping`]: the KL-Chernoff bound, the threshold rules, and a
//!   Monte-Carlo coverage validator.
//! - [`metrics`]: ground-truth evaluation (simulation only), calibration
//!   diagnostics, and hard-example analysis.
//! - [`engine`]: the campaign loop tying everything together, with per-step
//!   audit records.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod acquisition;
pub mod config;
pub mod dataset;
pub mod engine;
pub mod error;
mod linalg;
pub mod metrics;
pub mod partition;
pub mod prediction;
pub mod predictor;
mod seedmix;
pub mod stopping;

pub use config::{
    AcquisitionPolicy, CampaignConfig, ColdStart, ModelConfig, OrderKey, SortDirection,
    StoppingRule,
};
pub use dataset::{AuxColumn, Dataset, Fingerprint, Label, Labels};
pub use engine::{
    run_campaign, run_comparison, CampaignLog, DatasetOracle, HybridEntry, LabelOracle,
    LabelSource, StepPrediction, StepRecord,
};
pub use error::{Error, Result};
pub use metrics::{
    calibration_bins, flag_hard_examples, hard_set_fraction_acquired, system_accuracy,
    validate_lemma1, weak_calibration_violation, AccuracyCurve, BatchOrderingOutcome,
    CalibrationBin, CalibrationReport, SyntheticBatchSpec,
};
pub use partition::PartitionState;
pub use prediction::Prediction;
pub use predictor::Model;
pub use stopping::{
    chernoff_lower_bound, estimate_system_accuracy, kl_bernoulli, should_stop_chernoff,
    should_stop_naive, should_stop_regression, validate_bound_coverage, StopDecision, StopReason,
};
