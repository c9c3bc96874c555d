//! Stopping rules for hybrid screening campaigns.
//!
//! The flagship rule converts the accuracy measured on the batch just
//! acquired into a high-probability lower bound on the accuracy of the
//! remaining inference set, by inverting the Chernoff tail of a Bernoulli
//! mean: with `thr = ln(1/delta) / n`,
//!
//! ```text
//! alpha = min { a in [0, mu_hat] : KL(mu_hat || a) <= thr }
//! ```
//!
//! where `KL` is the Bernoulli relative entropy in nats. Because the batch is
//! the *least*-confident slice of the inference set, a weakly calibrated
//! model's remaining samples are at least as accurate as the batch, so
//! `alpha` transfers to the inference set and the campaign can stop as soon
//! as `(n_obs + alpha * n_inf) / n_target > gamma`, a claim that fails with
//! probability at most `delta` per check (checks across steps are not
//! multiplicity-corrected; empirically the per-step rates are already
//! conservative — see [`validate_bound_coverage`]).
//!
//! Two heuristic alternatives are provided for comparison studies: a naive
//! plug-in threshold rule with patience (no guarantee), and a batch-MSE rule
//! for regression campaigns (no distribution-free guarantee exists there).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::PartitionState;

/// Absolute bisection tolerance for [`chernoff_lower_bound`].
const BISECTION_TOL: f64 = 1e-9;

/// Why (or whether) a campaign stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The estimated system accuracy cleared `gamma`.
    ThresholdMet,
    /// The inference set is empty; everything has been observed.
    InferenceExhausted,
    /// The configured round cap was reached (truncation, not a stop).
    MaxSteps,
    NotStopped,
}

/// Outcome of one stop-rule evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopDecision {
    pub stop: bool,
    /// The KL-Chernoff lower bound on inference accuracy, when the rule
    /// computes one.
    pub alpha: Option<f64>,
    /// The system-accuracy estimate the rule compared against `gamma`, when
    /// it computes one.
    pub est_system_accuracy: Option<f64>,
    pub reason: StopReason,
}

impl StopDecision {
    fn not_stopped(alpha: Option<f64>, est: Option<f64>) -> Self {
        StopDecision {
            stop: false,
            alpha,
            est_system_accuracy: est,
            reason: StopReason::NotStopped,
        }
    }
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
        return Err(Error::InvalidArgument(alloc::format!(
            "{name} must be in [0, 1], got {v}"
        )));
    }
    Ok(())
}

/// Bernoulli relative entropy `KL(mu_hat || a)` in nats.
///
/// Uses the conventions `0 * ln(0/x) = 0`; the result is `+inf` when `a` is 0
/// or 1 while `mu_hat` puts mass on the other outcome.
pub fn kl_bernoulli(mu_hat: f64, a: f64) -> Result<f64> {
    check_unit_interval("mu_hat", mu_hat)?;
    check_unit_interval("a", a)?;
    let mut kl = 0.0;
    if mu_hat > 0.0 {
        kl += mu_hat * libm::log(mu_hat / a);
    }
    if mu_hat < 1.0 {
        kl += (1.0 - mu_hat) * libm::log((1.0 - mu_hat) / (1.0 - a));
    }
    Ok(kl)
}

/// The KL-Chernoff lower bound `alpha`: the smallest `a` in `[0, mu_hat]`
/// with `KL(mu_hat || a) <= ln(1/delta) / n`.
///
/// `KL(mu_hat || a)` is continuous and strictly decreasing in `a` on
/// `(0, mu_hat]`, so the set is an interval and bisection finds its left
/// endpoint. The bisection keeps the invariant `KL(lo) > thr >= KL(hi)` and
/// returns `lo` (absolute tolerance 1e-9), rounding downward so the returned
/// value never exceeds the exact root — the bound errs on the safe side.
/// `alpha = 0` when `mu_hat = 0`.
pub fn chernoff_lower_bound(mu_hat: f64, n: usize, delta: f64) -> Result<f64> {
    check_unit_interval("mu_hat", mu_hat)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    if !(delta.is_finite() && 0.0 < delta && delta < 1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "delta must be in (0, 1), got {delta}"
        )));
    }
    if mu_hat == 0.0 {
        return Ok(0.0);
    }
    let thr = libm::log(1.0 / delta) / n as f64;
    let mut lo = 0.0;
    let mut hi = mu_hat;
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if kl_bernoulli(mu_hat, mid)? <= thr {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// The system-accuracy estimate `(n_obs + estimate * n_inf) / (n_obs + n_inf)`
/// obtained by crediting observed samples fully and inference samples at
/// `estimate`.
pub fn estimate_system_accuracy(n_obs: usize, n_inf: usize, estimate: f64) -> Result<f64> {
    if n_obs + n_inf == 0 {
        return Err(Error::EmptyTarget);
    }
    check_unit_interval("estimate", estimate)?;
    Ok((n_obs as f64 + estimate * n_inf as f64) / (n_obs + n_inf) as f64)
}

/// The guaranteed stopping rule, evaluated on post-transfer set sizes.
///
/// `batch_accuracy` is measured on the batch just acquired (`n_b` samples).
/// Stops with `InferenceExhausted` when nothing remains to predict (that
/// reason wins even when the threshold also clears — an exhausted campaign
/// ended because it ran out of candidates, not because the bound released
/// it), otherwise with `ThresholdMet` when the alpha-based estimate strictly
/// exceeds `gamma`.
pub fn should_stop_chernoff(
    state: &PartitionState,
    batch_accuracy: f64,
    n_b: usize,
    gamma: f64,
    delta: f64,
) -> Result<StopDecision> {
    check_unit_interval("gamma", gamma)?;
    let alpha = chernoff_lower_bound(batch_accuracy, n_b, delta)?;
    let est = estimate_system_accuracy(state.n_obs(), state.n_inf(), alpha)?;
    if state.n_inf() == 0 {
        return Ok(StopDecision {
            stop: true,
            alpha: Some(alpha),
            est_system_accuracy: Some(est),
            reason: StopReason::InferenceExhausted,
        });
    }
    if est > gamma {
        return Ok(StopDecision {
            stop: true,
            alpha: Some(alpha),
            est_system_accuracy: Some(est),
            reason: StopReason::ThresholdMet,
        });
    }
    Ok(StopDecision::not_stopped(Some(alpha), Some(est)))
}

/// The naive patience rule: stop once the last `patience` plug-in estimates
/// (batch accuracy credited to the whole inference set, no bound) all exceed
/// `gamma`.
pub fn should_stop_naive(history: &[f64], gamma: f64, patience: usize) -> Result<StopDecision> {
    if patience == 0 {
        return Err(Error::InvalidArgument("patience must be >= 1".into()));
    }
    check_unit_interval("gamma", gamma)?;
    let est = history.last().copied();
    if history.len() >= patience
        && history[history.len() - patience..]
            .iter()
            .all(|&e| e > gamma)
    {
        return Ok(StopDecision {
            stop: true,
            alpha: None,
            est_system_accuracy: est,
            reason: StopReason::ThresholdMet,
        });
    }
    Ok(StopDecision::not_stopped(None, est))
}

/// The regression rule: stop once the last `patience` acquired-batch MSE
/// values are all below `t_mse`. Heuristic — regression offers no
/// distribution-free accuracy guarantee.
pub fn should_stop_regression(
    mse_history: &[f64],
    t_mse: f64,
    patience: usize,
) -> Result<StopDecision> {
    if patience == 0 {
        return Err(Error::InvalidArgument("patience must be >= 1".into()));
    }
    if !(t_mse.is_finite() && t_mse > 0.0) {
        return Err(Error::InvalidArgument("t_mse must be positive".into()));
    }
    if mse_history.len() >= patience
        && mse_history[mse_history.len() - patience..]
            .iter()
            .all(|&m| m < t_mse)
    {
        return Ok(StopDecision {
            stop: true,
            alpha: None,
            est_system_accuracy: None,
            reason: StopReason::ThresholdMet,
        });
    }
    Ok(StopDecision::not_stopped(None, None))
}

/// Monte-Carlo coverage check of [`chernoff_lower_bound`].
///
/// Each trial draws `n` Bernoulli(`mu_true`) outcomes, computes `alpha` from
/// the sample mean, and counts a failure when `mu_true < alpha` (the bound
/// claimed more than the truth). Returns the empirical failure fraction,
/// which should not exceed `delta` beyond Monte-Carlo slack.
pub fn validate_bound_coverage<R: Rng>(
    mu_true: f64,
    n: usize,
    delta: f64,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    check_unit_interval("mu_true", mu_true)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let mut failures = 0usize;
    for _ in 0..trials {
        let mut successes = 0usize;
        for _ in 0..n {
            if rng.gen::<f64>() < mu_true {
                successes += 1;
            }
        }
        let mu_hat = successes as f64 / n as f64;
        if mu_true < chernoff_lower_bound(mu_hat, n, delta)? {
            failures += 1;
        }
    }
    Ok(failures as f64 / trials as f64)
}
