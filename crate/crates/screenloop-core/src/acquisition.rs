//! Scoring policies and batch selection.
//!
//! Every policy reduces to "score each candidate, higher = acquire sooner".
//! [`select_batch`] then takes the top `n_b` scores with ties broken by
//! ascending sample id — except Tanimoto diversity, which is a greedy
//! farthest-point rule: after each pick the remaining candidates' scores are
//! re-minimized against the pick, so the batch spreads out rather than
//! clustering at the single farthest region.

use alloc::vec::Vec;

use rand::Rng;

use crate::config::{OrderKey, SortDirection};
use crate::dataset::{Dataset, Fingerprint};
use crate::error::{Error, Result};
use crate::prediction::Prediction;

/// Candidate ids paired with their acquisition scores (higher = selected
/// sooner), tagged with the policy that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidates {
    ids: Vec<usize>,
    scores: Vec<f64>,
    policy: &'static str,
}

impl ScoredCandidates {
    pub fn new(ids: Vec<usize>, scores: Vec<f64>, policy: &'static str) -> Result<Self> {
        if ids.len() != scores.len() {
            return Err(Error::LengthMismatch {
                left: ids.len(),
                right: scores.len(),
            });
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(
                "acquisition scores must be finite".into(),
            ));
        }
        Ok(ScoredCandidates {
            ids,
            scores,
            policy,
        })
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn policy(&self) -> &'static str {
        self.policy
    }
}

/// Least-confidence scores: `1 - max_k p(k)` per prediction.
pub fn score_least_confidence(predictions: &[Prediction]) -> Result<Vec<f64>> {
    predictions
        .iter()
        .map(|p| Ok(1.0 - p.confidence()?))
        .collect()
}

/// I.i.d. uniform scores on `[0, 1)` — a random permutation of acquisition
/// priority, reproducible from the RNG state.
pub fn score_random<R: Rng>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyCandidates);
    }
    Ok((0..n).map(|_| rng.gen::<f64>()).collect())
}

fn entropy_nats(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * libm::log(p);
        }
    }
    h
}

fn classification_probs(p: &Prediction) -> Result<&[f64]> {
    match p {
        Prediction::Classification { probs } => Ok(probs),
        Prediction::Regression { .. } => Err(Error::PolicyMismatch {
            expected: "classification predictions",
            got: "regression predictions",
        }),
    }
}

/// Mutual-information scores over an ensemble's class probabilities:
/// `H(mean_m p_m) - mean_m H(p_m)`, entropies in nats.
///
/// Non-negative up to floating-point error (Jensen's inequality); tiny
/// negatives around -1e-16 are returned as-is rather than clamped.
pub fn score_bald(member_predictions: &[Vec<Prediction>]) -> Result<Vec<f64>> {
    if member_predictions.len() < 2 {
        return Err(Error::InvalidArgument(
            "mutual-information scoring needs an ensemble of at least 2 members".into(),
        ));
    }
    let n = member_predictions[0].len();
    for member in member_predictions {
        if member.len() != n {
            return Err(Error::LengthMismatch {
                left: member.len(),
                right: n,
            });
        }
    }
    let m_count = member_predictions.len() as f64;
    let mut scores = Vec::with_capacity(n);
    for i in 0..n {
        let k = classification_probs(&member_predictions[0][i])?.len();
        let mut mean = alloc::vec![0.0; k];
        let mut mean_entropy = 0.0;
        for member in member_predictions {
            let probs = classification_probs(&member[i])?;
            if probs.len() != k {
                return Err(Error::DimensionMismatch {
                    got: probs.len(),
                    expected: k,
                });
            }
            for (acc, &p) in mean.iter_mut().zip(probs) {
                *acc += p;
            }
            mean_entropy += entropy_nats(probs);
        }
        for acc in &mut mean {
            *acc /= m_count;
        }
        scores.push(entropy_nats(&mean) - mean_entropy / m_count);
    }
    Ok(scores)
}

/// Query-by-committee scores for regression: the ensemble's per-sample
/// prediction variance, passed through unchanged.
pub fn score_qbc_variance(variances: &[f64]) -> Result<Vec<f64>> {
    if variances.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidArgument(
            "ensemble variances must be finite and non-negative".into(),
        ));
    }
    Ok(variances.to_vec())
}

/// A static ranking over the whole dataset from a key column (or the sample
/// id itself). `Ascending` acquires the smallest key first, so the score is
/// the negated key; `Descending` acquires the largest first.
pub fn score_fixed_order(
    dataset: &Dataset,
    key: &OrderKey,
    direction: SortDirection,
) -> Result<Vec<f64>> {
    let keys: Vec<f64> = match key {
        OrderKey::SampleId => (0..dataset.n_samples()).map(|i| i as f64).collect(),
        OrderKey::Aux(name) => dataset.aux_real(name)?.to_vec(),
    };
    Ok(match direction {
        SortDirection::Ascending => keys.iter().map(|k| -k).collect(),
        SortDirection::Descending => keys,
    })
}

/// Diversity scores: each candidate's minimum Tanimoto distance to the
/// acquired set (1.0 for every candidate when nothing is acquired yet).
/// `fingerprints` is indexed by sample id.
pub fn score_tanimoto_diversity(
    fingerprints: &[Fingerprint],
    acquired_ids: &[usize],
    candidate_ids: &[usize],
) -> Result<Vec<f64>> {
    let fp = |id: usize| -> Result<&Fingerprint> {
        fingerprints
            .get(id)
            .ok_or(Error::InvalidArgument("fingerprint id out of range".into()))
    };
    let mut scores = Vec::with_capacity(candidate_ids.len());
    for &c in candidate_ids {
        let cand = fp(c)?;
        let mut min_dist = 1.0;
        let mut any = false;
        for &a in acquired_ids {
            let d = cand.tanimoto_distance(fp(a)?)?;
            if !any || d < min_dist {
                min_dist = d;
                any = true;
            }
        }
        scores.push(if any { min_dist } else { 1.0 });
    }
    Ok(scores)
}

/// Picks the acquisition batch.
///
/// With `fingerprints` absent, this is static top-`n_b` selection: highest
/// scores first, ties broken by ascending sample id. With `fingerprints`
/// present (Tanimoto diversity), selection is greedy farthest-point: after
/// each pick, every remaining candidate's score is re-minimized against its
/// distance to the pick. If there are at most `n_b` candidates, all are
/// returned.
pub fn select_batch(
    scored: &ScoredCandidates,
    n_b: usize,
    fingerprints: Option<&[Fingerprint]>,
) -> Result<Vec<usize>> {
    if n_b == 0 {
        return Err(Error::EmptyBatch);
    }
    if scored.ids.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let k = n_b.min(scored.ids.len());
    match fingerprints {
        None => {
            let mut order: Vec<usize> = (0..scored.ids.len()).collect();
            order.sort_unstable_by(|&a, &b| {
                scored.scores[b]
                    .total_cmp(&scored.scores[a])
                    .then(scored.ids[a].cmp(&scored.ids[b]))
            });
            Ok(order[..k].iter().map(|&i| scored.ids[i]).collect())
        }
        Some(fps) => {
            let n = scored.ids.len();
            let mut current = scored.scores.clone();
            let mut taken = alloc::vec![false; n];
            let mut batch = Vec::with_capacity(k);
            for _ in 0..k {
                let mut best: Option<usize> = None;
                for i in 0..n {
                    if taken[i] {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some(j) => {
                            current[i] > current[j]
                                || (current[i] == current[j] && scored.ids[i] < scored.ids[j])
                        }
                    };
                    if better {
                        best = Some(i);
                    }
                }
                let pick = best.expect("k <= candidate count");
                taken[pick] = true;
                let pick_id = scored.ids[pick];
                batch.push(pick_id);
                let pick_fp = fps
                    .get(pick_id)
                    .ok_or(Error::InvalidArgument("fingerprint id out of range".into()))?;
                for i in 0..n {
                    if taken[i] {
                        continue;
                    }
                    let cand_fp = fps
                        .get(scored.ids[i])
                        .ok_or(Error::InvalidArgument("fingerprint id out of range".into()))?;
                    let d = cand_fp.tanimoto_distance(pick_fp)?;
                    if d < current[i] {
                        current[i] = d;
                    }
                }
            }
            Ok(batch)
        }
    }
}
