//! Observation/inference partition bookkeeping.
//!
//! A campaign starts with every target sample in the inference set. Each round
//! moves one acquired batch into the observation set; a sample, once observed,
//! never returns. `obs_ids` preserves acquisition order so each step's batch
//! membership is reconstructible from the campaign log.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// The evolving disjoint observation/inference split over dense target ids
/// `0..n_target`.
///
/// This is a plain value type: it is mutated only by the engine's single
/// campaign loop and may be cloned to snapshot a step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionState {
    obs: Vec<usize>,
    in_inf: Vec<bool>,
    n_inf: usize,
    step: usize,
}

impl PartitionState {
    /// Fresh partition: observation set empty, inference set = all ids,
    /// step 0.
    pub fn init(n_target: usize) -> Result<Self> {
        if n_target == 0 {
            return Err(Error::EmptyTarget);
        }
        Ok(PartitionState {
            obs: Vec::new(),
            in_inf: alloc::vec![true; n_target],
            n_inf: n_target,
            step: 0,
        })
    }

    /// Moves `batch_ids` from the inference set to the observation set,
    /// preserving the selection order, and advances the step counter.
    ///
    /// Every id must currently be in the inference set; duplicates within the
    /// batch therefore also fail. An empty batch only advances the step.
    pub fn transfer_batch(&mut self, batch_ids: &[usize]) -> Result<()> {
        // Validate before mutating so a failed call leaves the state intact.
        let mut staged = alloc::vec::Vec::from(batch_ids);
        staged.sort_unstable();
        for pair in staged.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidTransfer { id: pair[0] });
            }
        }
        if let Some(&bad) = batch_ids
            .iter()
            .find(|&&id| id >= self.in_inf.len() || !self.in_inf[id])
        {
            return Err(Error::InvalidTransfer { id: bad });
        }
        for &id in batch_ids {
            self.in_inf[id] = false;
        }
        self.n_inf -= batch_ids.len();
        self.obs.extend_from_slice(batch_ids);
        self.step += 1;
        Ok(())
    }

    /// Acquired ids in acquisition order.
    pub fn obs_ids(&self) -> &[usize] {
        &self.obs
    }

    /// Inference-set ids in ascending order.
    pub fn inf_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.in_inf
            .iter()
            .enumerate()
            .filter(|(_, &inf)| inf)
            .map(|(id, _)| id)
    }

    pub fn contains_inf(&self, id: usize) -> bool {
        id < self.in_inf.len() && self.in_inf[id]
    }

    pub fn n_obs(&self) -> usize {
        self.obs.len()
    }

    pub fn n_inf(&self) -> usize {
        self.n_inf
    }

    pub fn n_target(&self) -> usize {
        self.in_inf.len()
    }

    /// Number of completed acquisition rounds.
    pub fn step(&self) -> usize {
        self.step
    }
}
