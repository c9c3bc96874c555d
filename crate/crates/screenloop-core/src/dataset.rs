//! Immutable sample storage: a dense feature matrix, per-sample labels, and
//! optional named auxiliary columns (heuristic sort keys as reals, molecular
//! fingerprints as bit vectors).
//!
//! Samples are identified by dense indices `0..n_samples`; external string
//! identifiers, when present, belong in auxiliary columns managed by the
//! loading layer. Dense ids keep partition bookkeeping O(1) and make every
//! log entry self-describing.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single sample's label: a class index or a real target value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Class(usize),
    Value(f64),
}

/// All labels of a dataset. Classification carries the declared class count
/// `n_classes`, which subsets inherit even if they do not contain every class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Labels {
    Classes {
        values: Vec<usize>,
        n_classes: usize,
    },
    Values(Vec<f64>),
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Classes { values, .. } => values.len(),
            Labels::Values(values) => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The label of sample `id`. Panics if `id` is out of range.
    pub fn get(&self, id: usize) -> Label {
        match self {
            Labels::Classes { values, .. } => Label::Class(values[id]),
            Labels::Values(values) => Label::Value(values[id]),
        }
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, Labels::Classes { .. })
    }

    pub fn n_classes(&self) -> Option<usize> {
        match self {
            Labels::Classes { n_classes, .. } => Some(*n_classes),
            Labels::Values(_) => None,
        }
    }
}

/// A packed bit vector (e.g. a molecular fingerprint). Bits beyond `n_bits`
/// in the last word are kept zero so popcounts never see garbage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    words: Vec<u64>,
    n_bits: usize,
}

impl Fingerprint {
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut words = alloc::vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1u64 << (i % 64);
            }
        }
        Fingerprint {
            words,
            n_bits: bits.len(),
        }
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn bit(&self, i: usize) -> bool {
        i < self.n_bits && (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn popcount(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    fn and_or_counts(&self, other: &Fingerprint) -> (u32, u32) {
        let mut and = 0;
        let mut or = 0;
        for (a, b) in self.words.iter().zip(&other.words) {
            and += (a & b).count_ones();
            or += (a | b).count_ones();
        }
        (and, or)
    }

    /// Tanimoto distance `1 - |A and B| / |A or B|`.
    ///
    /// Two all-zero fingerprints are treated as identical objects (distance
    /// 0), which avoids the 0/0 form. Widths must match.
    pub fn tanimoto_distance(&self, other: &Fingerprint) -> Result<f64> {
        if self.n_bits != other.n_bits {
            return Err(Error::DimensionMismatch {
                got: other.n_bits,
                expected: self.n_bits,
            });
        }
        let (and, or) = self.and_or_counts(other);
        if or == 0 {
            return Ok(0.0);
        }
        Ok(1.0 - f64::from(and) / f64::from(or))
    }
}

/// A named per-sample column carried alongside the features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxColumn {
    Real(Vec<f64>),
    Bits(Vec<Fingerprint>),
}

impl AuxColumn {
    pub fn len(&self) -> usize {
        match self {
            AuxColumn::Real(v) => v.len(),
            AuxColumn::Bits(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An immutable dataset: `n_samples x n_features` row-major features, one
/// label per sample, and optional auxiliary columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Labels,
    aux: BTreeMap<String, AuxColumn>,
}

impl Dataset {
    /// Builds a classification dataset. `features` is row-major with
    /// `n_features` columns; `n_classes` is the declared class count.
    pub fn from_classification(
        features: Vec<f64>,
        n_features: usize,
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self> {
        for (id, &label) in labels.iter().enumerate() {
            if label >= n_classes {
                return Err(Error::LabelOutOfRange {
                    id,
                    label,
                    n_classes,
                });
            }
        }
        Self::new(
            features,
            n_features,
            Labels::Classes {
                values: labels,
                n_classes,
            },
        )
    }

    /// Builds a regression dataset with real-valued targets.
    pub fn from_regression(
        features: Vec<f64>,
        n_features: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        for (id, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteLabel { id });
            }
        }
        Self::new(features, n_features, Labels::Values(values))
    }

    fn new(features: Vec<f64>, n_features: usize, labels: Labels) -> Result<Self> {
        let n_samples = labels.len();
        if n_samples == 0 {
            return Err(Error::EmptyDataset);
        }
        if n_features == 0 || features.len() != n_samples * n_features {
            return Err(Error::LengthMismatch {
                left: features.len(),
                right: n_samples * n_features,
            });
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature {
                row: pos / n_features,
                col: pos % n_features,
            });
        }
        Ok(Dataset {
            features,
            n_features,
            labels,
            aux: BTreeMap::new(),
        })
    }

    /// Attaches an auxiliary column, consuming and returning the dataset so
    /// loaders can chain attachments.
    pub fn with_aux(mut self, name: &str, column: AuxColumn) -> Result<Self> {
        if column.len() != self.n_samples() {
            return Err(Error::AuxLengthMismatch {
                name: name.to_string(),
                got: column.len(),
                expected: self.n_samples(),
            });
        }
        self.aux.insert(name.to_string(), column);
        Ok(self)
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Row-major feature storage.
    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn feature_row(&self, id: usize) -> &[f64] {
        &self.features[id * self.n_features..(id + 1) * self.n_features]
    }

    /// Copies the feature rows of `ids` (in the given order) into a dense
    /// row-major buffer.
    pub fn gather_features(&self, ids: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(ids.len() * self.n_features);
        for &id in ids {
            out.extend_from_slice(self.feature_row(id));
        }
        out
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn label(&self, id: usize) -> Label {
        self.labels.get(id)
    }

    pub fn is_classification(&self) -> bool {
        self.labels.is_classification()
    }

    pub fn n_classes(&self) -> Option<usize> {
        self.labels.n_classes()
    }

    pub fn aux_names(&self) -> impl Iterator<Item = &str> {
        self.aux.keys().map(String::as_str)
    }

    pub fn aux(&self, name: &str) -> Option<&AuxColumn> {
        self.aux.get(name)
    }

    /// The real-valued auxiliary column `name`, or an error naming it.
    pub fn aux_real(&self, name: &str) -> Result<&[f64]> {
        match self.aux.get(name) {
            Some(AuxColumn::Real(v)) => Ok(v),
            Some(_) => Err(Error::AuxKindMismatch {
                name: name.to_string(),
            }),
            None => Err(Error::MissingAuxColumn {
                name: name.to_string(),
            }),
        }
    }

    /// The fingerprint auxiliary column `name`, or an error naming it.
    pub fn aux_bits(&self, name: &str) -> Result<&[Fingerprint]> {
        match self.aux.get(name) {
            Some(AuxColumn::Bits(v)) => Ok(v),
            Some(_) => Err(Error::AuxKindMismatch {
                name: name.to_string(),
            }),
            None => Err(Error::MissingAuxColumn {
                name: name.to_string(),
            }),
        }
    }

    /// A new dataset containing `ids` in the given order, with re-densified
    /// ids `0..ids.len()`. Auxiliary columns are subset alongside; the
    /// declared class count is inherited.
    pub fn subset(&self, ids: &[usize]) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(&bad) = ids.iter().find(|&&id| id >= self.n_samples()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "subset id {bad} out of range for {} samples",
                self.n_samples()
            )));
        }
        let features = self.gather_features(ids);
        let labels = match &self.labels {
            Labels::Classes { values, n_classes } => Labels::Classes {
                values: ids.iter().map(|&id| values[id]).collect(),
                n_classes: *n_classes,
            },
            Labels::Values(values) => Labels::Values(ids.iter().map(|&id| values[id]).collect()),
        };
        let mut out = Dataset::new(features, self.n_features, labels)?;
        for (name, col) in &self.aux {
            let sub = match col {
                AuxColumn::Real(v) => AuxColumn::Real(ids.iter().map(|&id| v[id]).collect()),
                AuxColumn::Bits(v) => {
                    AuxColumn::Bits(ids.iter().map(|&id| v[id].clone()).collect())
                }
            };
            out.aux.insert(name.clone(), sub);
        }
        Ok(out)
    }
}
