//! Tabular feature ingestion: comma-separated, UTF-8, one header row.
//!
//! Feature columns parse as numbers. Auxiliary columns parse as bit-string
//! fingerprints when every cell is a run of `0`/`1` characters (length >= 2,
//! e.g. `"0101"`), and as real-valued sort keys otherwise.

use std::path::Path;

use screenloop_core::{AuxColumn, Dataset, Fingerprint};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

/// How the label column is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    /// Non-negative integer class indices.
    #[default]
    Class,
    /// Real-valued regression targets.
    Value,
}

fn is_bitstring(cell: &str) -> bool {
    cell.len() >= 2 && cell.bytes().all(|b| b == b'0' || b == b'1')
}

/// Loads a CSV file into a dataset: `feature_columns` become the feature
/// matrix (in the given order), `label_column` the labels, and each
/// `aux_columns` entry a named auxiliary column. Row order is preserved.
pub fn load_csv_features(
    path: &Path,
    label_column: &str,
    label_kind: LabelKind,
    feature_columns: &[String],
    aux_columns: &[String],
) -> AppResult<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| AppError::runtime(format!("csv: open {}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    let column = |name: &str| -> AppResult<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| AppError::runtime(format!("csv: missing column '{name}'")))
    };

    let label_at = column(label_column)?;
    let feature_at: Vec<usize> = feature_columns
        .iter()
        .map(|name| column(name))
        .collect::<AppResult<_>>()?;
    let aux_at: Vec<usize> = aux_columns
        .iter()
        .map(|name| column(name))
        .collect::<AppResult<_>>()?;

    let mut features: Vec<f64> = Vec::new();
    let mut class_labels: Vec<usize> = Vec::new();
    let mut value_labels: Vec<f64> = Vec::new();
    let mut aux_cells: Vec<Vec<String>> = vec![Vec::new(); aux_columns.len()];

    for (row, record) in reader.records().enumerate() {
        let record = record?;
        for (&at, name) in feature_at.iter().zip(feature_columns) {
            let cell = &record[at];
            let v: f64 = cell.parse().map_err(|_| {
                AppError::runtime(format!(
                    "csv: row {row}, column '{name}': '{cell}' is not a number"
                ))
            })?;
            features.push(v);
        }
        let cell = &record[label_at];
        match label_kind {
            LabelKind::Class => class_labels.push(cell.parse().map_err(|_| {
                AppError::runtime(format!(
                    "csv: row {row}, column '{label_column}': '{cell}' is not a class index"
                ))
            })?),
            LabelKind::Value => value_labels.push(cell.parse().map_err(|_| {
                AppError::runtime(format!(
                    "csv: row {row}, column '{label_column}': '{cell}' is not a number"
                ))
            })?),
        }
        for (cells, &at) in aux_cells.iter_mut().zip(&aux_at) {
            cells.push(record[at].to_string());
        }
    }

    let n_features = feature_columns.len();
    let mut dataset = match label_kind {
        LabelKind::Class => {
            let n_classes = class_labels.iter().max().map_or(1, |&m| m + 1);
            Dataset::from_classification(features, n_features, class_labels, n_classes)
        }
        LabelKind::Value => Dataset::from_regression(features, n_features, value_labels),
    }
    .map_err(|e| AppError::runtime(format!("csv: {e}")))?;

    for (name, cells) in aux_columns.iter().zip(aux_cells) {
        let col = if cells.iter().all(|c| is_bitstring(c)) {
            AuxColumn::Bits(
                cells
                    .iter()
                    .map(|c| {
                        let bits: Vec<bool> = c.bytes().map(|b| b == b'1').collect();
                        Fingerprint::from_bits(&bits)
                    })
                    .collect(),
            )
        } else {
            let reals: Vec<f64> = cells
                .iter()
                .enumerate()
                .map(|(row, c)| {
                    c.parse().map_err(|_| {
                        AppError::runtime(format!(
                            "csv: row {row}, column '{name}': '{c}' is neither a bit string nor a number"
                        ))
                    })
                })
                .collect::<AppResult<_>>()?;
            AuxColumn::Real(reals)
        };
        dataset = dataset
            .with_aux(name, col)
            .map_err(|e| AppError::runtime(format!("csv: {e}")))?;
    }
    Ok(dataset)
}
