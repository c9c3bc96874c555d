//! IDX image/label files (the classic big-endian handwriting-dataset format).
//!
//! Layout: a `u32` big-endian magic number, big-endian `u32` dimensions, then
//! a flat unsigned-byte payload. Image files use magic `2051` (`0x00000803`)
//! with dims `[n, rows, cols]`; label files use magic `2049` (`0x00000801`)
//! with dims `[n]`. Pixels load scaled to `[0, 1]` by dividing by 255.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use screenloop_core::Dataset;

use crate::error::{AppError, AppResult};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

fn read_u32_be(bytes: &mut impl Read, what: &str) -> AppResult<u32> {
    let mut buf = [0u8; 4];
    bytes
        .read_exact(&mut buf)
        .map_err(|_| AppError::runtime(format!("idx: truncated {what}")))?;
    Ok(u32::from_be_bytes(buf))
}

fn read_payload(bytes: &mut impl Read, len: usize, what: &str) -> AppResult<Vec<u8>> {
    let mut payload = vec![0u8; len];
    bytes
        .read_exact(&mut payload)
        .map_err(|_| AppError::runtime(format!("idx: truncated {what} (expected {len} bytes)")))?;
    let mut probe = [0u8; 1];
    if bytes.read(&mut probe)? != 0 {
        return Err(AppError::runtime(format!(
            "idx: {what} has trailing bytes beyond the declared size"
        )));
    }
    Ok(payload)
}

/// Loads an image/label pair into a classification dataset with
/// `rows * cols` features per sample; class count = highest label + 1.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> AppResult<Dataset> {
    let mut images = fs::File::open(images_path)
        .map_err(|e| AppError::runtime(format!("idx: open {}: {e}", images_path.display())))?;
    let magic = read_u32_be(&mut images, "images magic")?;
    if magic != IMAGES_MAGIC {
        return Err(AppError::runtime(format!(
            "idx: images magic {magic}, expected {IMAGES_MAGIC}"
        )));
    }
    let n = read_u32_be(&mut images, "images count")? as usize;
    let rows = read_u32_be(&mut images, "images rows")? as usize;
    let cols = read_u32_be(&mut images, "images cols")? as usize;
    let pixels = read_payload(&mut images, n * rows * cols, "images payload")?;

    let mut labels = fs::File::open(labels_path)
        .map_err(|e| AppError::runtime(format!("idx: open {}: {e}", labels_path.display())))?;
    let magic = read_u32_be(&mut labels, "labels magic")?;
    if magic != LABELS_MAGIC {
        return Err(AppError::runtime(format!(
            "idx: labels magic {magic}, expected {LABELS_MAGIC}"
        )));
    }
    let n_labels = read_u32_be(&mut labels, "labels count")? as usize;
    if n_labels != n {
        return Err(AppError::runtime(format!(
            "idx: count mismatch: {n} images vs {n_labels} labels"
        )));
    }
    let label_bytes = read_payload(&mut labels, n_labels, "labels payload")?;

    let features: Vec<f64> = pixels.iter().map(|&p| f64::from(p) / 255.0).collect();
    let classes: Vec<usize> = label_bytes.iter().map(|&l| l as usize).collect();
    let n_classes = classes.iter().max().map_or(1, |&m| m + 1);
    Dataset::from_classification(features, rows * cols, classes, n_classes)
        .map_err(|e| AppError::runtime(format!("idx: {e}")))
}

/// Writes an image file: `n` images of `rows x cols` unsigned bytes.
pub fn write_idx_images(
    path: &Path,
    pixels: &[u8],
    n: usize,
    rows: usize,
    cols: usize,
) -> AppResult<()> {
    if pixels.len() != n * rows * cols {
        return Err(AppError::runtime(format!(
            "idx: {} pixels do not fill {n} images of {rows}x{cols}",
            pixels.len()
        )));
    }
    let mut file = fs::File::create(path)?;
    for dim in [IMAGES_MAGIC, n as u32, rows as u32, cols as u32] {
        file.write_all(&dim.to_be_bytes())?;
    }
    file.write_all(pixels)?;
    Ok(())
}

/// Writes a label file: `n` unsigned-byte class labels.
pub fn write_idx_labels(path: &Path, labels: &[u8]) -> AppResult<()> {
    let mut file = fs::File::create(path)?;
    for dim in [LABELS_MAGIC, labels.len() as u32] {
        file.write_all(&dim.to_be_bytes())?;
    }
    file.write_all(labels)?;
    Ok(())
}

/// Quantizes `[0, 1]` features back to bytes (round to nearest). Exact
/// inverse of the `/255` load scaling for byte-valued sources.
pub fn quantize_pixels(features: &[f64]) -> Vec<u8> {
    features
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use screenloop_core::Label;

    fn dir() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn a_pair_of_valid_files_loads_with_scaled_pixels() {
        let d = dir();
        let images = d.path().join("img.idx");
        let labels = d.path().join("lab.idx");
        // 2 images of 28x28.
        let pixels: Vec<u8> = (0..2 * 28 * 28).map(|i| (i % 256) as u8).collect();
        write_idx_images(&images, &pixels, 2, 28, 28).unwrap();
        write_idx_labels(&labels, &[3, 7]).unwrap();

        let ds = load_idx(&images, &labels).unwrap();
        assert_eq!(ds.n_samples(), 2);
        assert_eq!(ds.n_features(), 784);
        assert_eq!(ds.label(0), Label::Class(3));
        assert_eq!(ds.label(1), Label::Class(7));
        assert_eq!(ds.features()[1], 1.0 / 255.0);
        assert_eq!(ds.n_classes(), Some(8));
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let d = dir();
        let images = d.path().join("img.idx");
        let labels = d.path().join("lab.idx");
        let pixels: Vec<u8> = (0..3 * 4 * 4).map(|i| (i * 11 % 256) as u8).collect();
        write_idx_images(&images, &pixels, 3, 4, 4).unwrap();
        write_idx_labels(&labels, &[0, 1, 2]).unwrap();

        let ds = load_idx(&images, &labels).unwrap();
        let images2 = d.path().join("img2.idx");
        let labels2 = d.path().join("lab2.idx");
        write_idx_images(&images2, &quantize_pixels(ds.features()), 3, 4, 4).unwrap();
        let classes: Vec<u8> = (0..3)
            .map(|id| match ds.label(id) {
                Label::Class(c) => c as u8,
                Label::Value(_) => unreachable!(),
            })
            .collect();
        write_idx_labels(&labels2, &classes).unwrap();

        assert_eq!(fs::read(&images).unwrap(), fs::read(&images2).unwrap());
        assert_eq!(fs::read(&labels).unwrap(), fs::read(&labels2).unwrap());
    }

    #[test]
    fn wrong_magic_truncation_and_count_mismatch_are_named_errors() {
        let d = dir();
        let images = d.path().join("img.idx");
        let labels = d.path().join("lab.idx");

        // Magic 9999.
        let mut bogus = 9999u32.to_be_bytes().to_vec();
        bogus.extend_from_slice(&1u32.to_be_bytes());
        fs::write(&images, &bogus).unwrap();
        write_idx_labels(&labels, &[0]).unwrap();
        let err = load_idx(&images, &labels).unwrap_err();
        assert!(err.to_string().contains("magic 9999"), "{err}");

        // Truncated payload: header promises 1 image of 2x2, provides 3 bytes.
        let mut short = IMAGES_MAGIC.to_be_bytes().to_vec();
        for dim in [1u32, 2, 2] {
            short.extend_from_slice(&dim.to_be_bytes());
        }
        short.extend_from_slice(&[1, 2, 3]);
        fs::write(&images, &short).unwrap();
        let err = load_idx(&images, &labels).unwrap_err();
        assert!(
            err.to_string().contains("truncated images payload"),
            "{err}"
        );

        // Count mismatch: 3 images vs 2 labels.
        let pixels = vec![0u8; 3 * 4];
        write_idx_images(&images, &pixels, 3, 2, 2).unwrap();
        write_idx_labels(&labels, &[0, 1]).unwrap();
        let err = load_idx(&images, &labels).unwrap_err();
        assert!(err.to_string().contains("3 images vs 2 labels"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }
}
