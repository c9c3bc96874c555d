//! Seeded synthetic benchmark generators.
//!
//! `synthetic_digits` renders seven-segment digit glyphs with random affine
//! jitter and pixel noise — a small, self-contained stand-in for scanned
//! handwriting that keeps the properties screening experiments probe: ten
//! classes, some easily confused under jitter (e.g. 8 vs 9), images that a
//! small network learns quickly. `synthetic_regression` produces the 1-D
//! heteroscedastic benchmark: a smooth curve with a band of high-noise
//! inputs that no model can fit, so acquisition either finds and measures
//! that band or pays for it in inference error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use screenloop_core::Dataset;

use crate::error::{AppError, AppResult};

/// Segment endpoints on the unit square; x in {0.3, 0.7}, y in
/// {0.15, 0.5, 0.85}, top-left origin. Order: A top, B top-right,
/// C bottom-right, D bottom, E bottom-left, F top-left, G middle.
const SEGMENTS: [((f64, f64), (f64, f64)); 7] = [
    ((0.3, 0.15), (0.7, 0.15)), // A
    ((0.7, 0.15), (0.7, 0.5)),  // B
    ((0.7, 0.5), (0.7, 0.85)),  // C
    ((0.3, 0.85), (0.7, 0.85)), // D
    ((0.3, 0.5), (0.3, 0.85)),  // E
    ((0.3, 0.15), (0.3, 0.5)),  // F
    ((0.3, 0.5), (0.7, 0.5)),   // G
];

/// Lit-segment mask per digit, bit i = SEGMENTS[i].
const DIGIT_SEGMENTS: [u8; 10] = [
    0b011_1111, // 0: ABCDEF
    0b000_0110, // 1: BC
    0b101_1011, // 2: ABDEG
    0b100_1111, // 3: ABCDG
    0b110_0110, // 4: BCFG
    0b110_1101, // 5: ACDFG
    0b111_1101, // 6: ACDEFG
    0b000_0111, // 7: ABC
    0b111_1111, // 8: all
    0b110_1111, // 9: ABCDFG
];

/// Stroke core radius and soft edge width, in unit-square coordinates.
const STROKE_RADIUS: f64 = 0.03;
const STROKE_SOFT: f64 = 0.04;
/// Uniform pixel noise amplitude.
const PIXEL_NOISE: f64 = 0.04;

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

/// Renders `n` jittered seven-segment digits as `side x side` images with
/// pixel values in `[0, 1]`, labels 0..=9. Deterministic for a fixed seed.
pub fn synthetic_digits(n: usize, side: usize, seed: u64) -> AppResult<Dataset> {
    if n == 0 {
        return Err(AppError::usage("synthetic_digits: n must be >= 1"));
    }
    if side < 4 {
        return Err(AppError::usage(
            "synthetic_digits: side must be >= 4 pixels",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n * side * side);
    let mut labels = Vec::with_capacity(n);

    for _ in 0..n {
        let digit = rng.gen_range(0..10usize);
        labels.push(digit);
        let theta: f64 = rng.gen_range(-0.12..0.12);
        let scale: f64 = rng.gen_range(0.8..1.05);
        let shear: f64 = rng.gen_range(-0.08..0.08);
        let tx: f64 = rng.gen_range(-0.06..0.06);
        let ty: f64 = rng.gen_range(-0.06..0.06);

        // Forward glyph->image map about the image center:
        //   p = c + M (q - c) + t,  M = scale * R(theta) * Shear(shear).
        // Rasterization runs the inverse: q = M^-1 (p - c - t) + c.
        let (sin, cos) = theta.sin_cos();
        let m00 = scale * cos;
        let m01 = scale * (shear * cos - sin);
        let m10 = scale * sin;
        let m11 = scale * (shear * sin + cos);
        let det = m00 * m11 - m01 * m10; // = scale^2 > 0
        let (i00, i01, i10, i11) = (m11 / det, -m01 / det, -m10 / det, m00 / det);

        let mask = DIGIT_SEGMENTS[digit];
        for row in 0..side {
            for col in 0..side {
                let px = (col as f64 + 0.5) / side as f64 - 0.5 - tx;
                let py = (row as f64 + 0.5) / side as f64 - 0.5 - ty;
                let q = (i00 * px + i01 * py + 0.5, i10 * px + i11 * py + 0.5);
                let mut dist = f64::INFINITY;
                for (i, (a, b)) in SEGMENTS.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        dist = dist.min(point_segment_distance(q, *a, *b));
                    }
                }
                let ink = ((STROKE_RADIUS + STROKE_SOFT - dist) / STROKE_SOFT).clamp(0.0, 1.0);
                let noise: f64 = rng.gen_range(-PIXEL_NOISE..PIXEL_NOISE);
                features.push((ink + noise).clamp(0.0, 1.0));
            }
        }
    }
    Ok(Dataset::from_classification(
        features,
        side * side,
        labels,
        10,
    )?)
}

/// The band of inputs whose targets carry irreducible noise.
pub const HARD_REGION: (f64, f64) = (0.65, 0.85);
/// Noise scale inside / outside the hard band.
pub const HARD_SIGMA: f64 = 1.0;
pub const EASY_SIGMA: f64 = 0.03;

/// `n` samples of `y = sin(2 pi x) + sigma(x) * z`, `x ~ U(0,1)`,
/// `z ~ N(0,1)`, with `sigma` large only inside [`HARD_REGION`].
pub fn synthetic_regression(n: usize, seed: u64) -> AppResult<Dataset> {
    if n == 0 {
        return Err(AppError::usage("synthetic_regression: n must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = rng.gen_range(0.0..1.0);
        let z: f64 = rng.sample(StandardNormal);
        let sigma = if (HARD_REGION.0..=HARD_REGION.1).contains(&x) {
            HARD_SIGMA
        } else {
            EASY_SIGMA
        };
        features.push(x);
        targets.push((2.0 * std::f64::consts::PI * x).sin() + sigma * z);
    }
    Ok(Dataset::from_regression(features, 1, targets)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use screenloop_core::Label;

    #[test]
    fn digit_images_are_deterministic_and_in_range() {
        let a = synthetic_digits(50, 16, 7).unwrap();
        let b = synthetic_digits(50, 16, 7).unwrap();
        assert_eq!(a, b);
        let c = synthetic_digits(50, 16, 8).unwrap();
        assert_ne!(a, c);
        assert!(a.features().iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert_eq!(a.n_features(), 256);
        assert_eq!(a.n_classes(), Some(10));
    }

    #[test]
    fn all_ten_digits_appear_and_render_distinctly() {
        let ds = synthetic_digits(2000, 16, 3).unwrap();
        let mut counts = [0usize; 10];
        let mut mean = vec![vec![0.0f64; 256]; 10];
        for id in 0..ds.n_samples() {
            let Label::Class(d) = ds.label(id) else {
                unreachable!()
            };
            counts[d] += 1;
            for (m, &v) in mean[d].iter_mut().zip(ds.feature_row(id)) {
                *m += v;
            }
        }
        assert!(counts.iter().all(|&c| c > 100), "{counts:?}");
        for (d, m) in mean.iter_mut().enumerate() {
            for v in m.iter_mut() {
                *v /= counts[d] as f64;
            }
        }
        // Mean images of different digits differ visibly (L1 distance).
        let l1 =
            |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum() };
        assert!(l1(&mean[1], &mean[8]) > 10.0);
        assert!(l1(&mean[0], &mean[1]) > 10.0);
        // ... while 8 and 9 share most segments (the confusable pair).
        assert!(l1(&mean[8], &mean[9]) < l1(&mean[1], &mean[8]));
    }

    #[test]
    fn images_have_ink_but_are_mostly_background() {
        let ds = synthetic_digits(100, 16, 11).unwrap();
        let mean: f64 = ds.features().iter().sum::<f64>() / ds.features().len() as f64;
        assert!(mean > 0.05, "mean intensity {mean}");
        assert!(mean < 0.5, "mean intensity {mean}");
    }

    #[test]
    fn regression_noise_is_confined_to_the_hard_band() {
        let ds = synthetic_regression(20_000, 5).unwrap();
        let mut easy_dev = Vec::new();
        let mut hard_dev = Vec::new();
        for id in 0..ds.n_samples() {
            let x = ds.feature_row(id)[0];
            let Label::Value(y) = ds.label(id) else {
                unreachable!()
            };
            let residual = y - (2.0 * std::f64::consts::PI * x).sin();
            if (HARD_REGION.0..=HARD_REGION.1).contains(&x) {
                hard_dev.push(residual);
            } else {
                easy_dev.push(residual);
            }
        }
        let rms = |v: &[f64]| (v.iter().map(|r| r * r).sum::<f64>() / v.len() as f64).sqrt();
        assert!(rms(&easy_dev) < 0.05, "easy rms {}", rms(&easy_dev));
        assert!(
            (rms(&hard_dev) - 1.0).abs() < 0.1,
            "hard rms {}",
            rms(&hard_dev)
        );
        assert_eq!(ds, synthetic_regression(20_000, 5).unwrap());
    }
}
