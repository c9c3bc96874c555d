//! Minimal dense row-major f64 kernels for the predictor.
//!
//! Three matrix-product shapes cover forward and backward passes. Loop nests
//! are arranged so the innermost loop walks contiguous memory (AXPY or dot
//! form), which the compiler autovectorizes; accumulation order is fixed, so
//! results are bit-reproducible run to run.

/// `out = a @ b` where `a` is `m x k`, `b` is `k x n`, `out` is `m x n`.
pub(crate) fn gemm_nn(a: &[f64], b: &[f64], m: usize, k: usize, n: usize, out: &mut [f64]) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), m * n);
    out.fill(0.0);
    for i in 0..m {
        let row_out = &mut out[i * n..(i + 1) * n];
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == 0.0 {
                continue;
            }
            let row_b = &b[p * n..(p + 1) * n];
            for (o, &bv) in row_out.iter_mut().zip(row_b) {
                *o += aip * bv;
            }
        }
    }
}

/// `out += a^T @ b` where `a` is `m x k`, `b` is `m x n`, `out` is `k x n`.
pub(crate) fn gemm_tn_acc(a: &[f64], b: &[f64], m: usize, k: usize, n: usize, out: &mut [f64]) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), m * n);
    debug_assert_eq!(out.len(), k * n);
    for i in 0..m {
        let row_b = &b[i * n..(i + 1) * n];
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == 0.0 {
                continue;
            }
            let row_out = &mut out[p * n..(p + 1) * n];
            for (o, &bv) in row_out.iter_mut().zip(row_b) {
                *o += aip * bv;
            }
        }
    }
}

/// `out = a @ b^T` where `a` is `m x n`, `b` is `k x n`, `out` is `m x k`.
pub(crate) fn gemm_nt(a: &[f64], b: &[f64], m: usize, n: usize, k: usize, out: &mut [f64]) {
    debug_assert_eq!(a.len(), m * n);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), m * k);
    for i in 0..m {
        let row_a = &a[i * n..(i + 1) * n];
        for p in 0..k {
            let row_b = &b[p * n..(p + 1) * n];
            let mut acc = 0.0;
            for (&x, &y) in row_a.iter().zip(row_b) {
                acc += x * y;
            }
            out[i * k + p] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference triple loop, deliberately naive.
    fn reference_nn(a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                let mut acc = 0.0;
                for p in 0..k {
                    acc += a[i * k + p] * b[p * n + j];
                }
                out[i * n + j] = acc;
            }
        }
        out
    }

    fn arbitrary(len: usize, scale: f64) -> Vec<f64> {
        // A fixed quasi-random pattern is enough to exercise the kernels.
        (0..len)
            .map(|i| ((i * 2654435761 % 1000) as f64 / 500.0 - 1.0) * scale)
            .collect()
    }

    #[test]
    fn kernels_match_the_reference_product() {
        let (m, k, n) = (7, 5, 9);
        let a = arbitrary(m * k, 1.3);
        let b = arbitrary(k * n, 0.7);
        let mut out = vec![0.0; m * n];
        gemm_nn(&a, &b, m, k, n, &mut out);
        let expect = reference_nn(&a, &b, m, k, n);
        for (x, y) in out.iter().zip(&expect) {
            assert!((x - y).abs() < 1e-12);
        }

        // a^T @ b via the accumulating kernel equals reference on transposed a.
        let at: Vec<f64> = {
            let mut t = vec![0.0; k * m];
            for i in 0..m {
                for p in 0..k {
                    t[p * m + i] = a[i * k + p];
                }
            }
            t
        };
        let b2 = arbitrary(m * n, 0.9);
        let mut out_tn = vec![0.0; k * n];
        gemm_tn_acc(&a, &b2, m, k, n, &mut out_tn);
        let expect_tn = reference_nn(&at, &b2, k, m, n);
        for (x, y) in out_tn.iter().zip(&expect_tn) {
            assert!((x - y).abs() < 1e-12);
        }

        // a @ b^T via the dot kernel.
        let c = arbitrary(k * n, 1.1);
        let ct: Vec<f64> = {
            let mut t = vec![0.0; n * k];
            for p in 0..k {
                for j in 0..n {
                    t[j * k + p] = c[p * n + j];
                }
            }
            t
        };
        let a3 = arbitrary(m * n, 0.8);
        let mut out_nt = vec![0.0; m * k];
        gemm_nt(&a3, &c, m, n, k, &mut out_nt);
        let expect_nt = reference_nn(&a3, &ct, m, n, k);
        for (x, y) in out_nt.iter().zip(&expect_nt) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn gemm_tn_accumulates_into_out() {
        let a = vec![1.0, 2.0];
        let b = vec![3.0, 4.0];
        let mut out = vec![10.0, 10.0, 10.0, 10.0];
        // m=1, k=2, n=2: out += [[1],[2]] @ [[3,4]]
        gemm_tn_acc(&a, &b, 1, 2, 2, &mut out);
        assert_eq!(out, vec![13.0, 14.0, 16.0, 18.0]);
    }
}
