//! Small dense linear algebra on row-major `Vec<f64>` matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(a: &[f64], k: usize) -> f64 {
    debug_assert_eq!(a.len(), k * k);
    match k {
        0 => return 1.0,
        1 => return a[0],
        2 => return a[0] * a[3] - a[1] * a[2],
        3 => {
            return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => {}
    }
    let mut m = a.to_vec();
    let mut d = 1.0;
    for c in 0..k {
        let piv = (c..k)
            .max_by(|&i, &j| m[i * k + c].abs().total_cmp(&m[j * k + c].abs()))
            .unwrap_or(c);
        if m[piv * k + c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            for j in 0..k {
                m.swap(c * k + j, piv * k + j);
            }
            d = -d;
        }
        let p = m[c * k + c];
        d *= p;
        for i in c + 1..k {
            let f = m[i * k + c] / p;
            if f != 0.0 {
                for j in c..k {
                    m[i * k + j] -= f * m[c * k + j];
                }
            }
        }
    }
    d
}

/// Cofactor matrix `C` with `det = Σ_i a_{ij} C_{ij}` for every column `j`.
pub fn cofactors(a: &[f64], k: usize) -> Vec<f64> {
    let mut c = vec![0.0; k * k];
    let mut minor = vec![0.0; (k - 1) * (k - 1)];
    for i in 0..k {
        for j in 0..k {
            let mut t = 0;
            for r in (0..k).filter(|&r| r != i) {
                for s in (0..k).filter(|&s| s != j) {
                    minor[t] = a[r * k + s];
                    t += 1;
                }
            }
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            c[i * k + j] = sign * det(&minor, k - 1);
        }
    }
    c
}

/// `A^T A` for an `rows x cols` matrix.
pub fn gram(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut g = vec![0.0; cols * cols];
    for i in 0..cols {
        for j in i..cols {
            let s: f64 = (0..rows).map(|r| a[r * cols + i] * a[r * cols + j]).sum();
            g[i * cols + j] = s;
            g[j * cols + i] = s;
        }
    }
    g
}

pub fn matmul(a: &[f64], b: &[f64], n: usize, k: usize, m: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * m];
    for i in 0..n {
        for l in 0..k {
            let x = a[i * k + l];
            if x != 0.0 {
                for j in 0..m {
                    c[i * m + j] += x * b[l * m + j];
                }
            }
        }
    }
    c
}

pub fn transpose(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut t = vec![0.0; a.len()];
    for i in 0..rows {
        for j in 0..cols {
            t[j * rows + i] = a[i * cols + j];
        }
    }
    t
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns.
pub fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        let scale: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + math::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[i * n + i]).collect(), v)
}

/// `f(A)` for symmetric `A`, applied through the eigenvalues.
pub fn symmetric_apply(a: &[f64], n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let (vals, vecs) = symmetric_eigen(a, n);
    let fv: Vec<f64> = vals.into_iter().map(f).collect();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n)
                .map(|k| vecs[i * n + k] * fv[k] * vecs[j * n + k])
                .sum();
        }
    }
    out
}

/// Largest singular value of a `rows x cols` matrix.
pub fn spectral_norm(a: &[f64], rows: usize, cols: usize) -> f64 {
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let (vals, _) = if cols <= rows {
        symmetric_eigen(&gram(a, rows, cols), cols)
    } else {
        let t = transpose(a, rows, cols);
        symmetric_eigen(&gram(&t, cols, rows), rows)
    };
    math::sqrt(vals.into_iter().fold(0.0, f64::max))
}

/// Modified Gram-Schmidt on the columns of a square matrix, in place.
/// Returns `false` if the columns are numerically dependent.
pub fn orthonormalize_columns(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        for i in 0..j {
            let d: f64 = (0..n).map(|r| a[r * n + i] * a[r * n + j]).sum();
            for r in 0..n {
                a[r * n + j] -= d * a[r * n + i];
            }
        }
        let norm = math::sqrt((0..n).map(|r| a[r * n + j] * a[r * n + j]).sum());
        if norm < 1e-12 {
            return false;
        }
        for r in 0..n {
            a[r * n + j] /= norm;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small_and_general_agree() {
        let a = [2.0, -1.0, 0.5, 3.0, 1.0, -2.0, 0.0, 4.0, 1.5];
        let expected = 2.0 * (1.5 + 8.0) + 1.0 * (4.5 - 0.0) + 0.5 * 12.0;
        assert!((det(&a, 3) - expected).abs() < 1e-12);
        // 4x4 via elimination vs cofactor expansion along the first row.
        let b = [
            1.0, 2.0, 0.0, -1.0, 3.0, -1.0, 2.0, 0.5, 0.0, 1.0, 1.0, 2.0, -2.0, 0.0, 3.0, 1.0,
        ];
        let c = cofactors(&b, 4);
        let expansion: f64 = (0..4).map(|j| b[j] * c[j]).sum();
        assert!((det(&b, 4) - expansion).abs() < 1e-10);
    }

    #[test]
    fn jacobi_reconstructs() {
        let a = [4.0, 1.0, -2.0, 1.0, 3.0, 0.5, -2.0, 0.5, 1.0];
        let (vals, vecs) = symmetric_eigen(&a, 3);
        for i in 0..3 {
            for j in 0..3 {
                let r: f64 = (0..3)
                    .map(|k| vecs[i * 3 + k] * vals[k] * vecs[j * 3 + k])
                    .sum();
                assert!((r - a[i * 3 + j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = [3.0, 0.0, 0.0, -5.0, 0.0, 0.0];
        assert!((spectral_norm(&a, 3, 2) - 5.0).abs() < 1e-12);
    }
}
