//! Dense kernels for the small real symmetric matrices used by the
//! differential criteria: cyclic Jacobi eigenvalues and leading principal
//! minors by fraction-free (Bareiss) elimination.

/// Eigenvalues of a symmetric matrix (row-major, n x n), ascending.
///
/// Cyclic Jacobi; plenty at the n <= 12 scale this crate works at.
pub fn sym_eigenvalues(matrix: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(matrix.len(), n * n, "matrix shape");
    if n == 0 {
        return Vec::new();
    }
    let mut a = matrix.to_vec();
    let tol = 1e-14
        * matrix
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-300);
    for _sweep in 0..50 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].abs();
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = a[j * n + p];
                    let ajq = a[j * n + q];
                    a[j * n + p] = ajp - s * (ajq + tau * ajp);
                    a[j * n + q] = ajq + s * (ajp - tau * ajq);
                    a[p * n + j] = a[j * n + p];
                    a[q * n + j] = a[j * n + q];
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Leading principal minors D_1..D_n by fraction-free Gaussian elimination.
///
/// Each leading block is eliminated independently (Bareiss one-step rule,
/// partial pivoting with sign tracking), so an exactly singular block returns
/// D_m = 0 without poisoning the larger blocks. Integer-valued inputs stay
/// exact throughout.
pub fn leading_minors(matrix: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(matrix.len(), n * n, "matrix shape");
    (1..=n).map(|m| block_det(matrix, n, m)).collect()
}

fn block_det(matrix: &[f64], n: usize, m: usize) -> f64 {
    let mut a: Vec<f64> = (0..m)
        .flat_map(|i| (0..m).map(move |j| matrix[i * n + j]))
        .collect();
    let mut sign = 1.0f64;
    let mut prev_pivot = 1.0f64;
    for k in 0..m {
        // Pivot on the largest magnitude entry in column k.
        let mut best = k;
        for r in (k + 1)..m {
            if a[r * m + k].abs() > a[best * m + k].abs() {
                best = r;
            }
        }
        if a[best * m + k] == 0.0 {
            return 0.0;
        }
        if best != k {
            for c in 0..m {
                a.swap(k * m + c, best * m + c);
            }
            sign = -sign;
        }
        let pivot = a[k * m + k];
        for i in (k + 1)..m {
            for j in (k + 1)..m {
                a[i * m + j] = (pivot * a[i * m + j] - a[i * m + k] * a[k * m + j]) / prev_pivot;
            }
            a[i * m + k] = 0.0;
        }
        prev_pivot = pivot;
    }
    // After full Bareiss elimination the last pivot is the determinant.
    sign * a[(m - 1) * m + (m - 1)]
}

/// Infinity norm (max absolute entry) of a dense matrix.
pub fn inf_norm(matrix: &[f64]) -> f64 {
    matrix.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}
