//! Eigen-decomposition of real symmetric tridiagonal matrices.
//!
//! Oscillator quadratures (and the Gauss–Hermite / Golub–Welsch construction)
//! reduce to a tridiagonal Jacobi matrix whose eigenvectors are only ever
//! needed on their first few components. The implicit QL iteration below
//! accumulates rotations on those leading rows only, which keeps large
//! truncations cheap.

use crate::error::{Error, Result};

/// Eigenpairs of a symmetric tridiagonal matrix, sorted by ascending eigenvalue.
#[derive(Clone, Debug)]
pub struct TridiagonalEigen {
    pub eigenvalues: Vec<f64>,
    /// `rows × n`, row-major: `vectors[r * n + k]` is component `r` of eigenvector `k`.
    pub vectors: Vec<f64>,
    pub rows: usize,
}

impl TridiagonalEigen {
    pub fn component(&self, row: usize, k: usize) -> f64 {
        self.vectors[row * self.eigenvalues.len() + k]
    }
}

/// `diag` has length `n`, `off` has length `n − 1` (`off[i]` couples `i` and `i+1`).
/// Only the first `rows` components of each eigenvector are computed.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64], rows: usize) -> Result<TridiagonalEigen> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n || rows > n {
        return Err(Error::InvalidParameter(format!(
            "tridiagonal eigenproblem needs n ≥ 1, n − 1 couplings and rows ≤ n (n = {n}, couplings = {}, rows = {rows})",
            off.len()
        )));
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let mut z = vec![0.0; rows * n];
    for r in 0..rows {
        z[r * n + r] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NotConverged {
                    estimate: e[l].abs(),
                    tolerance: f64::EPSILON,
                    detail: format!("QL iteration stalled on eigenvalue {l}"),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in 0..rows {
                    let base = row * n;
                    let f = z[base + i + 1];
                    z[base + i + 1] = s * z[base + i] + c * f;
                    z[base + i] = c * z[base + i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues = order.iter().map(|&k| d[k]).collect();
    let mut vectors = vec![0.0; rows * n];
    for row in 0..rows {
        for (new_k, &old_k) in order.iter().enumerate() {
            vectors[row * n + new_k] = z[row * n + old_k];
        }
    }
    Ok(TridiagonalEigen { eigenvalues, vectors, rows })
}
