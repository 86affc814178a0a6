//! Minimal dense linear algebra for the small systems this crate solves.

use crate::error::{Error, Result};

/// Solves `A x = b` for symmetric positive-definite `A` (row-major, p x p)
/// via an in-place Cholesky factorization.
pub fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let p = b.len();
    debug_assert!(a.len() == p && a.iter().all(|row| row.len() == p));

    // lower-triangular factor L with A = L L^T
    let mut l = vec![vec![0.0; p]; p];
    for j in 0..p {
        let mut diag = a[j][j];
        for k in 0..j {
            diag -= l[j][k] * l[j][k];
        }
        if diag <= 0.0 {
            return Err(Error::SingularSystem(format!(
                "non-positive pivot {diag:e} at column {j}"
            )));
        }
        l[j][j] = diag.sqrt();
        for i in (j + 1)..p {
            let mut v = a[i][j];
            for k in 0..j {
                v -= l[i][k] * l[j][k];
            }
            l[i][j] = v / l[j][j];
        }
    }

    // forward solve L z = b
    let mut z = vec![0.0; p];
    for i in 0..p {
        let mut v = b[i];
        for k in 0..i {
            v -= l[i][k] * z[k];
        }
        z[i] = v / l[i][i];
    }
    // back solve L^T x = z
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let mut v = z[i];
        for k in (i + 1)..p {
            v -= l[k][i] * x[k];
        }
        x[i] = v / l[i][i];
    }
    Ok(x)
}
