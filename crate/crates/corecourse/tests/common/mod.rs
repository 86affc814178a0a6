//! Independent oracles for the integration suites.
//!
//! Nothing here may call into the solver paths under test: the lasso oracle
//! is proximal gradient (ISTA), the ridge oracles are plain gradient descent
//! and Gauss-Jordan elimination, and the correlation oracles recompute both
//! coefficients from their definitions with O(n^2) counting ranks.

#![allow(dead_code)]

/// Objective `||y - b0 - X b||^2 + alpha * ||b||_1` at a point.
pub fn lasso_objective(
    columns: &[Vec<f64>],
    y: &[f64],
    intercept: f64,
    beta: &[f64],
    alpha: f64,
) -> f64 {
    let resid = residuals(columns, y, intercept, beta);
    let rss: f64 = resid.iter().map(|r| r * r).sum();
    rss + alpha * beta.iter().map(|b| b.abs()).sum::<f64>()
}

fn residuals(columns: &[Vec<f64>], y: &[f64], intercept: f64, beta: &[f64]) -> Vec<f64> {
    let mut r: Vec<f64> = y.iter().map(|v| v - intercept).collect();
    for (b, col) in beta.iter().zip(columns) {
        if *b != 0.0 {
            for (ri, x) in r.iter_mut().zip(col) {
                *ri -= b * x;
            }
        }
    }
    r
}

// Largest eigenvalue of A^T A for the augmented matrix [1 | X], by power
// iteration on the (m+1)-dim Gram matrix.
fn max_eigenvalue(columns: &[Vec<f64>], n: usize) -> f64 {
    let m = columns.len();
    let dim = m + 1;
    let mut gram = vec![vec![0.0; dim]; dim];
    gram[0][0] = n as f64;
    for (a, col_a) in columns.iter().enumerate() {
        let s: f64 = col_a.iter().sum();
        gram[0][a + 1] = s;
        gram[a + 1][0] = s;
        for (b, col_b) in columns.iter().enumerate() {
            gram[a + 1][b + 1] = col_a.iter().zip(col_b).map(|(x, y)| x * y).sum();
        }
    }
    let mut v = vec![1.0; dim];
    let mut lambda = 1.0;
    for _ in 0..200 {
        let mut next = vec![0.0; dim];
        for i in 0..dim {
            for j in 0..dim {
                next[i] += gram[i][j] * v[j];
            }
        }
        lambda = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if lambda == 0.0 {
            return 1.0;
        }
        for x in next.iter_mut() {
            *x /= lambda;
        }
        v = next;
    }
    lambda
}

/// ISTA (proximal gradient) minimizer of the lasso objective with an
/// unpenalized intercept. Returns `(intercept, beta, objective)`.
///
/// Internally iterates on column-centered data: substituting
/// `b0' = b0 + mean(g_k) . beta` leaves beta, the penalty, and the
/// objective value untouched while removing the shared-mean direction that
/// would otherwise cripple the gradient method's conditioning. The reported
/// objective is recomputed on the original data.
pub fn ista_lasso(
    raw_columns: &[Vec<f64>],
    y: &[f64],
    alpha: f64,
    max_iter: usize,
) -> (f64, Vec<f64>, f64) {
    let n = y.len();
    let m = raw_columns.len();
    let means: Vec<f64> = raw_columns
        .iter()
        .map(|col| col.iter().sum::<f64>() / n as f64)
        .collect();
    let columns: Vec<Vec<f64>> = raw_columns
        .iter()
        .zip(&means)
        .map(|(col, mean)| col.iter().map(|v| v - mean).collect())
        .collect();
    let columns = &columns;
    let lipschitz = 2.0 * max_eigenvalue(columns, n);
    let step = 1.0 / lipschitz;

    let mut intercept = y.iter().sum::<f64>() / n as f64;
    let mut beta = vec![0.0; m];
    let mut objective = lasso_objective(columns, y, intercept, &beta, alpha);

    // Near the optimum the per-iteration decrease drowns in evaluation
    // noise, so stall detection compares across a window of iterations.
    const WINDOW: usize = 200;
    let mut window_objective = objective;

    for iter in 1..=max_iter {
        let resid = residuals(columns, y, intercept, &beta);
        // gradient of the smooth part
        let grad0 = -2.0 * resid.iter().sum::<f64>();
        intercept -= step * grad0;
        for (b, col) in beta.iter_mut().zip(columns) {
            let grad = -2.0 * col.iter().zip(&resid).map(|(x, r)| x * r).sum::<f64>();
            let moved = *b - step * grad;
            // prox of step * alpha * |.|
            let threshold = step * alpha;
            *b = if moved > threshold {
                moved - threshold
            } else if moved < -threshold {
                moved + threshold
            } else {
                0.0
            };
        }
        objective = lasso_objective(columns, y, intercept, &beta, alpha);
        if iter % WINDOW == 0 {
            if (window_objective - objective).abs() <= 1e-12 * (1.0 + objective.abs()) {
                break;
            }
            window_objective = objective;
        }
    }

    // map the centered intercept back: b0 = b0' - mean . beta
    let original_intercept =
        intercept - means.iter().zip(&beta).map(|(m, b)| m * b).sum::<f64>();
    let original_objective = lasso_objective(raw_columns, y, original_intercept, &beta, alpha);
    (original_intercept, beta, original_objective)
}

/// Gradient-descent minimizer of the ridge objective
/// `||y - b0 - X b||^2 + alpha ||b||^2` (intercept unpenalized). `rows` is
/// row-major without the intercept column. Returns `[b0, b...]`.
pub fn gradient_descent_ridge(
    rows: &[Vec<f64>],
    y: &[f64],
    alpha: f64,
    max_iter: usize,
) -> Vec<f64> {
    let n = y.len();
    let p = rows[0].len();
    let columns: Vec<Vec<f64>> = (0..p)
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect();
    let lipschitz = 2.0 * (max_eigenvalue(&columns, n) + alpha);
    let step = 1.0 / lipschitz;

    let mut theta = vec![0.0; p + 1];
    theta[0] = y.iter().sum::<f64>() / n as f64;
    for _ in 0..max_iter {
        let resid: Vec<f64> = rows
            .iter()
            .zip(y)
            .map(|(row, target)| {
                target
                    - theta[0]
                    - row.iter().zip(&theta[1..]).map(|(x, b)| x * b).sum::<f64>()
            })
            .collect();
        let mut grad = vec![0.0; p + 1];
        grad[0] = -2.0 * resid.iter().sum::<f64>();
        for j in 0..p {
            grad[j + 1] = -2.0 * rows.iter().zip(&resid).map(|(r, e)| r[j] * e).sum::<f64>()
                + 2.0 * alpha * theta[j + 1];
        }
        let grad_norm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= step * g;
        }
        if grad_norm < 1e-12 * (1.0 + theta.iter().map(|t| t.abs()).sum::<f64>()) {
            break;
        }
    }
    theta
}

/// Ordinary least squares `[b0, b...]` through Gauss-Jordan elimination with
/// partial pivoting on the normal equations of `[1 | X]`.
pub fn ols_gauss_jordan(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let p = rows[0].len();
    let dim = p + 1;
    let mut a = vec![vec![0.0; dim + 1]; dim];
    a[0][0] = n as f64;
    a[0][dim] = y.iter().sum();
    for (row, &target) in rows.iter().zip(y) {
        for i in 0..p {
            a[i + 1][0] += row[i];
            a[0][i + 1] += row[i];
            a[i + 1][dim] += row[i] * target;
            for j in 0..p {
                a[i + 1][j + 1] += row[i] * row[j];
            }
        }
    }

    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        let scale = a[col][col];
        assert!(scale.abs() > 1e-12, "singular OLS system");
        for v in a[col].iter_mut() {
            *v /= scale;
        }
        for row in 0..dim {
            if row != col && a[row][col] != 0.0 {
                let factor = a[row][col];
                for j in 0..=dim {
                    a[row][j] -= factor * a[col][j];
                }
            }
        }
    }
    (0..dim).map(|i| a[i][dim]).collect()
}

/// Average ranks by direct counting: `1 + #smaller + #equal-others / 2`.
pub fn counting_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let smaller = values.iter().filter(|&&w| w < v).count();
            let equal = values.iter().filter(|&&w| w == v).count();
            smaller as f64 + 1.0 + (equal as f64 - 1.0) / 2.0
        })
        .collect()
}

/// Spearman's rho straight from the definition on counting ranks.
pub fn spearman_direct(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let rx = counting_ranks(x);
    let ry = counting_ranks(y);
    let sum_sq: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
    1.0 - sum_sq / (n * (n * n - 1.0) / 6.0)
}

/// Pearson correlation via raw moments, an algebraic route different from
/// the centered implementation under test.
pub fn pearson_direct(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let ex = x.iter().sum::<f64>() / n;
    let ey = y.iter().sum::<f64>() / n;
    let exy = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / n;
    let exx = x.iter().map(|a| a * a).sum::<f64>() / n;
    let eyy = y.iter().map(|b| b * b).sum::<f64>() / n;
    (exy - ex * ey) / ((exx - ex * ex).sqrt() * (eyy - ey * ey).sqrt())
}
