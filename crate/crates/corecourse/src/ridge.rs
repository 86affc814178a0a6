//! Grade prediction with l2-penalized regression.
//!
//! A small set of input courses (two fixed "core" courses plus a rotating
//! third) predicts overall GPA. The fit minimizes
//!
//! ```text
//! || y - b0 - X b ||_2^2  +  alpha * || b ||_2^2
//! ```
//!
//! with the intercept unpenalized. The penalty trades a small downward bias
//! in the coefficients for stability under the strong collinearity between
//! course grades. Solved exactly through the regularized normal equations
//! with a Cholesky factorization.
//!
//! The evaluation protocol draws `splits` random train/test partitions
//! (default 100 at 90/10), fits on each training set, scores squared
//! correlation between predictions and held-out GPAs, and averages both the
//! coefficient vectors and the scores. Each split seeds its own ChaCha8
//! stream (`seed` as the key, split index as the stream), so results are
//! reproducible and independent of evaluation order.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::CourseKey;
use crate::cohort::Cohort;
use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;
use crate::records::{GRADE_MAX, GRADE_MIN};

/// Default l2 penalty.
pub const DEFAULT_ALPHA: f64 = 2.5;

/// Default number of random splits.
pub const DEFAULT_SPLITS: usize = 100;

/// Default training fraction.
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.9;

/// Default minimum sub-cohort size.
pub const DEFAULT_MIN_STUDENTS: usize = 10;

/// Parameters of one prediction experiment.
#[derive(Debug, Clone, Serialize)]
pub struct RidgeSpec {
    /// Courses always present as predictors, in display order.
    pub fixed_courses: Vec<CourseKey>,
    /// The rotating third predictor.
    pub third_course: CourseKey,
    pub alpha: f64,
    pub splits: usize,
    pub train_fraction: f64,
    pub seed: u64,
    /// Minimum number of students who must have taken all predictor courses.
    pub min_students: usize,
}

impl RidgeSpec {
    pub fn new(fixed_courses: Vec<CourseKey>, third_course: CourseKey, seed: u64) -> Self {
        RidgeSpec {
            fixed_courses,
            third_course,
            alpha: DEFAULT_ALPHA,
            splits: DEFAULT_SPLITS,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            seed,
            min_students: DEFAULT_MIN_STUDENTS,
        }
    }

    /// All predictor courses: fixed ones, then the third.
    pub fn courses(&self) -> Vec<CourseKey> {
        let mut all = self.fixed_courses.clone();
        all.push(self.third_course.clone());
        all
    }

    pub fn validate(&self) -> Result<()> {
        if self.fixed_courses.contains(&self.third_course) {
            return Err(Error::InvalidParameter(format!(
                "third course {} duplicates a fixed course",
                self.third_course
            )));
        }
        if !(0.0 < self.train_fraction && self.train_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ridge alpha must be positive, got {}",
                self.alpha
            )));
        }
        if self.splits == 0 {
            return Err(Error::InvalidParameter("splits must be nonzero".into()));
        }
        Ok(())
    }
}

/// Averaged outcome of the repeated-holdout protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RidgeResult {
    pub averaged_intercept: f64,
    pub averaged_coefficients: BTreeMap<CourseKey, f64>,
    pub mean_rsq: f64,
    pub per_split_rsq: Vec<f64>,
    pub n_students: usize,
}

/// A clamped GPA prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub value: f64,
    /// True when the raw linear prediction left `[0.0, 4.3]` and was clamped.
    pub clamped: bool,
}

/// Minimizes `||y - b0 - X b||^2 + alpha ||b||^2` exactly. `x` holds one row
/// per observation (without the intercept column); the returned vector is
/// `[b0, b_1, ..., b_p]`. `alpha = 0` is accepted for testing against plain
/// least squares and fails on rank-deficient systems.
pub fn solve_ridge(x: &[Vec<f64>], y: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let n = y.len();
    if n == 0 || x.len() != n {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: n,
        });
    }
    let p = x[0].len();
    if x.iter().any(|row| row.len() != p) {
        return Err(Error::InvalidParameter("ragged design matrix".into()));
    }
    if n < p + 1 {
        return Err(Error::InvalidParameter(format!(
            "need at least {} observations for {p} predictors, got {n}",
            p + 1
        )));
    }
    if alpha < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "ridge alpha must be nonnegative, got {alpha}"
        )));
    }

    // normal equations over the augmented system [1 | X], penalty skipping
    // the intercept slot
    let dim = p + 1;
    let mut gram = vec![vec![0.0; dim]; dim];
    let mut rhs = vec![0.0; dim];
    for (row, &target) in x.iter().zip(y) {
        gram[0][0] += 1.0;
        rhs[0] += target;
        for a in 0..p {
            gram[0][a + 1] += row[a];
            rhs[a + 1] += row[a] * target;
            for b in a..p {
                gram[a + 1][b + 1] += row[a] * row[b];
            }
        }
    }
    for a in 0..dim {
        for b in 0..a {
            gram[a][b] = gram[b][a];
        }
    }
    for a in 1..dim {
        gram[a][a] += alpha;
    }
    cholesky_solve(&gram, &rhs)
}

/// Squared Pearson correlation between predictions and actuals, in `[0, 1]`.
/// Constant actuals are an error; constant predictions score 0 by the
/// zero-covariance convention.
pub fn out_of_sample_rsq(predictions: &[f64], actuals: &[f64]) -> Result<f64> {
    if predictions.len() != actuals.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: actuals.len(),
        });
    }
    if actuals.is_empty() {
        return Err(Error::SampleTooSmall { n: 0, min: 2 });
    }
    if actuals.iter().all(|&a| a == actuals[0]) {
        return Err(Error::ZeroVariance);
    }
    let n = actuals.len() as f64;
    let mean_p = predictions.iter().sum::<f64>() / n;
    let mean_a = actuals.iter().sum::<f64>() / n;
    let mut cross = 0.0;
    let mut var_p = 0.0;
    let mut var_a = 0.0;
    for (&p, &a) in predictions.iter().zip(actuals) {
        cross += (p - mean_p) * (a - mean_a);
        var_p += (p - mean_p) * (p - mean_p);
        var_a += (a - mean_a) * (a - mean_a);
    }
    if var_p == 0.0 {
        return Ok(0.0);
    }
    let r = cross / (var_p.sqrt() * var_a.sqrt());
    Ok(r * r)
}

// First `take` elements of a seeded partial Fisher-Yates shuffle of 0..n.
fn split_indices(n: usize, take: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..take.min(n.saturating_sub(1)) {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx
}

/// Runs the repeated-holdout protocol for one spec on a cohort.
///
/// Restricts to students who took every predictor course, draws
/// `spec.splits` seeded train/test partitions, fits each training set via
/// [`solve_ridge`], scores each test set via [`out_of_sample_rsq`] on the
/// raw (unclamped) predictions, and averages coefficients and scores.
/// Identical cohort, spec, and seed give a bitwise-identical result.
pub fn repeated_holdout(cohort: &Cohort, spec: &RidgeSpec) -> Result<RidgeResult> {
    spec.validate()?;
    let courses = spec.courses();
    let students = cohort.students_with_all(&courses);
    let n = students.len();
    if n < spec.min_students {
        return Err(Error::SubCohortTooSmall {
            courses: courses
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            n,
            min: spec.min_students,
        });
    }

    let rows: Vec<Vec<f64>> = students
        .iter()
        .map(|s| courses.iter().map(|c| s.grades[c]).collect())
        .collect();
    let gpas: Vec<f64> = students.iter().map(|s| s.overall_gpa).collect();

    let p = courses.len();
    let train_size = (spec.train_fraction * n as f64).round() as usize;
    if train_size < p + 1 {
        return Err(Error::InvalidParameter(format!(
            "training split of {train_size} students cannot fit {p} predictors"
        )));
    }
    if n - train_size < 2 {
        return Err(Error::InvalidParameter(format!(
            "test split of {} students is too small to score",
            n - train_size
        )));
    }

    let mut coef_sum = vec![0.0; p + 1];
    let mut per_split_rsq = Vec::with_capacity(spec.splits);
    for split in 0..spec.splits {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(split as u64);
        let idx = split_indices(n, train_size, &mut rng);
        let (train_idx, test_idx) = idx.split_at(train_size);

        let train_x: Vec<Vec<f64>> = train_idx.iter().map(|&i| rows[i].clone()).collect();
        let train_y: Vec<f64> = train_idx.iter().map(|&i| gpas[i]).collect();
        let beta = solve_ridge(&train_x, &train_y, spec.alpha)?;

        let predictions: Vec<f64> = test_idx
            .iter()
            .map(|&i| {
                beta[0]
                    + rows[i]
                        .iter()
                        .zip(&beta[1..])
                        .map(|(g, b)| g * b)
                        .sum::<f64>()
            })
            .collect();
        let actuals: Vec<f64> = test_idx.iter().map(|&i| gpas[i]).collect();
        per_split_rsq.push(out_of_sample_rsq(&predictions, &actuals)?);

        for (sum, b) in coef_sum.iter_mut().zip(&beta) {
            *sum += b;
        }
    }

    let splits = spec.splits as f64;
    let averaged_coefficients = courses
        .iter()
        .cloned()
        .zip(coef_sum[1..].iter().map(|s| s / splits))
        .collect();
    Ok(RidgeResult {
        averaged_intercept: coef_sum[0] / splits,
        averaged_coefficients,
        mean_rsq: per_split_rsq.iter().sum::<f64>() / splits,
        per_split_rsq,
        n_students: n,
    })
}

/// Outcome of one candidate in a third-course sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub course: CourseKey,
    pub outcome: SweepOutcome,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SweepOutcome {
    Fitted(RidgeResult),
    Skipped { reason: String },
}

impl SweepEntry {
    pub fn result(&self) -> Option<&RidgeResult> {
        match &self.outcome {
            SweepOutcome::Fitted(r) => Some(r),
            SweepOutcome::Skipped { .. } => None,
        }
    }
}

/// Runs [`repeated_holdout`] once per candidate third course, preserving
/// candidate order. Per-candidate failures are collected as skips, not
/// propagated.
pub fn third_course_sweep(
    cohort: &Cohort,
    base: &RidgeSpec,
    candidates: &[CourseKey],
) -> Vec<SweepEntry> {
    candidates
        .iter()
        .map(|course| {
            let spec = RidgeSpec {
                third_course: course.clone(),
                ..base.clone()
            };
            let outcome = match repeated_holdout(cohort, &spec) {
                Ok(result) => SweepOutcome::Fitted(result),
                Err(err) => SweepOutcome::Skipped {
                    reason: err.to_string(),
                },
            };
            SweepEntry {
                course: course.clone(),
                outcome,
            }
        })
        .collect()
}

/// Evaluates the averaged prediction function on a grade map, clamping the
/// output to the grade scale. Every model course must be present.
pub fn predict(result: &RidgeResult, grades: &BTreeMap<CourseKey, f64>) -> Result<Prediction> {
    let mut value = result.averaged_intercept;
    for (course, coef) in &result.averaged_coefficients {
        let grade = grades
            .get(course)
            .ok_or_else(|| Error::MissingGrade {
                course: course.clone(),
            })?;
        value += coef * grade;
    }
    if value < GRADE_MIN {
        Ok(Prediction {
            value: GRADE_MIN,
            clamped: true,
        })
    } else if value > GRADE_MAX {
        Ok(Prediction {
            value: GRADE_MAX,
            clamped: true,
        })
    } else {
        Ok(Prediction {
            value,
            clamped: false,
        })
    }
}
