//! The mixed correlation metric.
//!
//! For each course we compare the ranking of students by course grade with
//! the ranking by overall GPA. Two coefficients are combined:
//!
//! * Spearman's rho over tie-averaged ranks,
//!   `rho_s = 1 - sum(d_i^2) / Z` with `Z = n (n^2 - 1) / 6`;
//! * the Pearson correlation of raw grades against GPA,
//!   `r_sq = sum(dx dy) / sqrt(sum(dx^2) sum(dy^2))` (the column is named
//!   `R_sq` in the output tables for historical reasons, but it is the
//!   plain correlation coefficient and is not squared);
//!
//! and fused into `rho_h = sqrt(rho_s^2 + r_sq^2)`, the distance of the
//! course's `(rho_s, r_sq)` point from the origin. Larger `rho_h` means the
//! course grade tracks overall GPA more closely.
//!
//! Grades live on a 13-step scale, so ties are everywhere; ranks use the
//! average-rank convention, which keeps the rank sum at `n(n+1)/2` and
//! reduces to the textbook formula on tie-free data.

use serde::Serialize;

use crate::catalog::CourseKey;
use crate::cohort::Cohort;
use crate::error::{Error, Result};

/// Hard floor on sample size for a correlation to be computed at all.
pub const MIN_CORRELATION_N: usize = 3;

/// Default per-course minimum sample size for [`correlation_table`].
pub const DEFAULT_MIN_SAMPLE: usize = 10;

/// 1-based ranks with ties resolved to the average of the spanned ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    ranks: Vec<f64>,
    tie_groups: usize,
}

impl RankVector {
    pub fn ranks(&self) -> &[f64] {
        &self.ranks
    }

    /// Number of groups of two or more equal values.
    pub fn tie_groups(&self) -> usize {
        self.tie_groups
    }
}

/// Ranks values ascending; tied values share the average of the ranks they
/// span. A constant input is valid: every rank is `(n + 1) / 2`.
pub fn rank_with_ties(values: &[f64]) -> RankVector {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("non-finite value"));

    let mut ranks = vec![0.0; n];
    let mut tie_groups = 0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end (0-based) hold equal values; average of the
        // 1-based ranks start+1 ..= end is (start + end + 1) / 2
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        if end - start > 1 {
            tie_groups += 1;
        }
        start = end;
    }
    RankVector { ranks, tie_groups }
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < MIN_CORRELATION_N {
        return Err(Error::SampleTooSmall {
            n: x.len(),
            min: MIN_CORRELATION_N,
        });
    }
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Err(Error::ZeroVariance);
    }
    Ok(())
}

/// Spearman's rho of course grades against GPAs.
pub fn spearman_rho(course_grades: &[f64], gpas: &[f64]) -> Result<f64> {
    check_pair(course_grades, gpas)?;
    let n = course_grades.len() as f64;
    let rx = rank_with_ties(course_grades);
    let ry = rank_with_ties(gpas);
    let normalizer = n * (n * n - 1.0) / 6.0;
    let sum_sq: f64 = rx
        .ranks()
        .iter()
        .zip(ry.ranks())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(1.0 - sum_sq / normalizer)
}

/// Pearson correlation of course grades against GPAs.
pub fn pearson_rsq(course_grades: &[f64], gpas: &[f64]) -> Result<f64> {
    check_pair(course_grades, gpas)?;
    let n = course_grades.len() as f64;
    let mean_x: f64 = course_grades.iter().sum::<f64>() / n;
    let mean_y: f64 = gpas.iter().sum::<f64>() / n;
    let mut cross = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&x, &y) in course_grades.iter().zip(gpas) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cross += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    Ok(cross / (var_x.sqrt() * var_y.sqrt()))
}

/// Distance of `(rho_s, r_sq)` from the origin.
pub fn rho_h(rho_s: f64, r_sq: f64) -> f64 {
    (rho_s * rho_s + r_sq * r_sq).sqrt()
}

/// One row of the mixed-correlation table.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationRow {
    pub course: CourseKey,
    pub rho_s: f64,
    pub r_sq: f64,
    pub rho_h: f64,
    pub n: usize,
}

/// Courses omitted from a correlation table and why.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CorrelationDiagnostics {
    /// Courses with fewer takers than `min_n`, with their taker counts.
    pub below_min_n: Vec<(CourseKey, usize)>,
    /// Courses whose takers all share one grade.
    pub constant_grades: Vec<CourseKey>,
    /// Courses whose takers all share one GPA.
    pub constant_gpas: Vec<CourseKey>,
}

impl CorrelationDiagnostics {
    pub fn omitted(&self) -> usize {
        self.below_min_n.len() + self.constant_grades.len() + self.constant_gpas.len()
    }
}

/// Computes the per-course table for a cohort: one row per course taken by
/// at least `min_n` students with nonconstant grades and GPAs, sorted by
/// `rho_h` descending, ties broken by course key. Courses failing the
/// preconditions are omitted and reported in the diagnostics.
pub fn correlation_table(
    cohort: &Cohort,
    min_n: usize,
) -> (Vec<CorrelationRow>, CorrelationDiagnostics) {
    let min_n = min_n.max(MIN_CORRELATION_N);
    let mut rows = Vec::new();
    let mut diagnostics = CorrelationDiagnostics::default();

    for course in cohort.courses() {
        let mut grades = Vec::new();
        let mut gpas = Vec::new();
        for student in cohort.students() {
            if let Some(&g) = student.grades.get(&course) {
                grades.push(g);
                gpas.push(student.overall_gpa);
            }
        }
        if grades.len() < min_n {
            diagnostics.below_min_n.push((course, grades.len()));
            continue;
        }
        if grades.iter().all(|&g| g == grades[0]) {
            diagnostics.constant_grades.push(course);
            continue;
        }
        if gpas.iter().all(|&g| g == gpas[0]) {
            diagnostics.constant_gpas.push(course);
            continue;
        }
        let rho_s = spearman_rho(&grades, &gpas).expect("preconditions checked");
        let r_sq = pearson_rsq(&grades, &gpas).expect("preconditions checked");
        rows.push(CorrelationRow {
            course,
            rho_s,
            r_sq,
            rho_h: rho_h(rho_s, r_sq),
            n: grades.len(),
        });
    }

    rows.sort_by(|a, b| {
        b.rho_h
            .partial_cmp(&a.rho_h)
            .expect("rho_h is finite")
            .then_with(|| a.course.cmp(&b.course))
    });
    (rows, diagnostics)
}
