//! The students-by-courses grade design matrix.
//!
//! Row `i`, column `k` holds student `i`'s grade in course `k`, or exactly
//! `0.0` when the student never took it. The zero-fill deliberately
//! conflates "not taken" with "grade 0"; that is the encoding the analysis
//! is defined on, and no column standardization is applied.

use crate::catalog::{CourseCatalog, CourseKey};
use crate::cohort::Cohort;
use crate::error::{Error, Result};
use crate::records::{GRADE_MAX, GRADE_MIN};

/// Dense column-major design matrix with response vector.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    n_rows: usize,
    courses: Vec<CourseKey>,
    columns: Vec<Vec<f64>>,
    taken: Vec<Vec<bool>>,
    response: Vec<f64>,
}

impl DesignMatrix {
    /// Assembles a design matrix from explicit columns. `taken[k][i]` false
    /// requires `columns[k][i] == 0.0`; grades where taken must lie on the
    /// grade scale; course keys must be distinct.
    pub fn from_columns(
        courses: Vec<CourseKey>,
        columns: Vec<Vec<f64>>,
        taken: Vec<Vec<bool>>,
        response: Vec<f64>,
    ) -> Result<Self> {
        if courses.len() != columns.len() || courses.len() != taken.len() {
            return Err(Error::InvalidParameter(
                "courses, columns, and taken must have equal lengths".into(),
            ));
        }
        let n_rows = response.len();
        for (k, course) in courses.iter().enumerate() {
            if columns[k].len() != n_rows || taken[k].len() != n_rows {
                return Err(Error::InvalidParameter(format!(
                    "column {course} length does not match response length {n_rows}"
                )));
            }
            for i in 0..n_rows {
                if !taken[k][i] && columns[k][i] != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "column {course} row {i}: untaken cell must be 0"
                    )));
                }
                if taken[k][i] && !(GRADE_MIN..=GRADE_MAX).contains(&columns[k][i]) {
                    return Err(Error::InvalidParameter(format!(
                        "column {course} row {i}: grade {} out of range",
                        columns[k][i]
                    )));
                }
            }
        }
        if courses.windows(2).any(|w| w[0] >= w[1]) {
            let mut sorted = courses.clone();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter("duplicate course columns".into()));
            }
        }
        Ok(DesignMatrix {
            n_rows,
            courses,
            columns,
            taken,
            response,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.courses.len()
    }

    pub fn column_courses(&self) -> &[CourseKey] {
        &self.courses
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.columns[k]
    }

    pub fn taken(&self, row: usize, col: usize) -> bool {
        self.taken[col][row]
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    /// `response - intercept - G * beta`.
    pub fn residuals(&self, intercept: f64, beta: &[f64]) -> Vec<f64> {
        assert_eq!(beta.len(), self.n_cols());
        let mut r: Vec<f64> = self.response.iter().map(|y| y - intercept).collect();
        for (coef, col) in beta.iter().zip(&self.columns) {
            if *coef != 0.0 {
                for (ri, g) in r.iter_mut().zip(col) {
                    *ri -= coef * g;
                }
            }
        }
        r
    }
}

/// Builds the design matrix for a cohort: rows are students in ascending
/// `student_id` order, columns are the catalog courses taken by at least one
/// cohort student in ascending key order, and the response is the overall
/// GPA per row.
pub fn build_design(cohort: &Cohort, catalog: &CourseCatalog) -> Result<DesignMatrix> {
    if cohort.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot build a design matrix from an empty cohort".into(),
        ));
    }
    let courses: Vec<CourseKey> = cohort
        .courses()
        .into_iter()
        .filter(|c| catalog.contains(c))
        .collect();
    let n = cohort.len();
    let mut columns = vec![vec![0.0; n]; courses.len()];
    let mut taken = vec![vec![false; n]; courses.len()];
    for (k, course) in courses.iter().enumerate() {
        for (i, student) in cohort.students().iter().enumerate() {
            if let Some(&g) = student.grades.get(course) {
                columns[k][i] = g;
                taken[k][i] = true;
            }
        }
    }
    let response = cohort.students().iter().map(|s| s.overall_gpa).collect();
    DesignMatrix::from_columns(courses, columns, taken, response)
}
