//! Cohort construction: filter raw records down to an analysis population
//! and compute each student's overall GPA.
//!
//! A student enters a cohort when their admit class matches the filter (if
//! set), the major on their most recent record is one of the cohort's
//! majors, and they have taken enough distinct counted courses overall and
//! at the upper-division level. The overall GPA is the unweighted mean of
//! the student's counted course grades; the export carries no credit hours,
//! so unit weighting is the only option. A course's own grade contributes to
//! the GPA it is later correlated and regressed against.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::catalog::{CourseCatalog, CourseKey, TermRule};
use crate::error::{Error, Result};
use crate::records::{Classification, GradeRecord};

/// Membership rules for one cohort.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CohortSpec {
    /// Major codes admitted to the cohort. Empty means no major filter.
    pub majors: BTreeSet<String>,
    /// When set, only students with this admit class are included
    /// (e.g. `UFR` to exclude transfer students).
    pub admit_class_filter: Option<Classification>,
    /// Minimum number of distinct counted courses.
    pub min_math_courses: usize,
    /// Minimum number of distinct counted upper-division courses.
    pub min_upper_division: usize,
    /// Subject headings whose records count toward thresholds and GPA.
    pub subjects_counted: BTreeSet<String>,
}

impl Default for CohortSpec {
    fn default() -> Self {
        CohortSpec {
            majors: BTreeSet::new(),
            admit_class_filter: None,
            min_math_courses: 5,
            min_upper_division: 1,
            subjects_counted: ["MATH".to_string()].into(),
        }
    }
}

/// One included student: retake-resolved grades per counted course, plus
/// the overall GPA over exactly those grades.
#[derive(Debug, Clone, Serialize)]
pub struct CohortStudent {
    pub student_id: String,
    pub grades: BTreeMap<CourseKey, f64>,
    pub overall_gpa: f64,
}

/// An immutable analysis population. Students are held in ascending
/// `student_id` order.
#[derive(Debug, Clone, Serialize)]
pub struct Cohort {
    students: Vec<CohortStudent>,
    spec: CohortSpec,
    source_records: usize,
}

impl Cohort {
    pub fn students(&self) -> &[CohortStudent] {
        &self.students
    }

    pub fn len(&self) -> usize {
        self.students.len()
    }

    pub fn is_empty(&self) -> bool {
        self.students.is_empty()
    }

    pub fn spec(&self) -> &CohortSpec {
        &self.spec
    }

    pub fn source_records(&self) -> usize {
        self.source_records
    }

    /// Distinct courses taken by at least one cohort student, ascending.
    pub fn courses(&self) -> BTreeSet<CourseKey> {
        self.students
            .iter()
            .flat_map(|s| s.grades.keys().cloned())
            .collect()
    }

    /// Students who have a grade in every listed course, in cohort order.
    pub fn students_with_all(&self, courses: &[CourseKey]) -> Vec<&CohortStudent> {
        self.students
            .iter()
            .filter(|s| courses.iter().all(|c| s.grades.contains_key(c)))
            .collect()
    }
}

/// Unweighted mean of the grade map.
pub fn compute_gpa(per_course_grades: &BTreeMap<CourseKey, f64>) -> Result<f64> {
    if per_course_grades.is_empty() {
        return Err(Error::NoGrades);
    }
    let sum: f64 = per_course_grades.values().sum();
    Ok(sum / per_course_grades.len() as f64)
}

// Per-student fold state while scanning records in input order.
struct StudentScan<'a> {
    admit_class: Classification,
    // (term, input index) of the latest record, and its major code
    last_seen: (&'a str, usize),
    major: &'a str,
    // course -> (term, input index, grade) of the latest enrollment
    courses: BTreeMap<CourseKey, (&'a str, usize, f64)>,
}

/// Builds a cohort from raw records.
///
/// Counted records (subject in `spec.subjects_counted`) must resolve in the
/// catalog; records under other subjects are ignored. When a (student,
/// course) pair repeats, the grade from the most recent term wins, with
/// later input rows breaking term ties.
pub fn build_cohort(
    records: &[GradeRecord],
    spec: &CohortSpec,
    catalog: &CourseCatalog,
    terms: &TermRule,
) -> Result<Cohort> {
    let mut scan: BTreeMap<&str, StudentScan> = BTreeMap::new();

    for (idx, record) in records.iter().enumerate() {
        let entry = scan
            .entry(record.student_id.as_str())
            .or_insert_with(|| StudentScan {
                admit_class: record.admit_class,
                last_seen: (record.term.as_str(), idx),
                major: record.major_code.as_str(),
                courses: BTreeMap::new(),
            });

        // Later rows overwrite: (term, input index) is strictly increasing
        // in idx, so >= on term order means "at least as recent".
        if terms.compare(record.term.as_str(), entry.last_seen.0).is_ge() {
            entry.last_seen = (record.term.as_str(), idx);
            entry.major = record.major_code.as_str();
            entry.admit_class = record.admit_class;
        }

        if !spec.subjects_counted.contains(&record.subject) {
            continue;
        }
        let key = record.course_key();
        if !catalog.contains(&key) {
            return Err(Error::UnknownCourse { course: key });
        }
        let slot = entry.courses.entry(key);
        match slot {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert((record.term.as_str(), idx, record.grade));
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                if terms.compare(record.term.as_str(), o.get().0).is_ge() {
                    o.insert((record.term.as_str(), idx, record.grade));
                }
            }
        }
    }

    let mut students = Vec::new();
    for (id, state) in scan {
        if let Some(filter) = spec.admit_class_filter {
            if state.admit_class != filter {
                continue;
            }
        }
        if !spec.majors.is_empty() && !spec.majors.contains(state.major) {
            continue;
        }
        if state.courses.len() < spec.min_math_courses {
            continue;
        }
        let upper = state
            .courses
            .keys()
            .filter(|k| catalog.get(k).is_some_and(|e| e.upper_division))
            .count();
        if upper < spec.min_upper_division {
            continue;
        }
        let grades: BTreeMap<CourseKey, f64> = state
            .courses
            .into_iter()
            .map(|(k, (_, _, g))| (k, g))
            .collect();
        let overall_gpa = compute_gpa(&grades)?;
        students.push(CohortStudent {
            student_id: id.to_string(),
            grades,
            overall_gpa,
        });
    }

    // BTreeMap iteration already yields ascending student_id.
    Ok(Cohort {
        students,
        spec: spec.clone(),
        source_records: records.len(),
    })
}
