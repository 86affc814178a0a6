//! Raw grade-record ingestion.
//!
//! One [`GradeRecord`] is one row of the department's export: a student took
//! a course in a term and earned a grade. Grades are grade points in
//! `[0.0, 4.3]`, where 4.3 is an A+. Input is CSV with a header row naming
//! the eight columns (`ID`, `Term`, `Major Code`, `Classification`,
//! `Admit Class`, `Subject`, `Course`, `Grade`) in any order. Duplicate
//! (student, term, course) rows are preserved; retake resolution happens
//! later, during cohort construction.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::CourseKey;
use crate::error::{Error, Result};

pub const GRADE_MIN: f64 = 0.0;
pub const GRADE_MAX: f64 = 4.3;

/// Academic standing codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "UFR")]
    Freshman,
    #[serde(rename = "USO")]
    Sophomore,
    #[serde(rename = "UJR")]
    Junior,
    #[serde(rename = "USR")]
    Senior,
}

impl Classification {
    pub fn code(self) -> &'static str {
        match self {
            Classification::Freshman => "UFR",
            Classification::Sophomore => "USO",
            Classification::Junior => "UJR",
            Classification::Senior => "USR",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Classification {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "UFR" => Ok(Classification::Freshman),
            "USO" => Ok(Classification::Sophomore),
            "UJR" => Ok(Classification::Junior),
            "USR" => Ok(Classification::Senior),
            _ => Err(()),
        }
    }
}

/// One row of the grade data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeRecord {
    pub student_id: String,
    pub term: String,
    pub major_code: String,
    pub classification: Classification,
    pub admit_class: Classification,
    pub subject: String,
    pub course: String,
    pub grade: f64,
}

impl GradeRecord {
    pub fn course_key(&self) -> CourseKey {
        CourseKey::new(self.subject.clone(), self.course.clone())
    }
}

/// Supported input encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
}

const COLUMNS: [&str; 8] = [
    "ID",
    "Term",
    "Major Code",
    "Classification",
    "Admit Class",
    "Subject",
    "Course",
    "Grade",
];

/// Parses grade records, preserving row order. Empty input yields an empty
/// list. Malformed rows (wrong arity, unparsable or out-of-range grade,
/// unknown classification code) abort with the 1-based row number, counting
/// the header as row 1.
pub fn parse_records<R: Read>(source: R, format: Format) -> Result<Vec<GradeRecord>> {
    match format {
        Format::Csv => parse_csv(source),
    }
}

fn parse_csv<R: Read>(source: R) -> Result<Vec<GradeRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);

    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
        // Completely empty input.
        return Ok(Vec::new());
    }

    let mut col = [0usize; 8];
    for (slot, name) in col.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or(Error::MissingColumn { name })?;
    }

    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(Error::MalformedRow {
                row,
                detail: format!(
                    "expected {} fields, found {}",
                    headers.len(),
                    record.len()
                ),
            });
        }
        let field = |i: usize| record[col[i]].trim();

        let classification = parse_classification(field(3), row)?;
        let admit_class = parse_classification(field(4), row)?;
        let grade = parse_grade(field(7), row)?;

        out.push(GradeRecord {
            student_id: field(0).to_string(),
            term: field(1).to_string(),
            major_code: field(2).to_string(),
            classification,
            admit_class,
            subject: field(5).to_string(),
            course: field(6).to_string(),
            grade,
        });
    }
    Ok(out)
}

fn parse_classification(value: &str, row: u64) -> Result<Classification> {
    value.parse().map_err(|()| Error::UnknownClassification {
        row,
        value: value.to_string(),
    })
}

fn parse_grade(value: &str, row: u64) -> Result<f64> {
    let grade: f64 = value.parse().map_err(|_| Error::MalformedRow {
        row,
        detail: format!("unparsable grade {value:?}"),
    })?;
    if !grade.is_finite() || !(GRADE_MIN..=GRADE_MAX).contains(&grade) {
        return Err(Error::GradeOutOfRange {
            row,
            value: value.to_string(),
        });
    }
    Ok(grade)
}

/// Canonical grade rendering: whole numbers keep one decimal (`4.0`, not
/// `4`), everything else uses the shortest exact form.
pub fn format_grade(grade: f64) -> String {
    if grade == grade.trunc() {
        format!("{grade:.1}")
    } else {
        grade.to_string()
    }
}

/// Writes records as CSV in the canonical column order. Together with
/// [`parse_records`] this round-trips all eight fields.
pub fn write_records<W: Write>(sink: W, records: &[GradeRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(COLUMNS)?;
    for r in records {
        writer.write_record([
            r.student_id.as_str(),
            r.term.as_str(),
            r.major_code.as_str(),
            r.classification.code(),
            r.admit_class.code(),
            r.subject.as_str(),
            r.course.as_str(),
            &format_grade(r.grade),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
