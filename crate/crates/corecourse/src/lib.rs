//! Identify "core" courses in a university curriculum from student grade
//! records.
//!
//! Departments label courses core when they carry foundational material.
//! This crate checks that label against the data from two angles:
//!
//! * **Correlation** — for each course, how well the ranking of students by
//!   course grade agrees with the ranking by overall GPA, measured by the
//!   composite metric `rho_h = sqrt(rho_s^2 + r_sq^2)`
//!   ([`correlation`]).
//! * **Impact** — which course grades a sparse linear model of overall GPA
//!   actually selects, via l1-penalized regression solved by coordinate
//!   descent ([`lasso`]), followed by an l2-penalized prediction model over
//!   a handful of selected courses evaluated with repeated 90/10 holdouts
//!   ([`ridge`]).
//!
//! [`records`] and [`cohort`] turn a raw CSV export into an analysis
//! population, [`synth`] generates datasets with planted ground truth for
//! validation, and [`report`] plus the `corecourse` binary tie the stages
//! into a reproducible report. A narrative guide lives in `book/`; its code
//! snippets compile and run as doc-tests.

pub mod catalog;
pub mod cohort;
pub mod config;
pub mod correlation;
pub mod design;
pub mod error;
pub mod lasso;
mod linalg;
pub mod records;
pub mod report;
pub mod ridge;
pub mod synth;

pub use catalog::{CatalogEntry, CourseCatalog, CourseKey, TermRule};
pub use cohort::{build_cohort, compute_gpa, Cohort, CohortSpec};
pub use correlation::{
    correlation_table, pearson_rsq, rank_with_ties, rho_h, spearman_rho, CorrelationRow,
};
pub use design::{build_design, DesignMatrix};
pub use error::{Error, Result};
pub use lasso::{alpha_max, fit_lasso, lasso_path, soft_threshold, LassoFit};
pub use records::{parse_records, write_records, Format, GradeRecord};
pub use report::{join_summary, run_pipeline, RunConfig, SummaryRow};
pub use ridge::{
    out_of_sample_rsq, predict, repeated_holdout, solve_ridge, third_course_sweep, RidgeResult,
    RidgeSpec,
};
pub use synth::{generate, GpaModel, SynthSpec, SynthTruth};

// The book's code snippets double as doc-tests so the guide cannot drift
// from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/ingestion.md")]
    mod ingestion {}
    #[doc = include_str!("../../../book/src/cohorts.md")]
    mod cohorts {}
    #[doc = include_str!("../../../book/src/correlation.md")]
    mod correlation {}
    #[doc = include_str!("../../../book/src/lasso.md")]
    mod lasso {}
    #[doc = include_str!("../../../book/src/ridge.md")]
    mod ridge {}
    #[doc = include_str!("../../../book/src/synthetic.md")]
    mod synthetic {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
