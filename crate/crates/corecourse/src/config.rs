//! The TOML project configuration: course catalog, named cohorts, analysis
//! parameters, and (optionally) a synthetic-data recipe.
//!
//! ```toml
//! seed = 42
//! season_order = ["W", "S", "F"]
//!
//! [[major]]
//! code = "0180"
//! name = "Pure Mathematics"
//!
//! [[course]]
//! subject = "MATH"
//! code = "115A"
//! name = "Linear Algebra"
//! upper_division = true
//! core = true
//! required_for = ["0180"]
//!
//! [[cohort]]
//! name = "pure-math-freshmen"
//! majors = ["0180"]
//! admit_class = "UFR"
//! min_math_courses = 5
//! min_upper_division = 1
//! subjects = ["MATH"]
//! min_sample_size = 10
//!
//! [lasso]
//! alpha = 0.1
//!
//! [ridge]
//! alpha = 2.5
//! fixed_courses = ["MATH 115A", "MATH 131A"]
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::catalog::{CatalogEntry, CourseCatalog, CourseKey, TermRule};
use crate::cohort::CohortSpec;
use crate::correlation::DEFAULT_MIN_SAMPLE;
use crate::error::{Error, Result};
use crate::records::Classification;
use crate::ridge;
use crate::synth::{GpaModel, SynthCourse, SynthSpec};
use crate::lasso;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default)]
    season_order: Option<Vec<String>>,
    #[serde(default, rename = "major")]
    majors: Vec<RawMajor>,
    #[serde(default, rename = "course")]
    courses: Vec<RawCourse>,
    #[serde(default, rename = "cohort")]
    cohorts: Vec<RawCohort>,
    #[serde(default)]
    lasso: RawLasso,
    #[serde(default)]
    ridge: RawRidge,
    #[serde(default)]
    synth: Option<RawSynth>,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMajor {
    code: String,
    name: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCourse {
    subject: String,
    code: String,
    name: String,
    #[serde(default)]
    upper_division: bool,
    #[serde(default)]
    core: bool,
    #[serde(default)]
    required_for: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCohort {
    name: String,
    #[serde(default)]
    majors: Vec<String>,
    #[serde(default)]
    admit_class: Option<String>,
    #[serde(default = "default_min_math")]
    min_math_courses: usize,
    #[serde(default = "default_min_upper")]
    min_upper_division: usize,
    #[serde(default)]
    subjects: Vec<String>,
    #[serde(default = "default_min_sample")]
    min_sample_size: usize,
}

fn default_min_math() -> usize {
    5
}

fn default_min_upper() -> usize {
    1
}

fn default_min_sample() -> usize {
    DEFAULT_MIN_SAMPLE
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLasso {
    #[serde(default = "default_lasso_alpha")]
    alpha: f64,
    #[serde(default = "default_lasso_tol")]
    tol: f64,
    #[serde(default = "default_lasso_max_iter")]
    max_iter: usize,
    #[serde(default = "default_path_points")]
    path_points: usize,
    #[serde(default = "default_path_ratio")]
    path_ratio: f64,
}

fn default_lasso_alpha() -> f64 {
    0.1
}

fn default_lasso_tol() -> f64 {
    lasso::DEFAULT_TOL
}

fn default_lasso_max_iter() -> usize {
    lasso::DEFAULT_MAX_ITER
}

fn default_path_points() -> usize {
    50
}

fn default_path_ratio() -> f64 {
    1000.0
}

impl Default for RawLasso {
    fn default() -> Self {
        RawLasso {
            alpha: default_lasso_alpha(),
            tol: default_lasso_tol(),
            max_iter: default_lasso_max_iter(),
            path_points: default_path_points(),
            path_ratio: default_path_ratio(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRidge {
    #[serde(default = "default_ridge_alpha")]
    alpha: f64,
    #[serde(default = "default_splits")]
    splits: usize,
    #[serde(default = "default_train_fraction")]
    train_fraction: f64,
    #[serde(default)]
    fixed_courses: Vec<String>,
    /// Candidate third courses; empty means "derive from the lasso table".
    #[serde(default)]
    candidates: Vec<String>,
    #[serde(default = "default_min_students")]
    min_students: usize,
}

fn default_ridge_alpha() -> f64 {
    ridge::DEFAULT_ALPHA
}

fn default_splits() -> usize {
    ridge::DEFAULT_SPLITS
}

fn default_train_fraction() -> f64 {
    ridge::DEFAULT_TRAIN_FRACTION
}

fn default_min_students() -> usize {
    ridge::DEFAULT_MIN_STUDENTS
}

impl Default for RawRidge {
    fn default() -> Self {
        RawRidge {
            alpha: default_ridge_alpha(),
            splits: default_splits(),
            train_fraction: default_train_fraction(),
            fixed_courses: Vec::new(),
            candidates: Vec::new(),
            min_students: default_min_students(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSynth {
    #[serde(default = "default_synth_students")]
    n_students: usize,
    #[serde(default = "default_synth_noise")]
    noise_sd: f64,
    #[serde(default = "default_ability_mean")]
    ability_mean: f64,
    #[serde(default = "default_ability_sd")]
    ability_sd: f64,
    major: String,
    #[serde(default, rename = "course")]
    courses: Vec<RawSynthCourse>,
}

fn default_synth_students() -> usize {
    400
}

fn default_synth_noise() -> f64 {
    0.6
}

fn default_ability_mean() -> f64 {
    2.9
}

fn default_ability_sd() -> f64 {
    0.9
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSynthCourse {
    subject: String,
    code: String,
    signal: f64,
    #[serde(default = "default_take_probability")]
    take_probability: f64,
}

fn default_take_probability() -> f64 {
    1.0
}

/// Per-cohort analysis parameters beyond membership rules.
#[derive(Debug, Clone)]
pub struct CohortConfig {
    pub spec: CohortSpec,
    pub min_sample_size: usize,
}

/// Lasso stage parameters.
#[derive(Debug, Clone)]
pub struct LassoConfig {
    pub alpha: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub path_points: usize,
    pub path_ratio: f64,
}

/// Ridge stage parameters.
#[derive(Debug, Clone)]
pub struct RidgeConfig {
    pub alpha: f64,
    pub splits: usize,
    pub train_fraction: f64,
    pub fixed_courses: Vec<CourseKey>,
    pub candidates: Vec<CourseKey>,
    pub min_students: usize,
}

/// Parsed and validated project configuration.
#[derive(Debug, Clone)]
pub struct ProjectConfig {
    pub seed: u64,
    pub catalog: CourseCatalog,
    pub terms: TermRule,
    pub cohorts: BTreeMap<String, CohortConfig>,
    pub lasso: LassoConfig,
    pub ridge: RidgeConfig,
    pub synth: Option<SynthSpec>,
}

impl ProjectConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::PathIo {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_str(&text)
    }

    pub fn cohort(&self, name: &str) -> Result<&CohortConfig> {
        self.cohorts
            .get(name)
            .ok_or_else(|| Error::UnknownCohort(name.to_string()))
    }
}

impl FromStr for ProjectConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;

        let terms = match raw.season_order {
            Some(order) => TermRule::new(order)?,
            None => TermRule::default(),
        };

        let mut catalog = CourseCatalog::new();
        for major in &raw.majors {
            catalog.add_major(major.code.clone(), major.name.clone());
        }
        for course in raw.courses {
            catalog.add_course(
                CourseKey::new(course.subject, course.code),
                CatalogEntry {
                    display_name: course.name,
                    upper_division: course.upper_division,
                    core: course.core,
                    required_for: course.required_for.into_iter().collect(),
                },
            )?;
        }
        catalog.validate()?;

        let mut cohorts = BTreeMap::new();
        for cohort in raw.cohorts {
            if cohort.name.is_empty()
                || !cohort
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                return Err(Error::Config(format!(
                    "cohort name {:?} must be nonempty and use only letters, \
                     digits, '-', '_'",
                    cohort.name
                )));
            }
            let admit_class_filter = match &cohort.admit_class {
                None => None,
                Some(code) => Some(Classification::from_str(code).map_err(|()| {
                    Error::Config(format!(
                        "cohort {:?}: unknown admit class {code:?}",
                        cohort.name
                    ))
                })?),
            };
            let subjects_counted: BTreeSet<String> = if cohort.subjects.is_empty() {
                // default: every subject appearing in the catalog
                catalog
                    .courses()
                    .map(|(k, _)| k.subject().to_string())
                    .collect()
            } else {
                cohort.subjects.into_iter().collect()
            };
            let spec = CohortSpec {
                majors: cohort.majors.into_iter().collect(),
                admit_class_filter,
                min_math_courses: cohort.min_math_courses,
                min_upper_division: cohort.min_upper_division,
                subjects_counted,
            };
            if cohorts
                .insert(
                    cohort.name.clone(),
                    CohortConfig {
                        spec,
                        min_sample_size: cohort.min_sample_size,
                    },
                )
                .is_some()
            {
                return Err(Error::Config(format!(
                    "duplicate cohort name {:?}",
                    cohort.name
                )));
            }
        }

        let parse_keys = |labels: &[String], what: &str| -> Result<Vec<CourseKey>> {
            labels
                .iter()
                .map(|s| {
                    let key: CourseKey = s.parse()?;
                    if !catalog.contains(&key) {
                        return Err(Error::Config(format!(
                            "{what} references {key}, which is not in the catalog"
                        )));
                    }
                    Ok(key)
                })
                .collect()
        };
        let fixed_courses = parse_keys(&raw.ridge.fixed_courses, "ridge.fixed_courses")?;
        let candidates = parse_keys(&raw.ridge.candidates, "ridge.candidates")?;

        let synth = match raw.synth {
            None => None,
            Some(s) => {
                let courses = s
                    .courses
                    .into_iter()
                    .map(|c| {
                        let course = CourseKey::new(c.subject, c.code);
                        let entry = catalog.get(&course).ok_or_else(|| {
                            Error::Config(format!(
                                "synth course {course} is not in the catalog"
                            ))
                        })?;
                        Ok(SynthCourse {
                            upper_division: entry.upper_division,
                            course,
                            signal: c.signal,
                            take_probability: c.take_probability,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(SynthSpec {
                    n_students: s.n_students,
                    courses,
                    noise_sd: s.noise_sd,
                    ability_mean: s.ability_mean,
                    ability_sd: s.ability_sd,
                    gpa_model: GpaModel::Emergent,
                    major_code: s.major,
                    admit_class: Classification::Freshman,
                    seed: raw.seed,
                })
            }
        };

        Ok(ProjectConfig {
            seed: raw.seed,
            catalog,
            terms,
            cohorts,
            lasso: LassoConfig {
                alpha: raw.lasso.alpha,
                tol: raw.lasso.tol,
                max_iter: raw.lasso.max_iter,
                path_points: raw.lasso.path_points,
                path_ratio: raw.lasso.path_ratio,
            },
            ridge: RidgeConfig {
                alpha: raw.ridge.alpha,
                splits: raw.ridge.splits,
                train_fraction: raw.ridge.train_fraction,
                fixed_courses,
                candidates,
                min_students: raw.ridge.min_students,
            },
            synth,
        })
    }
}
