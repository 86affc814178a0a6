//! Synthetic grade-record generation with known ground truth.
//!
//! Real student records cannot be redistributed, so validation runs on
//! generated cohorts instead. Each student draws a latent ability; each
//! course mixes ability with independent noise according to its signal
//! strength and quantizes onto the 13-step letter-grade scale:
//!
//! ```text
//! grade = quantize( signal * ability + (1 - signal) * noise )
//! ```
//!
//! High-signal courses therefore track ability (and through it, overall
//! GPA) closely, and the expected rho_h ranking of courses is the signal
//! ranking — known without running the pipeline.
//!
//! Two GPA regimes are supported. Under `Emergent`, the GPA downstream
//! analyses see is simply the mean of the generated grades. Under
//! `Planted`, the target GPA is an explicit linear function of the model
//! courses plus noise, and a block of equal-grade filler courses is
//! appended per student so that the mean of all generated grades equals the
//! planted value; the linear structure then survives the ordinary
//! records-to-cohort pipeline untouched.
//!
//! Generation is deterministic: student `i` draws from its own ChaCha8
//! stream (`seed` as the key, `i` as the stream), so output is independent
//! of generation order.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::catalog::{CatalogEntry, CourseCatalog, CourseKey};
use crate::cohort::CohortSpec;
use crate::error::{Error, Result};
use crate::records::{Classification, GradeRecord, GRADE_MAX, GRADE_MIN};

/// The 13-step letter-grade scale, F through A+.
pub const GRADE_STEPS: [f64; 13] = [
    0.0, 0.7, 1.0, 1.3, 1.7, 2.0, 2.3, 2.7, 3.0, 3.3, 3.7, 4.0, 4.3,
];

/// Snaps a raw value to the nearest step of the grade scale.
pub fn quantize_grade(raw: f64) -> f64 {
    let clamped = raw.clamp(GRADE_MIN, GRADE_MAX);
    let mut best = GRADE_STEPS[0];
    let mut best_gap = (clamped - best).abs();
    for &step in &GRADE_STEPS[1..] {
        let gap = (clamped - step).abs();
        if gap < best_gap {
            best = step;
            best_gap = gap;
        }
    }
    best
}

/// One generated course.
#[derive(Debug, Clone, Serialize)]
pub struct SynthCourse {
    pub course: CourseKey,
    /// Weight of ability vs. noise in this course's grades, in `[0, 1]`.
    pub signal: f64,
    /// Probability a student takes the course, in `(0, 1]`.
    pub take_probability: f64,
    pub upper_division: bool,
}

/// How the target GPA relates to the generated grades.
#[derive(Debug, Clone, Serialize)]
pub enum GpaModel {
    /// GPA is whatever the pipeline computes: the mean of generated grades.
    Emergent,
    /// GPA is `intercept + sum(weight * grade) + noise`, realized through
    /// filler courses so the grade mean equals the planted value.
    Planted {
        intercept: f64,
        weights: BTreeMap<CourseKey, f64>,
        /// Standard deviation of the target noise (truncated at 3 sigma).
        gpa_noise_sd: f64,
        /// Number of equal-grade filler courses appended per student.
        filler_courses: usize,
    },
}

/// Full description of a synthetic dataset.
#[derive(Debug, Clone, Serialize)]
pub struct SynthSpec {
    pub n_students: usize,
    pub courses: Vec<SynthCourse>,
    /// Standard deviation of the per-course noise component.
    pub noise_sd: f64,
    pub ability_mean: f64,
    pub ability_sd: f64,
    pub gpa_model: GpaModel,
    pub major_code: String,
    pub admit_class: Classification,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_students: 400,
            courses: Vec::new(),
            noise_sd: 0.6,
            ability_mean: 2.9,
            ability_sd: 0.9,
            gpa_model: GpaModel::Emergent,
            major_code: "0180".into(),
            admit_class: Classification::Freshman,
            seed: 42,
        }
    }
}

/// Ground truth accompanying a generated dataset.
#[derive(Debug, Clone, Serialize)]
pub struct SynthTruth {
    /// Signal strength per course.
    pub signals: BTreeMap<CourseKey, f64>,
    /// Expected rho_h ranking: descending signal, ties by key.
    pub rho_h_order: Vec<CourseKey>,
    /// Latent ability per student id.
    pub abilities: Vec<(String, f64)>,
    /// The planted linear model, when one was used.
    pub planted: Option<PlantedTruth>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlantedTruth {
    pub intercept: f64,
    pub weights: BTreeMap<CourseKey, f64>,
}

const FILLER_SUBJECT: &str = "MATH";

fn filler_key(i: usize) -> CourseKey {
    CourseKey::new(FILLER_SUBJECT, format!("F{:02}", i + 1))
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_students == 0 {
            return Err(Error::InvalidParameter("n_students must be >= 1".into()));
        }
        if self.courses.is_empty() {
            return Err(Error::InvalidParameter("no courses configured".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &self.courses {
            if !(0.0..=1.0).contains(&c.signal) {
                return Err(Error::InvalidParameter(format!(
                    "signal for {} must lie in [0, 1]",
                    c.course
                )));
            }
            if !(c.take_probability > 0.0 && c.take_probability <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "take_probability for {} must lie in (0, 1]",
                    c.course
                )));
            }
            if !seen.insert(c.course.clone()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate course {}",
                    c.course
                )));
            }
        }
        if self.noise_sd < 0.0 || self.ability_sd < 0.0 {
            return Err(Error::InvalidParameter(
                "standard deviations must be nonnegative".into(),
            ));
        }
        if let GpaModel::Planted {
            intercept,
            weights,
            gpa_noise_sd,
            filler_courses,
        } = &self.gpa_model
        {
            if *filler_courses == 0 {
                return Err(Error::InvalidParameter(
                    "planted model needs at least one filler course".into(),
                ));
            }
            if *gpa_noise_sd < 0.0 {
                return Err(Error::InvalidParameter(
                    "gpa_noise_sd must be nonnegative".into(),
                ));
            }
            for course in weights.keys() {
                if !self.courses.iter().any(|c| &c.course == course) {
                    return Err(Error::InvalidParameter(format!(
                        "planted weight references unknown course {course}"
                    )));
                }
            }
            if self.courses.iter().any(|c| c.take_probability < 1.0) {
                return Err(Error::InvalidParameter(
                    "planted model requires take_probability = 1 so every \
                     student has all model grades"
                        .into(),
                ));
            }
            // Feasibility: the filler grade
            //   f = ((m + k) y - sum(grades)) / k
            // must stay on the grade scale for every reachable y.
            let m = self.courses.len() as f64;
            let k = *filler_courses as f64;
            let mut min_f = (m + k) * (intercept - 3.0 * gpa_noise_sd) / k;
            let mut max_f = (m + k) * (intercept + 3.0 * gpa_noise_sd) / k;
            for c in &self.courses {
                let w = weights.get(&c.course).copied().unwrap_or(0.0);
                let slope = ((m + k) * w - 1.0) / k;
                if slope >= 0.0 {
                    max_f += slope * GRADE_MAX;
                } else {
                    min_f += slope * GRADE_MAX;
                }
            }
            if min_f < GRADE_MIN || max_f > GRADE_MAX {
                return Err(Error::InvalidParameter(format!(
                    "planted model infeasible: filler grades could reach \
                     [{min_f:.2}, {max_f:.2}], outside the grade scale"
                )));
            }
        }
        Ok(())
    }

    /// Catalog covering every generated course (fillers included). Use
    /// this with `build_cohort` so filler records resolve.
    pub fn catalog(&self) -> CourseCatalog {
        let mut catalog = self.curriculum_catalog();
        if let GpaModel::Planted { filler_courses, .. } = &self.gpa_model {
            for i in 0..*filler_courses {
                catalog
                    .add_course(
                        filler_key(i),
                        CatalogEntry {
                            display_name: format!("Filler {}", i + 1),
                            upper_division: false,
                            core: false,
                            required_for: BTreeSet::new(),
                        },
                    )
                    .expect("filler keys distinct");
            }
        }
        catalog
    }

    /// Catalog of the curriculum courses only, without planted-mode
    /// fillers. Use this as the candidate-course universe for a design
    /// matrix when the fillers should not be predictors.
    pub fn curriculum_catalog(&self) -> CourseCatalog {
        let mut catalog = CourseCatalog::new();
        catalog.add_major(self.major_code.clone(), "Synthetic Major".to_string());
        for c in &self.courses {
            catalog
                .add_course(
                    c.course.clone(),
                    CatalogEntry {
                        display_name: c.course.to_string(),
                        upper_division: c.upper_division,
                        core: false,
                        required_for: BTreeSet::new(),
                    },
                )
                .expect("courses validated distinct");
        }
        catalog
    }

    /// A cohort spec that admits every generated student.
    pub fn cohort_spec(&self) -> CohortSpec {
        CohortSpec {
            majors: [self.major_code.clone()].into(),
            admit_class_filter: Some(self.admit_class),
            min_math_courses: 1,
            min_upper_division: 0,
            subjects_counted: self
                .courses
                .iter()
                .map(|c| c.course.subject().to_string())
                .chain([FILLER_SUBJECT.to_string()])
                .collect(),
        }
    }
}

// Term code for the j-th course slot: three quarters per year from 05W.
fn term_for_slot(j: usize) -> String {
    let year = 5 + j / 3;
    let season = ["W", "S", "F"][j % 3];
    format!("{year:02}{season}")
}

/// Generates a dataset. Same spec (seed included) yields byte-identical
/// records.
pub fn generate(spec: &SynthSpec) -> Result<(Vec<GradeRecord>, SynthTruth)> {
    spec.validate()?;

    let mut records = Vec::new();
    let mut abilities = Vec::with_capacity(spec.n_students);
    let ability_dist = Normal::new(spec.ability_mean, spec.ability_sd.max(f64::MIN_POSITIVE))
        .expect("validated sd");
    let noise_dist = Normal::new(spec.ability_mean, spec.noise_sd.max(f64::MIN_POSITIVE))
        .expect("validated sd");

    for i in 0..spec.n_students {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(i as u64);
        let student_id = format!("S{:05}", i + 1);
        let ability = ability_dist.sample(&mut rng);
        abilities.push((student_id.clone(), ability));

        let mut push = |course: &CourseKey, slot: usize, grade: f64| {
            records.push(GradeRecord {
                student_id: student_id.clone(),
                term: term_for_slot(slot),
                major_code: spec.major_code.clone(),
                classification: Classification::Senior,
                admit_class: spec.admit_class,
                subject: course.subject().to_string(),
                course: course.code().to_string(),
                grade,
            });
        };

        let mut taken: Vec<(usize, f64)> = Vec::new();
        for (slot, course) in spec.courses.iter().enumerate() {
            // Draw both values unconditionally so the stream stays aligned
            // regardless of take_probability.
            let coin: f64 = rng.random_range(0.0..1.0);
            let noise = noise_dist.sample(&mut rng);
            if coin < course.take_probability {
                let raw = course.signal * ability + (1.0 - course.signal) * noise;
                let grade = quantize_grade(raw);
                push(&course.course, slot, grade);
                taken.push((slot, grade));
            }
        }

        if let GpaModel::Planted {
            intercept,
            weights,
            gpa_noise_sd,
            filler_courses,
        } = &spec.gpa_model
        {
            let noise = if *gpa_noise_sd > 0.0 {
                Normal::new(0.0, *gpa_noise_sd)
                    .expect("validated sd")
                    .sample(&mut rng)
                    .clamp(-3.0 * gpa_noise_sd, 3.0 * gpa_noise_sd)
            } else {
                0.0
            };
            // take_probability = 1 is validated for planted mode, so the
            // taken list aligns with the course list.
            debug_assert_eq!(taken.len(), spec.courses.len());
            let mut target = intercept + noise;
            let mut grade_sum = 0.0;
            for ((_, grade), course) in taken.iter().zip(&spec.courses) {
                target += weights.get(&course.course).copied().unwrap_or(0.0) * grade;
                grade_sum += grade;
            }
            let m = taken.len() as f64;
            let k = *filler_courses as f64;
            let filler_grade = ((m + k) * target - grade_sum) / k;
            assert!(
                (GRADE_MIN..=GRADE_MAX).contains(&filler_grade),
                "feasibility was validated"
            );
            for f in 0..*filler_courses {
                push(&filler_key(f), spec.courses.len() + f, filler_grade);
            }
        }
    }

    let signals: BTreeMap<CourseKey, f64> = spec
        .courses
        .iter()
        .map(|c| (c.course.clone(), c.signal))
        .collect();
    let mut rho_h_order: Vec<CourseKey> = signals.keys().cloned().collect();
    rho_h_order.sort_by(|a, b| {
        signals[b]
            .partial_cmp(&signals[a])
            .expect("finite signals")
            .then_with(|| a.cmp(b))
    });
    let planted = match &spec.gpa_model {
        GpaModel::Emergent => None,
        GpaModel::Planted {
            intercept, weights, ..
        } => Some(PlantedTruth {
            intercept: *intercept,
            weights: weights.clone(),
        }),
    };

    Ok((
        records,
        SynthTruth {
            signals,
            rho_h_order,
            abilities,
            planted,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohort::build_cohort;
    use crate::catalog::TermRule;
    use crate::records::{parse_records, write_records, Format};

    fn course(code: &str, signal: f64, take: f64) -> SynthCourse {
        SynthCourse {
            course: CourseKey::new("MATH", code),
            signal,
            take_probability: take,
            upper_division: true,
        }
    }

    fn basic_spec() -> SynthSpec {
        SynthSpec {
            n_students: 200,
            courses: vec![
                course("101", 0.9, 1.0),
                course("102", 0.5, 0.8),
                course("103", 0.1, 0.9),
            ],
            seed: 7,
            ..SynthSpec::default()
        }
    }

    #[test]
    fn quantize_snaps_to_scale() {
        assert_eq!(quantize_grade(4.9), 4.3);
        assert_eq!(quantize_grade(-1.0), 0.0);
        assert_eq!(quantize_grade(3.65), 3.7);
        assert_eq!(quantize_grade(0.2), 0.0);
        for &step in &GRADE_STEPS {
            assert_eq!(quantize_grade(step), step);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = basic_spec();
        let (a, _) = generate(&spec).unwrap();
        let (b, _) = generate(&spec).unwrap();
        assert_eq!(a, b);

        let other = SynthSpec { seed: 8, ..spec };
        let (c, _) = generate(&other).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn records_round_trip_and_validate() {
        let (records, _) = generate(&basic_spec()).unwrap();
        assert!(!records.is_empty());
        let mut bytes = Vec::new();
        write_records(&mut bytes, &records).unwrap();
        let reparsed = parse_records(bytes.as_slice(), Format::Csv).unwrap();
        assert_eq!(reparsed, records);
    }

    #[test]
    fn noiseless_full_signal_grades_are_monotone_in_ability() {
        let spec = SynthSpec {
            n_students: 120,
            noise_sd: 0.0,
            courses: vec![course("101", 1.0, 1.0), course("102", 1.0, 1.0)],
            ..SynthSpec::default()
        };
        let (records, truth) = generate(&spec).unwrap();
        let catalog = spec.catalog();
        let cohort = build_cohort(&records, &spec.cohort_spec(), &catalog, &TermRule::default())
            .unwrap();

        // grade of every course is a monotone function of ability
        let ability: BTreeMap<&str, f64> = truth
            .abilities
            .iter()
            .map(|(id, a)| (id.as_str(), *a))
            .collect();
        let mut pairs: Vec<(f64, f64)> = cohort
            .students()
            .iter()
            .map(|s| {
                (
                    ability[s.student_id.as_str()],
                    s.grades[&CourseKey::new("MATH", "101")],
                )
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in pairs.windows(2) {
            assert!(w[1].1 >= w[0].1, "grade dropped as ability rose");
        }
    }

    #[test]
    fn full_take_probability_fills_every_cell() {
        let spec = SynthSpec {
            n_students: 50,
            courses: vec![course("101", 0.7, 1.0), course("102", 0.3, 1.0)],
            ..SynthSpec::default()
        };
        let (records, _) = generate(&spec).unwrap();
        assert_eq!(records.len(), 50 * 2);
    }

    #[test]
    fn courses_per_student_tracks_take_probabilities() {
        let spec = SynthSpec {
            n_students: 2000,
            courses: vec![
                course("101", 0.5, 0.9),
                course("102", 0.5, 0.6),
                course("103", 0.5, 0.3),
            ],
            ..SynthSpec::default()
        };
        let (records, _) = generate(&spec).unwrap();
        let expected_mean = 0.9 + 0.6 + 0.3;
        let variance = 0.9f64 * 0.1 + 0.6 * 0.4 + 0.3 * 0.7;
        let se = (variance / 2000.0).sqrt();
        let mean = records.len() as f64 / 2000.0;
        assert!(
            (mean - expected_mean).abs() < 3.0 * se,
            "mean courses {mean} vs expected {expected_mean} (se {se})"
        );
    }

    #[test]
    fn planted_gpa_survives_the_pipeline() {
        let weights: BTreeMap<CourseKey, f64> = [
            (CourseKey::new("MATH", "201"), 0.3),
            (CourseKey::new("MATH", "202"), 0.25),
            (CourseKey::new("MATH", "203"), 0.2),
        ]
        .into();
        let spec = SynthSpec {
            n_students: 100,
            courses: vec![
                course("201", 0.6, 1.0),
                course("202", 0.6, 1.0),
                course("203", 0.6, 1.0),
            ],
            gpa_model: GpaModel::Planted {
                intercept: 0.7,
                weights: weights.clone(),
                gpa_noise_sd: 0.1,
                filler_courses: 9,
            },
            seed: 11,
            ..SynthSpec::default()
        };
        let (records, _) = generate(&spec).unwrap();
        let catalog = spec.catalog();
        let cohort =
            build_cohort(&records, &spec.cohort_spec(), &catalog, &TermRule::default()).unwrap();
        assert_eq!(cohort.len(), 100);
        for s in cohort.students() {
            let lin: f64 = 0.7
                + weights
                    .iter()
                    .map(|(c, w)| w * s.grades[c])
                    .sum::<f64>();
            // GPA = planted linear value + truncated noise
            assert!(
                (s.overall_gpa - lin).abs() <= 0.3 + 1e-9,
                "gpa {} too far from linear value {lin}",
                s.overall_gpa
            );
        }
    }

    #[test]
    fn infeasible_planted_spec_rejected() {
        let spec = SynthSpec {
            n_students: 10,
            courses: vec![course("201", 0.5, 1.0)],
            gpa_model: GpaModel::Planted {
                intercept: 4.0,
                weights: [(CourseKey::new("MATH", "201"), 1.0)].into(),
                gpa_noise_sd: 0.5,
                filler_courses: 1,
            },
            ..SynthSpec::default()
        };
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = basic_spec();
        spec.courses[0].take_probability = 0.0;
        assert!(generate(&spec).is_err());

        let mut spec = basic_spec();
        spec.courses[1].signal = 1.5;
        assert!(generate(&spec).is_err());

        let mut spec = basic_spec();
        spec.courses
            .push(course("101", 0.5, 1.0));
        assert!(generate(&spec).is_err());

        let spec = SynthSpec {
            n_students: 0,
            ..basic_spec()
        };
        assert!(generate(&spec).is_err());
    }
}
