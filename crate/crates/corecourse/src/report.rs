//! Pipeline orchestration and report files.
//!
//! `run_pipeline` ties the stages together per cohort: ingest records,
//! build the cohort, emit the correlation table, fit the lasso and its
//! penalty path, run the ridge third-course sweep, and join everything into
//! a summary table. Every output file is written atomically (temp file plus
//! rename) under `<out>/<cohort>/`. Table files round to two decimals;
//! plot-data and JSON files keep full precision. Given the same config,
//! data, and seed, the output bytes are identical run to run.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::catalog::{CourseCatalog, CourseKey};
use crate::cohort::{build_cohort, Cohort};
use crate::config::ProjectConfig;
use crate::correlation::{correlation_table, CorrelationDiagnostics, CorrelationRow};
use crate::design::build_design;
use crate::error::{Error, Result};
use crate::lasso::{default_alpha_grid, fit_lasso, lasso_path, LassoFit};
use crate::records::{parse_records, Format};
use crate::ridge::{predict, third_course_sweep, RidgeSpec, SweepEntry, SweepOutcome};

/// Pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Correlate,
    Lasso,
    Ridge,
}

/// Report file encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

/// Everything one pipeline run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data_path: PathBuf,
    pub out_dir: PathBuf,
    /// Cohort to run; `None` means every configured cohort.
    pub cohort: Option<String>,
    pub stages: BTreeSet<Stage>,
    pub formats: BTreeSet<OutputFormat>,
    /// Fail (exit code 4) when a lasso fit does not converge.
    pub strict: bool,
    /// CLI overrides; `None` falls back to the config file value.
    pub alpha_lasso: Option<f64>,
    pub alpha_ridge: Option<f64>,
    pub min_n: Option<usize>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn new(data_path: PathBuf, out_dir: PathBuf) -> Self {
        RunConfig {
            data_path,
            out_dir,
            cohort: None,
            stages: [Stage::Correlate, Stage::Lasso, Stage::Ridge].into(),
            formats: [OutputFormat::Csv, OutputFormat::Json, OutputFormat::Text].into(),
            strict: false,
            alpha_lasso: None,
            alpha_ridge: None,
            min_n: None,
            seed: None,
        }
    }
}

/// One row of the per-cohort summary table: a course's rank and value under
/// both the correlation and the regression metric. `None` marks a side the
/// course does not appear on; a zero lasso coefficient gets a value but no
/// rank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub course: CourseKey,
    pub rho_h_rank: Option<usize>,
    pub rho_h: Option<f64>,
    pub beta_rank: Option<usize>,
    pub beta: Option<f64>,
}

/// Joins the correlation table with a lasso fit into summary rows.
///
/// Ranks are recomputed 1-based and dense: correlation rank orders by
/// `rho_h` descending, regression rank orders the nonzero coefficients
/// descending, ties broken by course key. Rows sort by correlation rank,
/// then regression rank, then key; courses missing from one side keep
/// `None` on that side.
pub fn join_summary(corr: &[CorrelationRow], lasso: &LassoFit) -> Vec<SummaryRow> {
    let mut rho_sorted: Vec<(&CourseKey, f64)> =
        corr.iter().map(|r| (&r.course, r.rho_h)).collect();
    rho_sorted.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("rho_h is finite")
            .then_with(|| a.0.cmp(b.0))
    });
    let rho_rank: BTreeMap<&CourseKey, usize> = rho_sorted
        .iter()
        .enumerate()
        .map(|(i, (course, _))| (*course, i + 1))
        .collect();

    let mut beta_sorted: Vec<(&CourseKey, f64)> = lasso
        .coefficients
        .iter()
        .filter(|(_, &b)| b != 0.0)
        .map(|(c, &b)| (c, b))
        .collect();
    beta_sorted.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("coefficients are finite")
            .then_with(|| a.0.cmp(b.0))
    });
    let beta_rank: BTreeMap<&CourseKey, usize> = beta_sorted
        .iter()
        .enumerate()
        .map(|(i, (course, _))| (*course, i + 1))
        .collect();

    let rho_value: BTreeMap<&CourseKey, f64> =
        corr.iter().map(|r| (&r.course, r.rho_h)).collect();

    let courses: BTreeSet<&CourseKey> = corr
        .iter()
        .map(|r| &r.course)
        .chain(lasso.coefficients.keys())
        .collect();

    let mut rows: Vec<SummaryRow> = courses
        .into_iter()
        .map(|course| SummaryRow {
            course: course.clone(),
            rho_h_rank: rho_rank.get(course).copied(),
            rho_h: rho_value.get(course).copied(),
            beta_rank: beta_rank.get(course).copied(),
            beta: lasso.coefficients.get(course).copied(),
        })
        .collect();

    rows.sort_by(|a, b| {
        let rank = |r: Option<usize>| r.unwrap_or(usize::MAX);
        rank(a.rho_h_rank)
            .cmp(&rank(b.rho_h_rank))
            .then_with(|| rank(a.beta_rank).cmp(&rank(b.beta_rank)))
            .then_with(|| a.course.cmp(&b.course))
    });
    rows
}

/// Lasso coefficients in table order: descending value, exact zeros last,
/// ties by course key.
pub fn lasso_table_order(fit: &LassoFit) -> Vec<(CourseKey, f64)> {
    let mut rows: Vec<(CourseKey, f64)> = fit
        .coefficients
        .iter()
        .map(|(c, &b)| (c.clone(), b))
        .collect();
    rows.sort_by(|a, b| {
        let zero_a = a.1 == 0.0;
        let zero_b = b.1 == 0.0;
        zero_a
            .cmp(&zero_b)
            .then_with(|| b.1.partial_cmp(&a.1).expect("finite"))
            .then_with(|| a.0.cmp(&b.0))
    });
    rows
}

/// Picks the ridge sweep candidates from a lasso table: the top three
/// nonzero courses plus the table's last course, skipping the fixed
/// predictors.
pub fn derive_candidates(fit: &LassoFit, fixed: &[CourseKey]) -> Vec<CourseKey> {
    let table = lasso_table_order(fit);
    let mut candidates: Vec<CourseKey> = table
        .iter()
        .filter(|(course, beta)| *beta != 0.0 && !fixed.contains(course))
        .take(3)
        .map(|(course, _)| course.clone())
        .collect();
    if let Some((last, _)) = table
        .iter()
        .rev()
        .find(|(course, _)| !fixed.contains(course) && !candidates.contains(course))
    {
        candidates.push(last.clone());
    }
    candidates
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn to_json_pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable report value");
    bytes.push(b'\n');
    bytes
}

struct CohortOutput<'a> {
    dir: PathBuf,
    formats: &'a BTreeSet<OutputFormat>,
}

impl CohortOutput<'_> {
    fn write(&self, format: OutputFormat, name: &str, bytes: &[u8]) -> Result<()> {
        if self.formats.contains(&format) {
            write_atomic(&self.dir.join(name), bytes)?;
        }
        Ok(())
    }
}

#[derive(Debug, Default, Serialize)]
struct Diagnostics {
    cohort: String,
    students: usize,
    source_records: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    correlation: Option<CorrelationDiagnosticsOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lasso: Option<LassoDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ridge: Option<RidgeDiagnostics>,
}

#[derive(Debug, Serialize)]
struct CorrelationDiagnosticsOut {
    min_sample_size: usize,
    rows: usize,
    omitted: CorrelationDiagnostics,
}

#[derive(Debug, Serialize)]
struct LassoDiagnostics {
    alpha: f64,
    converged: bool,
    iterations: usize,
    sparsity: f64,
    alpha_max: f64,
}

#[derive(Debug, Default, Serialize)]
struct RidgeDiagnostics {
    fixed_courses: Vec<CourseKey>,
    candidates: Vec<CourseKey>,
    skipped: Vec<SkippedCandidate>,
}

#[derive(Debug, Serialize)]
struct SkippedCandidate {
    course: CourseKey,
    reason: String,
}

/// Summary of one `run_pipeline` call.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub cohorts: Vec<String>,
    pub files_written: usize,
}

/// Runs the configured stages for each requested cohort and writes report
/// files under `run.out_dir/<cohort>/`.
pub fn run_pipeline(project: &ProjectConfig, run: &RunConfig) -> Result<RunSummary> {
    let data = fs::read(&run.data_path).map_err(|source| Error::PathIo {
        path: run.data_path.display().to_string(),
        source,
    })?;
    let records = parse_records(data.as_slice(), Format::Csv)?;

    let cohort_names: Vec<String> = match &run.cohort {
        Some(name) => {
            project.cohort(name)?;
            vec![name.clone()]
        }
        None => project.cohorts.keys().cloned().collect(),
    };
    if cohort_names.is_empty() {
        return Err(Error::Config("no cohorts configured".into()));
    }

    let mut files_written = 0;
    for name in &cohort_names {
        let cohort_config = project.cohort(name)?;
        let cohort = build_cohort(&records, &cohort_config.spec, &project.catalog, &project.terms)?;
        if cohort.is_empty() {
            return Err(Error::Config(format!(
                "cohort {name:?} matched no students"
            )));
        }

        let dir = run.out_dir.join(name);
        fs::create_dir_all(&dir)?;
        let out = CohortOutput {
            dir,
            formats: &run.formats,
        };
        files_written += run_cohort(project, run, name, &cohort, &out)?;
    }

    Ok(RunSummary {
        cohorts: cohort_names,
        files_written,
    })
}

fn run_cohort(
    project: &ProjectConfig,
    run: &RunConfig,
    name: &str,
    cohort: &Cohort,
    out: &CohortOutput<'_>,
) -> Result<usize> {
    let catalog = &project.catalog;
    let mut files = 0;
    let mut diagnostics = Diagnostics {
        cohort: name.to_string(),
        students: cohort.len(),
        source_records: cohort.source_records(),
        ..Diagnostics::default()
    };

    let mut corr_rows: Option<Vec<CorrelationRow>> = None;
    if run.stages.contains(&Stage::Correlate) {
        let min_n = run
            .min_n
            .unwrap_or(project.cohort(name)?.min_sample_size);
        let (rows, omitted) = correlation_table(cohort, min_n);

        let mut csv = String::from("Course,p_S,R_sq,p_H,n\n");
        for r in &rows {
            writeln!(
                csv,
                "{},{:.2},{:.2},{:.2},{}",
                r.course, r.rho_s, r.r_sq, r.rho_h, r.n
            )
            .unwrap();
        }
        out.write(OutputFormat::Csv, "correlation.csv", csv.as_bytes())?;

        let mut scatter = String::from("Course,p_S,R_sq,required,core\n");
        for r in &rows {
            let required = catalog.required_for_all_majors(&r.course);
            let core = catalog.get(&r.course).is_some_and(|e| e.core);
            writeln!(
                scatter,
                "{},{:.6},{:.6},{required},{core}",
                r.course, r.rho_s, r.r_sq
            )
            .unwrap();
        }
        out.write(OutputFormat::Csv, "correlation_scatter.csv", scatter.as_bytes())?;
        out.write(OutputFormat::Json, "correlation.json", &to_json_pretty(&rows))?;

        diagnostics.correlation = Some(CorrelationDiagnosticsOut {
            min_sample_size: min_n,
            rows: rows.len(),
            omitted,
        });
        files += count_formats(out, &[OutputFormat::Csv, OutputFormat::Csv, OutputFormat::Json]);
        corr_rows = Some(rows);
    }

    let mut lasso_fit: Option<LassoFit> = None;
    if run.stages.contains(&Stage::Lasso) {
        let design = build_design(cohort, catalog)?;
        let alpha = run.alpha_lasso.unwrap_or(project.lasso.alpha);
        let fit = fit_lasso(&design, alpha, project.lasso.tol, project.lasso.max_iter)?;
        if run.strict && !fit.converged {
            return Err(Error::NotConverged(project.lasso.max_iter));
        }

        let mut csv = String::from("Course,Lasso Coefficient\n");
        for (course, beta) in lasso_table_order(&fit) {
            writeln!(csv, "{course},{beta:.2}").unwrap();
        }
        out.write(OutputFormat::Csv, "lasso.csv", csv.as_bytes())?;
        out.write(OutputFormat::Json, "lasso.json", &to_json_pretty(&fit))?;

        let grid = default_alpha_grid(&design, project.lasso.path_points, project.lasso.path_ratio);
        let path = lasso_path(&design, &grid, project.lasso.tol, project.lasso.max_iter)?;
        let mut path_csv = String::from("alpha,sparsity,objective\n");
        for point in &path {
            writeln!(
                path_csv,
                "{:.6},{:.6},{:.6}",
                point.alpha,
                point.sparsity,
                point.objective(&design)
            )
            .unwrap();
        }
        out.write(OutputFormat::Csv, "lasso_path.csv", path_csv.as_bytes())?;

        diagnostics.lasso = Some(LassoDiagnostics {
            alpha,
            converged: fit.converged,
            iterations: fit.iterations,
            sparsity: fit.sparsity,
            alpha_max: crate::lasso::alpha_max(&design),
        });
        files += count_formats(out, &[OutputFormat::Csv, OutputFormat::Json, OutputFormat::Csv]);
        lasso_fit = Some(fit);
    }

    if run.stages.contains(&Stage::Ridge) {
        let fixed = project.ridge.fixed_courses.clone();
        if fixed.is_empty() {
            return Err(Error::Config(
                "ridge.fixed_courses must be configured to run the ridge stage".into(),
            ));
        }
        let candidates = if !project.ridge.candidates.is_empty() {
            project.ridge.candidates.clone()
        } else if let Some(fit) = &lasso_fit {
            derive_candidates(fit, &fixed)
        } else {
            return Err(Error::Config(
                "no ridge candidates configured and the lasso stage did not run".into(),
            ));
        };
        if candidates.is_empty() {
            return Err(Error::Config("ridge candidate list is empty".into()));
        }

        let base = RidgeSpec {
            fixed_courses: fixed.clone(),
            third_course: candidates[0].clone(),
            alpha: run.alpha_ridge.unwrap_or(project.ridge.alpha),
            splits: project.ridge.splits,
            train_fraction: project.ridge.train_fraction,
            seed: run.seed.unwrap_or(project.seed),
            min_students: project.ridge.min_students,
        };
        let sweep = third_course_sweep(cohort, &base, &candidates);
        files += write_ridge_outputs(cohort, catalog, &sweep, out)?;

        diagnostics.ridge = Some(RidgeDiagnostics {
            fixed_courses: fixed,
            candidates,
            skipped: sweep
                .iter()
                .filter_map(|e| match &e.outcome {
                    SweepOutcome::Skipped { reason } => Some(SkippedCandidate {
                        course: e.course.clone(),
                        reason: reason.clone(),
                    }),
                    SweepOutcome::Fitted(_) => None,
                })
                .collect(),
        });
    }

    if let (Some(corr), Some(fit)) = (&corr_rows, &lasso_fit) {
        let rows = join_summary(corr, fit);
        files += write_summary(&rows, catalog, out)?;
    }

    out.write(OutputFormat::Json, "diagnostics.json", &to_json_pretty(&diagnostics))?;
    files += count_formats(out, &[OutputFormat::Json]);
    Ok(files)
}

fn count_formats(out: &CohortOutput<'_>, wanted: &[OutputFormat]) -> usize {
    wanted.iter().filter(|f| out.formats.contains(f)).count()
}

fn rank_cell(rank: Option<usize>) -> String {
    rank.map_or_else(|| "-".to_string(), |r| r.to_string())
}

fn value_cell(value: Option<f64>) -> String {
    value.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"))
}

fn write_summary(
    rows: &[SummaryRow],
    catalog: &CourseCatalog,
    out: &CohortOutput<'_>,
) -> Result<usize> {
    let mut csv = String::from("Course,p_H Rank,p_H,Beta Rank,Beta\n");
    for r in rows {
        writeln!(
            csv,
            "{},{},{},{},{}",
            r.course,
            rank_cell(r.rho_h_rank),
            value_cell(r.rho_h),
            rank_cell(r.beta_rank),
            value_cell(r.beta)
        )
        .unwrap();
    }
    out.write(OutputFormat::Csv, "summary.csv", csv.as_bytes())?;
    out.write(OutputFormat::Json, "summary.json", &to_json_pretty(&rows))?;

    let mut text = String::new();
    writeln!(
        text,
        "{:<34} {:>9} {:>6} {:>10} {:>6}",
        "Course", "p_H Rank", "p_H", "Beta Rank", "Beta"
    )
    .unwrap();
    for r in rows {
        let label = catalog
            .get(&r.course)
            .map_or_else(|| r.course.to_string(), |e| e.display_name.clone());
        writeln!(
            text,
            "{:<34} {:>9} {:>6} {:>10} {:>6}",
            label,
            rank_cell(r.rho_h_rank),
            value_cell(r.rho_h),
            rank_cell(r.beta_rank),
            value_cell(r.beta)
        )
        .unwrap();
    }
    out.write(OutputFormat::Text, "summary.txt", text.as_bytes())?;
    Ok(count_formats(
        out,
        &[OutputFormat::Csv, OutputFormat::Json, OutputFormat::Text],
    ))
}

/// Renders the averaged model in display form: intercept plus terms sorted
/// by absolute coefficient, descending.
pub fn prediction_function_text(result: &crate::ridge::RidgeResult) -> String {
    let mut terms: Vec<(&CourseKey, f64)> = result
        .averaged_coefficients
        .iter()
        .map(|(c, &b)| (c, b))
        .collect();
    terms.sort_by(|a, b| {
        b.1.abs()
            .partial_cmp(&a.1.abs())
            .expect("finite coefficients")
            .then_with(|| a.0.cmp(b.0))
    });
    let mut text = format!("predicted_gpa = {:.2}", result.averaged_intercept);
    for (course, beta) in terms {
        if beta >= 0.0 {
            write!(text, " + {beta:.2}*grade({course})").unwrap();
        } else {
            write!(text, " - {:.2}*grade({course})", -beta).unwrap();
        }
    }
    text
}

fn write_ridge_outputs(
    cohort: &Cohort,
    catalog: &CourseCatalog,
    sweep: &[SweepEntry],
    out: &CohortOutput<'_>,
) -> Result<usize> {
    let mut files = 0;

    let mut summary_csv = String::from("Course,Mean R_sq,n,Status\n");
    for entry in sweep {
        match &entry.outcome {
            SweepOutcome::Fitted(result) => writeln!(
                summary_csv,
                "{},{:.2},{},ok",
                entry.course, result.mean_rsq, result.n_students
            )
            .unwrap(),
            SweepOutcome::Skipped { .. } => {
                writeln!(summary_csv, "{},-,-,skipped", entry.course).unwrap()
            }
        }
    }
    out.write(OutputFormat::Csv, "ridge_sweep.csv", summary_csv.as_bytes())?;
    out.write(OutputFormat::Json, "ridge_sweep.json", &to_json_pretty(&sweep))?;
    files += count_formats(out, &[OutputFormat::Csv, OutputFormat::Json]);

    for entry in sweep {
        let SweepOutcome::Fitted(result) = &entry.outcome else {
            continue;
        };
        let slug = entry.course.slug();

        let mut splits_csv = String::from("split,r_sq\n");
        for (i, rsq) in result.per_split_rsq.iter().enumerate() {
            writeln!(splits_csv, "{},{:.6}", i + 1, rsq).unwrap();
        }
        out.write(
            OutputFormat::Csv,
            &format!("ridge_{slug}_splits.csv"),
            splits_csv.as_bytes(),
        )?;

        let mut text = prediction_function_text(result);
        let label = catalog
            .get(&entry.course)
            .map_or_else(|| entry.course.to_string(), |e| e.display_name.clone());
        write!(
            text,
            "\nthird course: {label}\nmean out-of-sample R_sq over {} splits: {:.2}\nstudents: {}\n",
            result.per_split_rsq.len(),
            result.mean_rsq,
            result.n_students
        )
        .unwrap();
        out.write(
            OutputFormat::Text,
            &format!("ridge_{slug}_prediction.txt"),
            text.as_bytes(),
        )?;
        out.write(
            OutputFormat::Json,
            &format!("ridge_{slug}_prediction.json"),
            &to_json_pretty(result),
        )?;

        // scatter: mean input grade vs actual vs predicted, per student of
        // the sub-cohort
        let courses: Vec<CourseKey> = result.averaged_coefficients.keys().cloned().collect();
        let mut scatter = String::from("mean_grade,actual_gpa,predicted_gpa\n");
        for student in cohort.students_with_all(&courses) {
            let mean_grade: f64 =
                courses.iter().map(|c| student.grades[c]).sum::<f64>() / courses.len() as f64;
            let prediction = predict(result, &student.grades)?;
            writeln!(
                scatter,
                "{:.6},{:.6},{:.6}",
                mean_grade, student.overall_gpa, prediction.value
            )
            .unwrap();
        }
        out.write(
            OutputFormat::Csv,
            &format!("ridge_{slug}_scatter.csv"),
            scatter.as_bytes(),
        )?;

        files += count_formats(
            out,
            &[
                OutputFormat::Csv,
                OutputFormat::Text,
                OutputFormat::Json,
                OutputFormat::Csv,
            ],
        );
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn key(code: &str) -> CourseKey {
        CourseKey::new("MATH", code)
    }

    fn row(code: &str, rho_h: f64) -> CorrelationRow {
        CorrelationRow {
            course: key(code),
            rho_s: rho_h / 2.0,
            r_sq: rho_h / 2.0,
            rho_h,
            n: 30,
        }
    }

    fn fit_with(coefficients: &[(&str, f64)]) -> LassoFit {
        LassoFit {
            intercept: 1.0,
            coefficients: coefficients
                .iter()
                .map(|(c, b)| (key(c), *b))
                .collect::<BTreeMap<_, _>>(),
            alpha: 0.1,
            iterations: 10,
            converged: true,
            sparsity: 0.0,
        }
    }

    #[test]
    fn top_of_both_metrics_gets_double_rank_one() {
        let corr = vec![row("132", 1.3), row("115A", 1.1), row("131A", 0.9)];
        let fit = fit_with(&[("132", 0.29), ("115A", 0.2), ("131A", 0.0)]);
        let rows = join_summary(&corr, &fit);
        assert_eq!(rows[0].course, key("132"));
        assert_eq!(rows[0].rho_h_rank, Some(1));
        assert_eq!(rows[0].beta_rank, Some(1));
    }

    #[test]
    fn zero_coefficient_gets_rank_sentinel() {
        let corr = vec![row("132", 1.3), row("131A", 0.9)];
        let fit = fit_with(&[("132", 0.29), ("131A", 0.0)]);
        let rows = join_summary(&corr, &fit);
        let zero = rows.iter().find(|r| r.course == key("131A")).unwrap();
        assert_eq!(zero.beta_rank, None);
        assert_eq!(zero.beta, Some(0.0));
        assert_eq!(zero.rho_h_rank, Some(2));
    }

    #[test]
    fn disjoint_inputs_have_one_missing_side_each() {
        let corr = vec![row("A", 1.0)];
        let fit = fit_with(&[("B", 0.5)]);
        let rows = join_summary(&corr, &fit);
        assert_eq!(rows.len(), 2);
        let a = rows.iter().find(|r| r.course == key("A")).unwrap();
        let b = rows.iter().find(|r| r.course == key("B")).unwrap();
        assert!(a.beta.is_none() && a.rho_h.is_some());
        assert!(b.rho_h.is_none() && b.beta.is_some());
    }

    #[test]
    fn summary_ranks_are_dense_permutations() {
        let corr = vec![row("A", 1.2), row("B", 0.8), row("C", 0.4)];
        let fit = fit_with(&[("A", 0.3), ("B", 0.0), ("D", 0.1)]);
        let rows = join_summary(&corr, &fit);
        let mut rho_ranks: Vec<usize> = rows.iter().filter_map(|r| r.rho_h_rank).collect();
        rho_ranks.sort_unstable();
        assert_eq!(rho_ranks, vec![1, 2, 3]);
        let mut beta_ranks: Vec<usize> = rows.iter().filter_map(|r| r.beta_rank).collect();
        beta_ranks.sort_unstable();
        assert_eq!(beta_ranks, vec![1, 2]);
    }

    #[test]
    fn lasso_table_sorts_descending_zeros_last() {
        let fit = fit_with(&[("A", 0.1), ("B", 0.0), ("C", 0.5), ("D", -0.2), ("E", 0.0)]);
        let order: Vec<String> = lasso_table_order(&fit)
            .into_iter()
            .map(|(c, _)| c.code().to_string())
            .collect();
        assert_eq!(order, vec!["C", "A", "D", "B", "E"]);
    }

    #[test]
    fn candidates_are_top_three_plus_last() {
        let fit = fit_with(&[
            ("A", 0.5),
            ("B", 0.4),
            ("C", 0.3),
            ("D", 0.2),
            ("E", 0.0),
            ("F", 0.0),
        ]);
        let candidates = derive_candidates(&fit, &[]);
        assert_eq!(
            candidates,
            vec![key("A"), key("B"), key("C"), key("F")],
            "top three plus the last table row"
        );

        // fixed courses are skipped
        let candidates = derive_candidates(&fit, &[key("A"), key("F")]);
        assert_eq!(candidates, vec![key("B"), key("C"), key("D"), key("E")]);
    }

    #[test]
    fn prediction_function_sorted_by_magnitude() {
        let result = crate::ridge::RidgeResult {
            averaged_intercept: 0.74,
            averaged_coefficients: [
                (key("115A"), 0.27),
                (key("132"), 0.29),
                (key("170A"), 0.18),
            ]
            .into(),
            mean_rsq: 0.87,
            per_split_rsq: vec![0.87],
            n_students: 100,
        };
        assert_eq!(
            prediction_function_text(&result),
            "predicted_gpa = 0.74 + 0.29*grade(MATH 132) + 0.27*grade(MATH 115A) + 0.18*grade(MATH 170A)"
        );
    }
}
