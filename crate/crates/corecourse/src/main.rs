use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use corecourse::config::ProjectConfig;
use corecourse::error::{Error, ErrorKind};
use corecourse::records::{parse_records, Format};
use corecourse::report::{run_pipeline, OutputFormat, RunConfig, Stage};
use corecourse::synth::generate;

/// Identify core courses from student grade records.
#[derive(Parser)]
#[command(name = "corecourse", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the config and data, report counts, write nothing.
    Validate(CommonArgs),
    /// Generate a synthetic dataset from the config's [synth] section.
    Synth {
        #[command(flatten)]
        common: CommonArgs,
        /// Output directory for data.csv and truth.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the per-course correlation table.
    Correlate(StageArgs),
    /// Fit the lasso selection model and its penalty path.
    Lasso(StageArgs),
    /// Run the ridge prediction sweep (needs ridge.candidates in the config).
    Ridge(StageArgs),
    /// Run the full pipeline: correlate, lasso, ridge, summary.
    Report(StageArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML project config. Falls back to $CORECOURSE_CONFIG.
    #[arg(long, env = "CORECOURSE_CONFIG")]
    config: PathBuf,
    /// Path to the grade-record CSV.
    #[arg(long, required = false)]
    data: Option<PathBuf>,
    /// Top-level random seed, overriding the config value.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct StageArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output directory for report files.
    #[arg(long)]
    out: PathBuf,
    /// Cohort name; omit to run every configured cohort.
    #[arg(long)]
    cohort: Option<String>,
    /// Lasso penalty, overriding the config value.
    #[arg(long)]
    alpha_lasso: Option<f64>,
    /// Ridge penalty, overriding the config value.
    #[arg(long)]
    alpha_ridge: Option<f64>,
    /// Minimum takers per course in the correlation table.
    #[arg(long)]
    min_n: Option<usize>,
    /// Output formats to write (repeatable).
    #[arg(long, value_enum)]
    format: Vec<FormatArg>,
    /// Treat solver non-convergence as a fatal error.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Text,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Text => OutputFormat::Text,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (stage, code) = match err.kind() {
                ErrorKind::Config => ("config", 2),
                ErrorKind::Data => ("data", 3),
                ErrorKind::Numerical => ("solver", 4),
            };
            eprintln!("error: {err}");
            eprintln!(
                "{}",
                serde_json::json!({ "stage": stage, "error": err.to_string() })
            );
            ExitCode::from(code)
        }
    }
}

fn require_data(common: &CommonArgs) -> Result<PathBuf, Error> {
    common
        .data
        .clone()
        .ok_or_else(|| Error::Config("--data is required for this subcommand".into()))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Validate(common) => {
            let project = ProjectConfig::from_path(&common.config)?;
            let data_path = require_data(&common)?;
            let bytes = std::fs::read(&data_path).map_err(|source| Error::PathIo {
                path: data_path.display().to_string(),
                source,
            })?;
            let records = parse_records(bytes.as_slice(), Format::Csv)?;
            let students: BTreeSet<&str> =
                records.iter().map(|r| r.student_id.as_str()).collect();
            println!(
                "ok: {} records, {} students, {} catalog courses",
                records.len(),
                students.len(),
                project.catalog.courses().count()
            );
            for (name, cohort_config) in &project.cohorts {
                let cohort = corecourse::cohort::build_cohort(
                    &records,
                    &cohort_config.spec,
                    &project.catalog,
                    &project.terms,
                )?;
                println!("cohort {name}: {} students", cohort.len());
            }
            Ok(())
        }
        Command::Synth { common, out } => {
            let project = ProjectConfig::from_path(&common.config)?;
            let mut spec = project.synth.clone().ok_or_else(|| {
                Error::Config("config has no [synth] section".into())
            })?;
            if let Some(seed) = common.seed {
                spec.seed = seed;
            }
            let (records, truth) = generate(&spec)?;
            std::fs::create_dir_all(&out)?;
            let mut bytes = Vec::new();
            corecourse::records::write_records(&mut bytes, &records)?;
            std::fs::write(out.join("data.csv"), &bytes)?;
            let mut truth_json = serde_json::to_vec_pretty(&truth)
                .expect("truth serializes");
            truth_json.push(b'\n');
            std::fs::write(out.join("truth.json"), truth_json)?;
            println!(
                "wrote {} records for {} students to {}",
                records.len(),
                spec.n_students,
                out.display()
            );
            Ok(())
        }
        Command::Correlate(args) => run_stages(args, [Stage::Correlate].into()),
        Command::Lasso(args) => run_stages(args, [Stage::Lasso].into()),
        Command::Ridge(args) => run_stages(args, [Stage::Ridge].into()),
        Command::Report(args) => {
            run_stages(args, [Stage::Correlate, Stage::Lasso, Stage::Ridge].into())
        }
    }
}

fn run_stages(args: StageArgs, stages: BTreeSet<Stage>) -> Result<(), Error> {
    let project = ProjectConfig::from_path(&args.common.config)?;
    let formats: BTreeSet<OutputFormat> = if args.format.is_empty() {
        [OutputFormat::Csv, OutputFormat::Json, OutputFormat::Text].into()
    } else {
        args.format.iter().map(|f| OutputFormat::from(*f)).collect()
    };
    let run = RunConfig {
        data_path: require_data(&args.common)?,
        out_dir: args.out,
        cohort: args.cohort,
        stages,
        formats,
        strict: args.strict,
        alpha_lasso: args.alpha_lasso,
        alpha_ridge: args.alpha_ridge,
        min_n: args.min_n,
        seed: args.common.seed,
    };
    let summary = run_pipeline(&project, &run)?;
    println!(
        "wrote {} files for {} cohort(s) under {}",
        summary.files_written,
        summary.cohorts.len(),
        run.out_dir.display()
    );
    Ok(())
}
