//! CLI behavior: golden report outputs, exit codes, stage gating.
//!
//! Regenerate the golden tree after an intentional output change with
//! `UPDATE_GOLDEN=1 cargo test --test cli`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_corecourse")
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/report")
}

fn run(args: &[&std::ffi::OsStr]) -> Output {
    Command::new(exe()).args(args).output().expect("spawn corecourse")
}

fn run_report(out: &Path, extra: &[&str]) -> Output {
    let config = data_dir().join("config.toml");
    let data = data_dir().join("data.csv");
    let mut args: Vec<&std::ffi::OsStr> = Vec::new();
    let subcommand = extra.first().copied().unwrap_or("report");
    args.push(subcommand.as_ref());
    args.push("--config".as_ref());
    args.push(config.as_os_str());
    args.push("--data".as_ref());
    args.push(data.as_os_str());
    args.push("--out".as_ref());
    args.push(out.as_os_str());
    for e in &extra[1.min(extra.len())..] {
        args.push(e.as_ref());
    }
    run(&args)
}

fn collect_files(root: &Path) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(
                    path.strip_prefix(root)
                        .unwrap()
                        .to_string_lossy()
                        .into_owned(),
                );
            }
        }
    }
    out.sort();
    out
}

#[test]
fn report_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report");
    let result = run_report(&out, &[]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );

    if std::env::var("UPDATE_GOLDEN").is_ok() {
        let golden = golden_dir();
        if golden.exists() {
            std::fs::remove_dir_all(&golden).unwrap();
        }
        std::fs::create_dir_all(golden.parent().unwrap()).unwrap();
        copy_tree(&out, &golden);
        eprintln!("golden files updated");
        return;
    }

    let got = collect_files(&out);
    let want = collect_files(&golden_dir());
    assert_eq!(got, want, "file sets differ from golden");
    for rel in &want {
        let actual = std::fs::read(out.join(rel)).unwrap();
        let expected = std::fs::read(golden_dir().join(rel)).unwrap();
        assert_eq!(actual, expected, "golden mismatch in {rel}");
    }
}

fn copy_tree(from: &Path, to: &Path) {
    for rel in collect_files(from) {
        let target = to.join(&rel);
        std::fs::create_dir_all(target.parent().unwrap()).unwrap();
        std::fs::copy(from.join(&rel), target).unwrap();
    }
}

#[test]
fn correlate_stage_writes_only_correlation_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corr");
    let result = run_report(&out, &["correlate"]);
    assert!(result.status.success());
    let files = collect_files(&out);
    assert!(files.iter().any(|f| f.ends_with("correlation.csv")));
    assert!(files.iter().any(|f| f.ends_with("diagnostics.json")));
    assert!(
        files.iter().all(|f| !f.contains("lasso") && !f.contains("ridge")),
        "unexpected files: {files:?}"
    );
}

#[test]
fn format_flag_limits_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("csv-only");
    let result = run_report(&out, &["report", "--format", "csv"]);
    assert!(result.status.success());
    let files = collect_files(&out);
    assert!(!files.is_empty());
    assert!(
        files.iter().all(|f| f.ends_with(".csv")),
        "non-csv files in {files:?}"
    );
}

#[test]
fn missing_data_file_exits_3_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let config = data_dir().join("config.toml");
    let result = Command::new(exe())
        .args(["report", "--config"])
        .arg(&config)
        .args(["--data", "/nonexistent/grades.csv", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("/nonexistent/grades.csv"), "{stderr}");
    assert!(!out.exists(), "no output directory should be created");
}

#[test]
fn unknown_cohort_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let result = run_report(&out, &["report", "--cohort", "nonexistent"]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("nonexistent"), "{stderr}");
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "this is not toml [[").unwrap();
    let out = dir.path().join("out");
    let result = Command::new(exe())
        .args(["report", "--config"])
        .arg(&config)
        .arg("--data")
        .arg(data_dir().join("data.csv"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn malformed_data_exits_3_with_row_number() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    std::fs::write(
        &data,
        "ID,Term,Major Code,Classification,Admit Class,Subject,Course,Grade\n\
         1,05F,0180,USR,UFR,MATH,115A,4.4\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let result = Command::new(exe())
        .arg("report")
        .arg("--config")
        .arg(data_dir().join("config.toml"))
        .arg("--data")
        .arg(&data)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("grade out of range at row 2"), "{stderr}");
}

#[test]
fn strict_mode_turns_non_convergence_into_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let config_text = std::fs::read_to_string(data_dir().join("config.toml"))
        .unwrap()
        .replace("max_iter = 10000", "max_iter = 1")
        .replace("tol = 1e-7", "tol = 1e-18");
    let config = dir.path().join("impatient.toml");
    std::fs::write(&config, config_text).unwrap();
    let out = dir.path().join("out");

    let base = |strict: bool| {
        let mut cmd = Command::new(exe());
        cmd.arg("lasso")
            .arg("--config")
            .arg(&config)
            .arg("--data")
            .arg(data_dir().join("data.csv"))
            .arg("--out")
            .arg(&out);
        if strict {
            cmd.arg("--strict");
        }
        cmd.output().unwrap()
    };

    let lenient = base(false);
    assert!(lenient.status.success(), "non-strict run should succeed");
    let strict = base(true);
    assert_eq!(strict.status.code(), Some(4));
}

#[test]
fn synth_is_seed_deterministic_and_seed_sensitive() {
    let dir = tempfile::tempdir().unwrap();
    let config = data_dir().join("config.toml");
    let gen = |out: &Path, seed: Option<&str>| {
        let mut cmd = Command::new(exe());
        cmd.arg("synth")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(out);
        if let Some(s) = seed {
            cmd.args(["--seed", s]);
        }
        let result = cmd.output().unwrap();
        assert!(result.status.success());
        std::fs::read(out.join("data.csv")).unwrap()
    };
    let a = gen(&dir.path().join("a"), None);
    let b = gen(&dir.path().join("b"), None);
    assert_eq!(a, b, "same config must generate identical data");

    // the bundled dataset is exactly the default-seed output
    let bundled = std::fs::read(data_dir().join("data.csv")).unwrap();
    assert_eq!(a, bundled, "bundled data.csv drifted from the generator");

    let c = gen(&dir.path().join("c"), Some("43"));
    assert_ne!(a, c, "different seed must change the data");
}

#[test]
fn config_falls_back_to_environment_variable() {
    let result = Command::new(exe())
        .arg("validate")
        .env("CORECOURSE_CONFIG", data_dir().join("config.toml"))
        .arg("--data")
        .arg(data_dir().join("data.csv"))
        .output()
        .unwrap();
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
}

#[test]
fn validate_reports_counts() {
    let result = Command::new(exe())
        .arg("validate")
        .arg("--config")
        .arg(data_dir().join("config.toml"))
        .arg("--data")
        .arg(data_dir().join("data.csv"))
        .output()
        .unwrap();
    assert!(result.status.success());
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("3381 records"), "{stdout}");
    assert!(stdout.contains("pure-freshmen"), "{stdout}");
}
