//! Helpers shared by the CLI test targets.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use forge_cli::run_cli;

/// Bundled example datasets and their target columns.
pub const DATASETS: [(&str, Option<&str>); 4] = [
    ("planted_interaction", Some("y")),
    ("skewed_classification", Some("label")),
    ("redundant_features", Some("label")),
    ("two_blobs", None),
];

pub fn dataset_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../datasets")
        .join(format!("{name}.csv"))
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub struct CliRun {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command in-process with `forge` prepended to `args`.
pub fn cli(args: &[&str]) -> CliRun {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("forge").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    CliRun {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Standard arguments for a bundled dataset written to `out_dir`.
pub fn dataset_args(name: &str, target: Option<&str>, out_dir: &Path) -> Vec<String> {
    let mut args = vec![
        dataset_path(name).display().to_string(),
        "--seed".into(),
        "7".into(),
        "--out-dir".into(),
        out_dir.display().to_string(),
    ];
    if let Some(t) = target {
        args.push("--target".into());
        args.push(t.into());
    }
    args
}

pub fn cli_owned(args: &[String]) -> CliRun {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    cli(&refs)
}

/// Compares `actual` with the stored golden file, or rewrites the file when
/// UPDATE_GOLDEN is set. Returns a short diff description on mismatch.
pub fn check_golden(file: &str, actual: &str) -> Result<(), String> {
    let path = golden_dir().join(file);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden_dir()).map_err(|e| e.to_string())?;
        std::fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path)
        .map_err(|e| format!("{}: {e} (run with UPDATE_GOLDEN=1 to create)", path.display()))?;
    if expected == actual {
        return Ok(());
    }
    let first = expected
        .lines()
        .zip(actual.lines())
        .position(|(a, b)| a != b)
        .unwrap_or_else(|| expected.lines().count().min(actual.lines().count()));
    Err(format!(
        "{file} differs from golden at line {}: expected {:?}, got {:?}",
        first + 1,
        expected.lines().nth(first),
        actual.lines().nth(first)
    ))
}
