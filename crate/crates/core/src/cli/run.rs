use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::Config;
use super::study::{run_study, StudyOutcome};
use super::sweep::{sweep, sweep_csv};
use super::CliError;
use crate::diagnostics::Verdict;
use crate::fields::write_field;
use crate::nlsolve::write_series_csv;
use crate::parallel::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Exit 0 only for a confirmed verdict.
    #[default]
    Verify,
    /// Exit 0 whenever the pipeline completes.
    Explore,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "verify" => Ok(Mode::Verify),
            "explore" => Ok(Mode::Explore),
            other => Err(format!("unknown mode {other:?}, expected verify or explore")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: String,
    pub config_sha256: String,
    pub files: Vec<ManifestEntry>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub exit_code: i32,
    pub verdict: Option<Verdict>,
    pub messages: Vec<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn write(out: &Path, rel: &str, bytes: &[u8], files: &mut Vec<String>) -> Result<(), CliError> {
    let path = out.join(rel);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    std::fs::write(&path, bytes).map_err(io_err(&path))?;
    files.push(rel.to_string());
    Ok(())
}

fn write_manifest(out: &Path, config_text: &str, mut files: Vec<String>) -> Result<(), CliError> {
    files.sort();
    files.dedup();
    let entries = files
        .iter()
        .map(|rel| {
            let path = out.join(rel);
            let bytes = std::fs::read(&path).map_err(io_err(&path))?;
            Ok(ManifestEntry { path: rel.clone(), sha256: sha256_hex(&bytes), bytes: bytes.len() as u64 })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let manifest = Manifest {
        schema_version: super::SCHEMA_VERSION,
        tool: format!("dbu {}", env!("CARGO_PKG_VERSION")),
        config_sha256: sha256_hex(config_text.as_bytes()),
        files: entries,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    let path = out.join("manifest.json");
    std::fs::write(&path, text).map_err(io_err(&path))
}

fn write_outcome(out: &Path, outcome: &StudyOutcome, files: &mut Vec<String>) -> Result<(), CliError> {
    write(out, "report.json", outcome.report.to_json().as_bytes(), files)?;
    if let Some(alpha) = &outcome.alpha {
        let mut text = serde_json::to_string_pretty(alpha).expect("alpha serializes");
        text.push('\n');
        write(out, "alpha.json", text.as_bytes(), files)?;
    }
    if outcome.levels.is_empty() {
        return Ok(());
    }
    let mut table = String::from("points_per_axis,linear_peak,spectral_peak,duhamel_max,far_max\n");
    for r in &outcome.report.refinement_table {
        let _ = writeln!(
            table,
            "{},{:.12e},{:.12e},{:.12e},{:.12e}",
            r.points_per_axis, r.linear_peak, r.spectral_peak, r.duhamel_max, r.far_max
        );
    }
    write(out, "refinement.csv", table.as_bytes(), files)?;
    let mut fit = String::from("r,abs_u\n");
    for (r, v) in &outcome.exponent_samples {
        let _ = writeln!(fit, "{r:.12e},{v:.12e}");
    }
    write(out, "exponent_fit.csv", fit.as_bytes(), files)?;
    let hash = &outcome.report.scenario_hash;
    let t_star = outcome.scenario.t_star;
    for level in &outcome.levels {
        let n = level.grid.n();
        let rel = format!("series_N{n}.csv");
        write_series_csv(&level.trace, &out.join(&rel))?;
        files.push(rel);
        let field = level.trace.snapshot_at(t_star).unwrap_or(level.trace.final_state());
        let time = if level.trace.snapshot_at(t_star).is_some() { t_star } else { level.trace.snapshots.last().map_or(0.0, |s| s.time) };
        let base = format!("fields/u_tstar_N{n}");
        std::fs::create_dir_all(out.join("fields")).map_err(io_err(out))?;
        write_field(&out.join(&base), field, time, hash)?;
        files.push(format!("{base}.bin"));
        files.push(format!("{base}.json"));
    }
    Ok(())
}

/// Executes one configured study and writes its artifacts under `out`.
pub fn run(config_path: &Path, out: &Path, mode: Mode, threads: Option<usize>) -> Result<RunSummary, CliError> {
    let text = std::fs::read_to_string(config_path).map_err(io_err(config_path))?;
    let config = Config::from_json(&text)?;
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let outcome = parallel::with_threads(threads, || run_study(&config, Execution::Parallel))?;
    let mut files = Vec::new();
    write_outcome(out, &outcome, &mut files)?;
    write_manifest(out, &text, files)?;

    let report = &outcome.report;
    let mut messages = Vec::new();
    let exit_code = if !report.feasible {
        messages.push("scenario is infeasible:".to_string());
        messages.extend(report.feasibility_reasons.iter().map(|r| format!("  {r}")));
        2
    } else {
        messages.push(format!("verdict: {}", report.verdict));
        for c in &report.criteria {
            messages.push(format!("  {} {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail));
        }
        match (mode, report.verdict) {
            (Mode::Explore, _) | (Mode::Verify, Verdict::Confirmed) => 0,
            (Mode::Verify, _) if !report.numerics_converged => 3,
            (Mode::Verify, _) => 4,
        }
    };
    Ok(RunSummary { exit_code, verdict: Some(report.verdict), messages })
}

/// Writes the feasibility map of the config's sweep block.
pub fn run_sweep(config_path: &Path, out: &Path, threads: Option<usize>) -> Result<RunSummary, CliError> {
    let text = std::fs::read_to_string(config_path).map_err(io_err(config_path))?;
    let config = Config::from_json(&text)?;
    let block = config.sweep.clone().ok_or_else(|| CliError::Config("config has no sweep block".into()))?;
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let cells = parallel::with_threads(threads, || sweep(&config, &block, Execution::Parallel))?;
    let mut files = Vec::new();
    write(out, "sweep.csv", sweep_csv(&cells).as_bytes(), &mut files)?;
    write_manifest(out, &text, files)?;
    let feasible = cells.iter().filter(|c| c.feasible).count();
    Ok(RunSummary {
        exit_code: 0,
        verdict: None,
        messages: vec![format!("{feasible} of {} cells feasible", cells.len())],
    })
}

