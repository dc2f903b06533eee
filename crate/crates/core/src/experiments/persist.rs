use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sweep::{config_hash, summarize_trajectories, StrengthSummary, SweepReport, TrajectorySummary};
use super::{ExperimentError, SweepConfig, SCHEMA_VERSION};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRAJECTORIES_FILE: &str = "trajectories.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CURVE_FILE: &str = "curve.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestFiles {
    pub trajectories: String,
    pub summary: String,
    pub curve: String,
}

/// `manifest.json` of a persisted sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub crate_version: String,
    pub config_hash: String,
    pub config: SweepConfig,
    pub n_trajectories: usize,
    pub files: ManifestFiles,
    pub strengths: Vec<StrengthSummary>,
}

fn csv_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes manifest, per-trajectory JSONL, summary CSV and plot CSV into `dir`.
pub fn persist_run(report: &SweepReport, dir: &Path) -> Result<Manifest, ExperimentError> {
    fs::create_dir_all(dir)?;
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        crate_version: report.crate_version.clone(),
        config_hash: report.config_hash.clone(),
        config: report.config.clone(),
        n_trajectories: report.trajectories.len(),
        files: ManifestFiles {
            trajectories: TRAJECTORIES_FILE.into(),
            summary: SUMMARY_FILE.into(),
            curve: CURVE_FILE.into(),
        },
        strengths: report.strengths.clone(),
    };

    let mut w = BufWriter::new(fs::File::create(dir.join(TRAJECTORIES_FILE))?);
    for t in &report.trajectories {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;

    let mut w = BufWriter::new(fs::File::create(dir.join(SUMMARY_FILE))?);
    writeln!(w, "strength,p_hat,ci_lo,ci_hi,n_blowup,n_undecided,n_scattering,n_paths,p_hat_strict,ci_lo_strict,ci_hi_strict,mean_blowup_time")?;
    for s in &report.strengths {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            s.c_norm,
            s.estimate.p_hat,
            s.estimate.ci.0,
            s.estimate.ci.1,
            s.n_blowup,
            s.n_undecided,
            s.n_scattering,
            s.n_paths,
            s.strict_estimate.p_hat,
            s.strict_estimate.ci.0,
            s.strict_estimate.ci.1,
            csv_opt(s.mean_blowup_time),
        )?;
    }
    w.flush()?;

    // Long format: one row per (strength, tolerance) for direct plotting.
    let mut w = BufWriter::new(fs::File::create(dir.join(CURVE_FILE))?);
    writeln!(w, "strength,tolerance,p_hat,err_lo,err_hi")?;
    let tols = [report.config.thresholds.scatter_tol, report.config.thresholds.scatter_tol_strict];
    for s in &report.strengths {
        for (tol, e) in tols.iter().zip([&s.estimate, &s.strict_estimate]) {
            writeln!(w, "{},{},{},{},{}", s.c_norm, tol, e.p_hat, e.p_hat - e.ci.0, e.ci.1 - e.p_hat)?;
        }
    }
    w.flush()?;

    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

fn require(dir: &Path, name: &str) -> Result<std::path::PathBuf, ExperimentError> {
    let p = dir.join(name);
    if !p.is_file() {
        return Err(ExperimentError::CorruptManifest(format!("referenced file {name} is missing")));
    }
    Ok(p)
}

/// Reads a run written by [`persist_run`]. Schema, crate version and config
/// hash must all match, otherwise `VersionMismatch`.
pub fn load_run(dir: &Path) -> Result<SweepReport, ExperimentError> {
    let text = fs::read_to_string(require(dir, MANIFEST_FILE)?)?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| ExperimentError::CorruptManifest(e.to_string()))?;
    if manifest.schema_version != SCHEMA_VERSION {
        return Err(ExperimentError::VersionMismatch(format!(
            "manifest schema {} (supported: {SCHEMA_VERSION})",
            manifest.schema_version
        )));
    }
    let ours = env!("CARGO_PKG_VERSION");
    if manifest.crate_version != ours {
        return Err(ExperimentError::VersionMismatch(format!(
            "written by version {}, this is {ours}",
            manifest.crate_version
        )));
    }
    let hash = config_hash(&manifest.config);
    if hash != manifest.config_hash {
        return Err(ExperimentError::VersionMismatch(format!(
            "config hash {} does not match recorded {}",
            hash, manifest.config_hash
        )));
    }
    require(dir, &manifest.files.summary)?;
    require(dir, &manifest.files.curve)?;
    let reader = BufReader::new(fs::File::open(require(dir, &manifest.files.trajectories)?)?);
    let mut trajectories = Vec::with_capacity(manifest.n_trajectories);
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let t: TrajectorySummary = serde_json::from_str(&line).map_err(|e| {
            ExperimentError::CorruptManifest(format!("{} line {}: {e}", manifest.files.trajectories, lineno + 1))
        })?;
        trajectories.push(t);
    }
    if trajectories.len() != manifest.n_trajectories {
        return Err(ExperimentError::CorruptManifest(format!(
            "expected {} trajectories, found {}",
            manifest.n_trajectories,
            trajectories.len()
        )));
    }
    if summarize_trajectories(&manifest.config, &trajectories) != manifest.strengths {
        return Err(ExperimentError::CorruptManifest(
            "strength summaries disagree with the trajectory file".into(),
        ));
    }
    Ok(SweepReport {
        config: manifest.config,
        config_hash: manifest.config_hash,
        crate_version: manifest.crate_version,
        strengths: manifest.strengths,
        trajectories,
    })
}
