//! Monte Carlo sweeps over the noise strength, the mass-martingale,
//! frame-equivalence and virial audits, and run persistence.

mod audits;
mod config;
mod persist;
mod sweep;

pub use audits::{
    equivalence_audit, frame_distance, martingale_audit, martingale_audit_with, virial_track, EquivalenceConfig,
    EquivalenceReport, EquivalenceRow, MartingaleAuditConfig, MartingaleCheckpoint, MartingaleReport, VirialSeries,
    BOUNDARY_LAYER, MARTINGALE_IDENTITY_TOL, WRAP_TOL,
};
pub use config::{InitialProfile, SweepConfig, SweepThresholds, SCHEMA_VERSION};
pub use persist::{load_run, persist_run, Manifest, ManifestFiles, CURVE_FILE, MANIFEST_FILE, SUMMARY_FILE, TRAJECTORIES_FILE};
pub use sweep::{
    config_hash, run_sweep, run_trajectory, summarize_trajectories, trajectory_seed, StrengthSummary, SweepReport,
    TrajectorySummary,
};

use crate::noise::NoiseError;
use crate::solver::SolverError;
use crate::spectral::SpectralError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error("corrupt manifest: {0}")]
    CorruptManifest(String),
    #[error("version mismatch: {0}")]
    VersionMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
