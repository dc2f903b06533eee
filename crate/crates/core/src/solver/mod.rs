//! Strang split-step integration of the Itô equation (physical frame) and
//! of the random NLS (rescaled frame), with outcome classification.

mod config;
mod integrate;
mod outcome;
mod profiles;
mod steps;

pub use config::{BlowupThresholds, SolverConfig};
pub use integrate::{
    integrate, integrate_with_coefficient, Diagnostics, Snapshot, TrajectoryRecord, Trigger, TriggerKind,
};
pub use outcome::{classify_outcome, relative_scattering_residual, scattering_residual, Outcome};
pub use profiles::{gaussian, ground_state, ground_state_residual, ground_state_value};
pub use steps::{apply_nonlinear_phase, modulus_pow, noise_multiplier, noise_multiplier_step, nonlinear_phase_step};

use crate::noise::NoiseError;
use crate::spectral::{Frame, SpectralError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("initial field is in the {found:?} frame, config expects {expected:?}")]
    FrameMismatch { expected: Frame, found: Frame },
    #[error("path horizon {horizon} is shorter than t_end {t_end}")]
    PathTooShort { horizon: f64, t_end: f64 },
    #[error("step {dt} is not a multiple of the path mesh {path_dt}")]
    PathMesh { dt: f64, path_dt: f64 },
    #[error("no full snapshot recorded at t = {0}")]
    MissingSnapshot(f64),
    #[error("trajectory carries no Brownian path")]
    MissingPath,
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
