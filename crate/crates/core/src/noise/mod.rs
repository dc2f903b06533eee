//! Noise coefficients, Brownian drivers, the geometric Brownian motion
//! `h_c`, the rescaling transform, and exceedance probabilities.

mod exceedance;
mod model;
mod path;
mod rescale;
pub mod stats;

pub use exceedance::{
    closed_form_exceedance, decay_exceedance_probability, direct_running_sup, lil_statistic,
    monte_carlo_exceedance, reduced_barrier, reduced_running_sup, ReducedMcParams,
};
pub use model::{
    build_noise_model, energy_critical_exponent, mass_critical_exponent, parse_complex, parse_complex_list,
    Criticality, NoiseModel, SOLITON_SIGN,
};
pub use path::{derived_seed, eval_gbm, gbm_at_index, rng_from_seed, sample_path, sample_path_with, BrownianPath};
pub use rescale::{rescale, rescale_factor, RescaleDirection};
pub use stats::{EstimateMethod, ProbabilityEstimate};

use crate::spectral::Frame;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("exponent alpha = {alpha} is neither mass- nor energy-critical in dimension {dim}")]
    ExponentDimensionMismatch { alpha: f64, dim: usize },
    #[error("time {0} is not on the path mesh")]
    OffMesh(f64),
    #[error("frame mismatch: expected {expected:?}, found {found:?}")]
    FrameMismatch { expected: Frame, found: Frame },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
