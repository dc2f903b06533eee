//! Periodic pseudospectral discretization: grids, the free propagator,
//! spectral derivatives, and Lebesgue/Sobolev/Strichartz norms.

mod field;
mod grid;
mod norms;
mod ops;
mod strichartz;

pub use field::{FieldState, Frame, SNAPSHOT_MAGIC};
pub use grid::{make_grid, GridSpec};
pub use norms::{
    free_propagate, gradient_norm_with, h1_norm_with, lebesgue_norm, lp_norm_moduli, lp_norm_values, mass,
    sobolev_h1_norm, w1p_norm_with,
};
pub use ops::SpectralOps;
pub use strichartz::{
    energy_dual_pair, energy_pair, is_admissible, mass_dual_pair, mass_pair, spacetime_norm, spacetime_norm_with,
    SampledField, StrichartzSpec, TimeSamples,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid dimension {0}: expected 1, 2 or 3")]
    InvalidDimension(usize),
    #[error("invalid resolution {0}: expected a power of two >= 8")]
    InvalidResolution(usize),
    #[error("invalid box length {0}")]
    InvalidLength(f64),
    #[error("invalid Lebesgue exponent {0}")]
    InvalidExponent(f64),
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("value count {found} does not match grid size {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("samples do not cover the requested time interval")]
    IntervalNotCovered,
    #[error("bad snapshot: {0}")]
    BadSnapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
