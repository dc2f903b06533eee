//! Executable fixed-point constructions: Duhamel maps, smallness budgets,
//! contraction diagnostics, nonlinearity probes and empirical Strichartz
//! constants.

mod budget;
mod contraction;
mod duhamel;
mod experiment;
mod nonlinearity;
mod sampling;
mod strichartz_const;

pub use budget::{solve_budget, PicardBudget, Regime};
pub use contraction::{
    picard_iterate, picard_solve, relative_sup_l2, split_step_reference, ContractionReport, LipschitzSample,
    PicardOptions,
};
pub use duhamel::{duhamel_map, DuhamelMap};
pub use experiment::{run_picard_experiment, PicardExperiment, PicardReport};
pub use nonlinearity::{
    nonlinearity, pointwise_constant, pointwise_difference_ratio, probe_nonlinearity_estimates, NonlinearityProbeReport,
    NormRatios,
};
pub use sampling::{Packet, PacketSample};
pub use strichartz_const::{estimate_strichartz_constant, strichartz_ratio, STRICHARTZ_TIME_STEP};

use crate::noise::NoiseError;
use crate::solver::SolverError;
use crate::spectral::SpectralError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PicardError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("({q}, {p}) is not Schrödinger admissible in d = {d}")]
    Inadmissible { q: f64, p: f64, d: usize },
    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),
    #[error("Picard iteration diverged at iteration {iteration}")]
    Divergence { iteration: usize, distances: Vec<f64> },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// `(∫ g(t)^q dt)^{1/q}` by the trapezoid rule on `g^q`, or the maximum for `q = ∞`.
pub(crate) fn time_norm(times: &[f64], values: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().copied().fold(0.0, f64::max);
    }
    let mut acc = 0.0;
    for (t, v) in times.windows(2).zip(values.windows(2)) {
        acc += 0.5 * (t[1] - t[0]) * (v[0].powf(q) + v[1].powf(q));
    }
    acc.powf(1.0 / q)
}
