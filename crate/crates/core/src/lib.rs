//! Numerical laboratory for the nonlinear Schrödinger equation driven by
//! multiplicative (Itô) noise.
//!
//! Modules, lowest layer first:
//!
//! * [`spectral`]: periodic grids, exact free propagator, norms.
//! * [`noise`]: noise coefficients, Brownian paths, `h_c`, rescaling, exceedance probabilities.
//! * [`solver`]: Strang split-step integration in both frames.
//! * [`picard`]: Duhamel maps, smallness budgets, contraction probes.
//! * [`experiments`]: Monte Carlo sweeps, audits, run persistence.

pub mod experiments;
pub mod noise;
pub mod picard;
pub mod selftest;
pub mod solver;
pub mod spectral;

pub use num_complex::Complex64;
