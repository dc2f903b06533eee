use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::noise::{build_noise_model, NoiseModel, SOLITON_SIGN};
use crate::solver::{gaussian, ground_state, BlowupThresholds, SolverConfig};
use crate::spectral::{make_grid, FieldState, Frame, GridSpec};

/// Version of the sweep config schema and of the run manifest layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Named initial-data recipes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialProfile {
    /// `A exp(-|x|²/(2w²))`
    Gaussian { amplitude: f64, width: f64 },
    /// `factor · Q` with `Q(x) = 3^{1/4} sech^{1/2}(2x)`; one-dimensional only.
    SolitonScaled { factor: f64 },
}

impl InitialProfile {
    pub fn build(&self, grid: GridSpec, frame: Frame) -> Result<FieldState, ExperimentError> {
        match *self {
            InitialProfile::Gaussian { amplitude, width } => {
                if !(width > 0.0) || !amplitude.is_finite() {
                    return Err(ExperimentError::Config(format!(
                        "gaussian needs width > 0 and finite amplitude, got ({amplitude}, {width})"
                    )));
                }
                Ok(gaussian(grid, frame, amplitude, width))
            }
            InitialProfile::SolitonScaled { factor } => {
                if !factor.is_finite() {
                    return Err(ExperimentError::Config(format!("soliton factor {factor} is not finite")));
                }
                Ok(ground_state(grid, frame, factor)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepThresholds {
    pub grad_cap_factor: f64,
    pub amp_cap_factor: f64,
    pub scatter_window: f64,
    /// Loose tolerance; decides the reported outcome.
    pub scatter_tol: f64,
    /// Strict tolerance, reported alongside.
    pub scatter_tol_strict: f64,
}

impl SweepThresholds {
    pub fn loose(&self) -> BlowupThresholds {
        BlowupThresholds {
            grad_cap_factor: self.grad_cap_factor,
            amp_cap_factor: self.amp_cap_factor,
            scatter_window: self.scatter_window,
            scatter_tol: self.scatter_tol,
        }
    }

    pub fn strict(&self) -> BlowupThresholds {
        BlowupThresholds {
            scatter_tol: self.scatter_tol_strict,
            ..self.loose()
        }
    }
}

/// Sweep over noise strengths. Each strength `s` uses the single real mode
/// `φ = (s)`, so `‖c‖ = s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    pub dim: usize,
    pub n: usize,
    pub length: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub dt: f64,
    pub t_end: f64,
    pub frame: Frame,
    pub record_stride: usize,
    pub c_norm_list: Vec<f64>,
    pub n_paths: usize,
    pub base_seed: u64,
    pub initial: InitialProfile,
    pub thresholds: SweepThresholds,
}

impl SweepConfig {
    /// d=1 quintic, soliton sign, data 1.1·Q, strengths {0,1,4,16}.
    pub fn focusing_fixture() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            dim: 1,
            n: 256,
            length: 40.0,
            alpha: 5.0,
            lambda: SOLITON_SIGN,
            dt: 5e-4,
            t_end: 10.0,
            frame: Frame::Rescaled,
            record_stride: 1000,
            c_norm_list: vec![0.0, 1.0, 4.0, 16.0],
            n_paths: 200,
            base_seed: 2024,
            initial: InitialProfile::SolitonScaled { factor: 1.1 },
            thresholds: SweepThresholds {
                grad_cap_factor: 5.0,
                amp_cap_factor: 2.5,
                scatter_window: 5.0,
                scatter_tol: 1e-2,
                scatter_tol_strict: 1e-4,
            },
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ExperimentError> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("sweep config serializes")
    }

    pub fn grid(&self) -> Result<GridSpec, ExperimentError> {
        Ok(make_grid(self.dim, self.n, self.length)?)
    }

    pub fn model(&self, strength: f64) -> Result<NoiseModel, ExperimentError> {
        Ok(build_noise_model(
            vec![num_complex::Complex64::new(strength, 0.0)],
            self.alpha,
            self.lambda,
            self.dim,
        )?)
    }

    pub fn solver_config(&self, strength: f64) -> Result<SolverConfig, ExperimentError> {
        Ok(SolverConfig {
            grid: self.grid()?,
            model: self.model(strength)?,
            dt: self.dt,
            t_end: self.t_end,
            frame: self.frame,
            record_stride: self.record_stride,
            thresholds: self.thresholds.loose(),
            store_fields: false,
        })
    }

    /// Brownian mesh: `dt` in the physical frame, `dt/2` in the rescaled one.
    pub fn path_dt(&self) -> f64 {
        match self.frame {
            Frame::Physical => self.dt,
            Frame::Rescaled => 0.5 * self.dt,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ExperimentError::VersionMismatch(format!(
                "config schema {} (supported: {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.n_paths == 0 {
            return Err(ExperimentError::Config("n_paths must be >= 1".into()));
        }
        if self.c_norm_list.is_empty() {
            return Err(ExperimentError::Config("c_norm_list is empty".into()));
        }
        if let Some(s) = self.c_norm_list.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(ExperimentError::Config(format!("strength {s} must be nonnegative")));
        }
        let t = &self.thresholds;
        if !(t.scatter_tol_strict > 0.0 && t.scatter_tol_strict <= t.scatter_tol) {
            return Err(ExperimentError::Config(
                "scatter_tol_strict must be positive and at most scatter_tol".into(),
            ));
        }
        let cfg = self.solver_config(self.c_norm_list[0])?;
        cfg.validate()?;
        self.initial.build(cfg.grid, self.frame)?;
        Ok(())
    }
}
