use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::noise::NoiseModel;
use crate::spectral::{Frame, GridSpec};

/// Numerical proxies for "blows up" and "scatters".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupThresholds {
    /// Trigger when `‖∇u‖₂` exceeds this multiple of its initial value.
    pub grad_cap_factor: f64,
    /// Trigger when `max |u|` exceeds this multiple of its initial value.
    pub amp_cap_factor: f64,
    /// Length of the trailing window used for the scattering residual.
    pub scatter_window: f64,
    /// Relative residual below which a completed run counts as scattering.
    pub scatter_tol: f64,
}

impl Default for BlowupThresholds {
    fn default() -> Self {
        Self {
            grad_cap_factor: 1e3,
            amp_cap_factor: 1e3,
            scatter_window: 5.0,
            scatter_tol: 1e-2,
        }
    }
}

impl BlowupThresholds {
    pub fn validate(&self) -> Result<(), SolverError> {
        let fields = [
            ("grad_cap_factor", self.grad_cap_factor),
            ("amp_cap_factor", self.amp_cap_factor),
            ("scatter_window", self.scatter_window),
            ("scatter_tol", self.scatter_tol),
        ];
        for (name, v) in fields {
            if !(v > 0.0) {
                return Err(SolverError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: GridSpec,
    pub model: NoiseModel,
    pub dt: f64,
    pub t_end: f64,
    pub frame: Frame,
    /// Record a snapshot every `record_stride` steps.
    pub record_stride: usize,
    pub thresholds: BlowupThresholds,
    /// Keep full fields in the snapshots (needed for scattering residuals).
    pub store_fields: bool,
}

impl SolverConfig {
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("t_end must be positive, got {}", self.t_end)));
        }
        let k = (self.t_end / self.dt).round();
        if (k * self.dt - self.t_end).abs() > 1e-12 * self.t_end.max(1.0) {
            return Err(SolverError::InvalidConfig(format!(
                "t_end {} is not a multiple of dt {}",
                self.t_end, self.dt
            )));
        }
        if self.record_stride == 0 {
            return Err(SolverError::InvalidConfig("record_stride must be >= 1".into()));
        }
        if self.model.dim != self.grid.dim() {
            return Err(SolverError::InvalidConfig(format!(
                "model dimension {} does not match grid dimension {}",
                self.model.dim,
                self.grid.dim()
            )));
        }
        self.thresholds.validate()
    }
}
