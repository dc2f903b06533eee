use serde::{Deserialize, Serialize};

use super::integrate::{TrajectoryRecord, TriggerKind};
use super::{BlowupThresholds, SolverError};
use crate::noise::Criticality;
use crate::spectral::{h1_norm_with, lp_norm_values, SpectralOps};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    GlobalScattering,
    Blowup { time: f64, unstable: bool },
    Undecided,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::GlobalScattering => "global-scattering",
            Outcome::Blowup { .. } => "blowup",
            Outcome::Undecided => "undecided",
        }
    }

    pub fn is_scattering(&self) -> bool {
        matches!(self, Outcome::GlobalScattering)
    }

    pub fn is_blowup(&self) -> bool {
        matches!(self, Outcome::Blowup { .. })
    }
}

fn norm_for(ops: &SpectralOps, values: &[num_complex::Complex64], crit: Criticality) -> f64 {
    match crit {
        Criticality::MassCritical => lp_norm_values(values, ops.grid().cell_volume(), 2.0),
        Criticality::EnergyCritical => h1_norm_with(ops, values),
    }
}

/// Pulls back the rescaled fields at `t1`, `t2` by the free flow; returns
/// `(‖e^{-it₂Δ}u(t₂) - e^{-it₁Δ}u(t₁)‖, ‖u(t₁)‖)` in the critical norm.
fn residual_parts(traj: &TrajectoryRecord, t1: f64, t2: f64) -> Result<(f64, f64), SolverError> {
    if !(t1 <= t2) {
        return Err(SolverError::InvalidConfig(format!("residual window [{t1}, {t2}] is reversed")));
    }
    let f1 = traj.field_at(t1).ok_or(SolverError::MissingSnapshot(t1))?;
    let f2 = traj.field_at(t2).ok_or(SolverError::MissingSnapshot(t2))?;
    let ops = SpectralOps::new(&traj.config.grid);
    let pull_back = |f: &crate::spectral::FieldState| -> Result<Vec<num_complex::Complex64>, SolverError> {
        let z = traj.to_rescaled_factor(f.time)?;
        let mut v: Vec<_> = f.values.iter().map(|x| x * z).collect();
        ops.propagate(&mut v, -f.time);
        Ok(v)
    };
    let v1 = pull_back(f1)?;
    let v2 = pull_back(f2)?;
    let diff: Vec<_> = v2.iter().zip(&v1).map(|(a, b)| a - b).collect();
    let crit = traj.config.model.criticality;
    Ok((norm_for(&ops, &diff, crit), norm_for(&ops, &v1, crit)))
}

/// `‖e^{-it₂Δ}u(t₂) - e^{-it₁Δ}u(t₁)‖` in L² (mass-critical) or H¹
/// (energy-critical), evaluated on the rescaled field.
pub fn scattering_residual(traj: &TrajectoryRecord, t1: f64, t2: f64) -> Result<f64, SolverError> {
    residual_parts(traj, t1, t2).map(|(r, _)| r)
}

/// [`scattering_residual`] divided by the norm at `t1`.
pub fn relative_scattering_residual(traj: &TrajectoryRecord, t1: f64, t2: f64) -> Result<f64, SolverError> {
    let (r, base) = residual_parts(traj, t1, t2)?;
    Ok(if base > 0.0 { r / base } else { r })
}

/// Blow-up if a cap was crossed or the state went non-finite, scattering if
/// the run reached `t_end` with a small trailing residual, otherwise undecided.
pub fn classify_outcome(traj: &TrajectoryRecord, thresholds: &BlowupThresholds) -> Outcome {
    let d = &traj.diagnostics;
    let grad_cap = thresholds.grad_cap_factor * d.initial_grad;
    let amp_cap = thresholds.amp_cap_factor * d.initial_amp;
    let crossed = traj.snapshots.iter().find(|s| {
        !s.grad_norm.is_finite()
            || !s.max_amplitude.is_finite()
            || (d.initial_grad > 0.0 && s.grad_norm > grad_cap)
            || (d.initial_amp > 0.0 && s.max_amplitude > amp_cap)
    });
    let from_snapshots = crossed.map(|s| Outcome::Blowup {
        time: s.time,
        unstable: !(s.grad_norm.is_finite() && s.max_amplitude.is_finite()),
    });
    let from_trigger = d.trigger.map(|t| Outcome::Blowup {
        time: t.time,
        unstable: t.kind == TriggerKind::NonFinite,
    });
    match (from_trigger, from_snapshots) {
        (Some(Outcome::Blowup { time: a, unstable: ua }), Some(Outcome::Blowup { time: b, unstable: ub })) => {
            return if b < a {
                Outcome::Blowup { time: b, unstable: ub }
            } else {
                Outcome::Blowup { time: a, unstable: ua }
            };
        }
        (Some(o), _) | (None, Some(o)) => return o,
        _ => {}
    }
    if !traj.reached_end() {
        return Outcome::Undecided;
    }
    let cfg = &traj.config;
    let residual = if thresholds.scatter_window == cfg.thresholds.scatter_window {
        d.scattering_residual
    } else {
        let t1 = ((cfg.t_end - thresholds.scatter_window) / cfg.dt - 1e-9).ceil().max(0.0) * cfg.dt;
        relative_scattering_residual(traj, t1, cfg.t_end).ok()
    };
    match residual {
        Some(r) if r < thresholds.scatter_tol => Outcome::GlobalScattering,
        _ => Outcome::Undecided,
    }
}
