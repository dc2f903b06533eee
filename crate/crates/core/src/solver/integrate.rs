use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::outcome::{classify_outcome, Outcome};
use super::steps::{apply_nonlinear_phase, noise_multiplier};
use super::{SolverConfig, SolverError};
use crate::noise::{gbm_at_index, BrownianPath};
use crate::spectral::{FieldState, Frame, SpectralOps};

/// Norm summary at one recorded time, optionally with the full field.
///
/// `grad_norm` and `max_amplitude` are rescaled-frame equivalents: in the
/// physical frame they are multiplied by `e^{‖c‖²t - M(t)}` so that caps
/// mean the same thing in both frames. `mass` and `h1_norm` are in the
/// trajectory's own frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub mass: f64,
    pub h1_norm: f64,
    pub grad_norm: f64,
    pub max_amplitude: f64,
    pub h_c: f64,
    pub field: Option<FieldState>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriggerKind {
    Gradient,
    Amplitude,
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trigger {
    pub time: f64,
    pub kind: TriggerKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub initial_grad: f64,
    pub initial_amp: f64,
    pub peak_grad: f64,
    pub trigger: Option<Trigger>,
    /// Relative residual over the trailing window, if the run reached `t_end`.
    pub scattering_residual: Option<f64>,
    pub steps_taken: usize,
    /// `1/‖c‖` for noisy runs.
    pub splitting_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub config: SolverConfig,
    pub path: Option<BrownianPath>,
    pub snapshots: Vec<Snapshot>,
    /// Field at the first step at or after `t_end - scatter_window`.
    pub window_start: Option<FieldState>,
    pub final_field: FieldState,
    pub outcome: Outcome,
    pub diagnostics: Diagnostics,
}

impl TrajectoryRecord {
    pub fn final_time(&self) -> f64 {
        self.final_field.time
    }

    pub fn reached_end(&self) -> bool {
        self.diagnostics.trigger.is_none() && self.diagnostics.steps_taken == self.config.steps()
    }

    /// Full field recorded at time `t`, searching snapshots and the window anchors.
    pub fn field_at(&self, t: f64) -> Option<&FieldState> {
        let tol = 1e-9 * self.config.dt;
        let close = |f: &&FieldState| (f.time - t).abs() <= tol;
        self.window_start
            .as_ref()
            .filter(close)
            .or_else(|| Some(&self.final_field).filter(close))
            .or_else(|| self.snapshots.iter().filter_map(|s| s.field.as_ref()).find(close))
    }

    /// Multiplier taking a recorded field of this trajectory into the rescaled frame.
    pub fn to_rescaled_factor(&self, t: f64) -> Result<Complex64, SolverError> {
        match self.config.frame {
            Frame::Rescaled => Ok(Complex64::new(1.0, 0.0)),
            Frame::Physical => {
                let path = self.path.as_ref().ok_or(SolverError::MissingPath)?;
                Ok(crate::noise::rescale_factor(path, &self.config.model, t)?)
            }
        }
    }
}

enum Drive<'a> {
    Path(&'a BrownianPath),
    Coefficient(&'a dyn Fn(f64) -> f64),
}

/// Strang split-step integration driven by a Brownian path.
///
/// Physical frame: half linear, phase rotation with `h = 1`, exact noise
/// factor over the full step, half linear. Rescaled frame: the noise factor
/// is absorbed and the phase uses `h_c` at the step midpoint, so the path
/// mesh must divide `dt/2`.
pub fn integrate(
    config: &SolverConfig,
    path: &BrownianPath,
    initial: &FieldState,
) -> Result<TrajectoryRecord, SolverError> {
    run(config, Drive::Path(path), initial)
}

/// Rescaled-frame integration with a prescribed coefficient `h(t)` in place
/// of `h_c`. The config's noise coefficients are ignored.
pub fn integrate_with_coefficient(
    config: &SolverConfig,
    h: &dyn Fn(f64) -> f64,
    initial: &FieldState,
) -> Result<TrajectoryRecord, SolverError> {
    if config.frame != Frame::Rescaled {
        return Err(SolverError::InvalidConfig(
            "coefficient-driven runs live in the rescaled frame".into(),
        ));
    }
    run(config, Drive::Coefficient(h), initial)
}

fn mesh_ratio(step: f64, path_dt: f64) -> Result<usize, SolverError> {
    let r = step / path_dt;
    let k = r.round();
    if k < 1.0 || (r - k).abs() > 1e-6 {
        return Err(SolverError::PathMesh { dt: step, path_dt });
    }
    Ok(k as usize)
}

fn run(config: &SolverConfig, drive: Drive<'_>, initial: &FieldState) -> Result<TrajectoryRecord, SolverError> {
    config.validate()?;
    if initial.frame != config.frame {
        return Err(SolverError::FrameMismatch {
            expected: config.frame,
            found: initial.frame,
        });
    }
    if initial.grid != config.grid {
        return Err(SolverError::InvalidConfig("initial field grid differs from config grid".into()));
    }
    if initial.time != 0.0 {
        return Err(SolverError::InvalidConfig("initial field must be at t = 0".into()));
    }
    initial.ensure_finite()?;

    let model = &config.model;
    let dt = config.dt;
    let steps = config.steps();
    let t_at = |n: usize| n as f64 * dt;

    // Path index of time step n (physical) or of half step m (rescaled).
    let ratio = match drive {
        Drive::Path(p) => {
            if p.horizon() < config.t_end * (1.0 - 1e-12) {
                return Err(SolverError::PathTooShort {
                    horizon: p.horizon(),
                    t_end: config.t_end,
                });
            }
            if p.modes() != model.modes() {
                return Err(SolverError::InvalidConfig(format!(
                    "path has {} modes, model has {}",
                    p.modes(),
                    model.modes()
                )));
            }
            match config.frame {
                Frame::Physical => mesh_ratio(dt, p.dt)?,
                Frame::Rescaled => mesh_ratio(0.5 * dt, p.dt)?,
            }
        }
        Drive::Coefficient(_) => 0,
    };
    let path_index = |n: usize| match config.frame {
        Frame::Physical => n * ratio,
        Frame::Rescaled => 2 * n * ratio,
    };
    let c2 = model.c_norm_sq();
    // Factor turning own-frame moduli into rescaled-frame moduli at step n.
    let to_rescaled = |n: usize| -> f64 {
        match (&drive, config.frame) {
            (Drive::Path(p), Frame::Physical) => {
                let j = path_index(n);
                (c2 * p.time(j) - p.m[j]).exp()
            }
            _ => 1.0,
        }
    };
    let h_at_step = |n: usize| -> f64 {
        match drive {
            Drive::Path(p) => gbm_at_index(p, model, path_index(n)),
            Drive::Coefficient(h) => h(t_at(n)),
        }
    };
    let h_mid = |n: usize| -> f64 {
        match (&drive, config.frame) {
            (_, Frame::Physical) => 1.0,
            (Drive::Path(p), Frame::Rescaled) => gbm_at_index(p, model, (2 * n + 1) * ratio),
            (Drive::Coefficient(h), Frame::Rescaled) => h(t_at(n) + 0.5 * dt),
        }
    };

    let grid = config.grid;
    let ops = SpectralOps::new(&grid);
    let half: Vec<Complex64> = ops
        .k_squared()
        .iter()
        .map(|&k2| Complex64::from_polar(1.0, -0.5 * dt * k2))
        .collect();

    let th = &config.thresholds;
    let window_start_step = {
        let s = ((config.t_end - th.scatter_window) / dt - 1e-9).ceil();
        s.max(0.0) as usize
    };

    let mut spec = initial.values.clone();
    ops.forward(&mut spec);

    let snapshot_of = |n: usize, spec: &[Complex64], values: &[Complex64], keep: bool| -> Snapshot {
        let scale = to_rescaled(n);
        let mass = ops.mass_from_spectrum(spec);
        let g2 = ops.gradient_norm_sq_from_spectrum(spec);
        let amp = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let time = t_at(n);
        Snapshot {
            time,
            mass,
            h1_norm: (mass + g2).sqrt(),
            grad_norm: g2.sqrt() * scale,
            max_amplitude: amp * scale,
            h_c: h_at_step(n),
            field: keep.then(|| FieldState {
                grid,
                values: values.to_vec(),
                frame: config.frame,
                time,
            }),
        }
    };

    let first = snapshot_of(0, &spec, &initial.values, config.store_fields);
    let initial_grad = first.grad_norm;
    let initial_amp = first.max_amplitude;
    let grad_cap = if initial_grad > 0.0 {
        th.grad_cap_factor * initial_grad
    } else {
        f64::INFINITY
    };
    let amp_cap = if initial_amp > 0.0 {
        th.amp_cap_factor * initial_amp
    } else {
        f64::INFINITY
    };
    let mut peak_grad = initial_grad;
    let mut snapshots = vec![first];
    let mut window_start = (window_start_step == 0).then(|| initial.clone());
    let mut trigger = None;
    let mut steps_taken = 0;
    let mut values = vec![Complex64::new(0.0, 0.0); spec.len()];
    let lambda_dt = model.lambda * dt;

    for n in 0..steps {
        for (z, e) in spec.iter_mut().zip(&half) {
            *z *= e;
        }
        ops.inverse(&mut spec);
        apply_nonlinear_phase(&mut spec, lambda_dt * h_mid(n), model.alpha);
        if let (Drive::Path(p), Frame::Physical) = (&drive, config.frame) {
            let z = noise_multiplier(p, model, path_index(n), path_index(n + 1));
            for v in spec.iter_mut() {
                *v *= z;
            }
        }
        let scale = to_rescaled(n + 1);
        let amp_mid = spec.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max).sqrt() * scale;
        ops.forward(&mut spec);
        for (z, e) in spec.iter_mut().zip(&half) {
            *z *= e;
        }
        steps_taken = n + 1;
        let time = t_at(n + 1);
        let g2 = ops.gradient_norm_sq_from_spectrum(&spec);
        let grad = g2.sqrt() * scale;
        if !grad.is_finite() || !amp_mid.is_finite() || !scale.is_finite() {
            trigger = Some(Trigger {
                time,
                kind: TriggerKind::NonFinite,
            });
        } else {
            peak_grad = peak_grad.max(grad);
            if grad > grad_cap {
                trigger = Some(Trigger {
                    time,
                    kind: TriggerKind::Gradient,
                });
            } else if amp_mid > amp_cap {
                trigger = Some(Trigger {
                    time,
                    kind: TriggerKind::Amplitude,
                });
            }
        }
        let last = trigger.is_some() || n + 1 == steps;
        let at_window = n + 1 == window_start_step;
        if (n + 1) % config.record_stride == 0 || last || at_window {
            values.copy_from_slice(&spec);
            ops.inverse(&mut values);
            let snap = snapshot_of(n + 1, &spec, &values, config.store_fields);
            if at_window {
                window_start = Some(FieldState {
                    grid,
                    values: values.clone(),
                    frame: config.frame,
                    time,
                });
            }
            snapshots.push(snap);
        }
        if trigger.is_some() {
            break;
        }
    }

    values.copy_from_slice(&spec);
    ops.inverse(&mut values);
    let final_field = FieldState {
        grid,
        values,
        frame: config.frame,
        time: t_at(steps_taken),
    };
    let path = match drive {
        Drive::Path(p) => Some(p.clone()),
        Drive::Coefficient(_) => None,
    };
    let mut record = TrajectoryRecord {
        config: config.clone(),
        path,
        snapshots,
        window_start,
        final_field,
        outcome: Outcome::Undecided,
        diagnostics: Diagnostics {
            initial_grad,
            initial_amp,
            peak_grad,
            trigger,
            scattering_residual: None,
            steps_taken,
            splitting_time: (model.c_norm > 0.0).then(|| 1.0 / model.c_norm),
        },
    };
    if record.reached_end() {
        let t1 = t_at(window_start_step);
        record.diagnostics.scattering_residual = super::outcome::relative_scattering_residual(&record, t1, config.t_end).ok();
    }
    record.outcome = classify_outcome(&record, &config.thresholds);
    Ok(record)
}
