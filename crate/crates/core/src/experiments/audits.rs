use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentError, InitialProfile};
use crate::noise::stats::{correlation, mean, std_error_of_mean};
use crate::noise::{derived_seed, rescale, sample_path, BrownianPath, NoiseModel, RescaleDirection};
use crate::solver::{integrate, BlowupThresholds, SolverConfig, TrajectoryRecord};
use crate::spectral::{make_grid, mass, Frame, GridSpec};

/// Caps high enough that audits never stop early on a smooth run.
fn audit_thresholds() -> BlowupThresholds {
    BlowupThresholds {
        grad_cap_factor: 1e6,
        amp_cap_factor: 1e6,
        ..BlowupThresholds::default()
    }
}

fn default_audit_grid(dim: usize) -> GridSpec {
    let (n, l) = match dim {
        1 => (64, 20.0),
        2 => (16, 12.0),
        _ => (8, 10.0),
    };
    make_grid(dim, n, l).expect("audit grid is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleAuditConfig {
    pub model: NoiseModel,
    pub grid: GridSpec,
    pub initial: InitialProfile,
    pub dt: f64,
    pub checkpoints: Vec<f64>,
    pub n_paths: usize,
    pub seed: u64,
}

impl MartingaleAuditConfig {
    /// Small Gaussian on a coarse grid, `dt = 2^-7`. Checkpoints must lie on that mesh.
    pub fn new(model: &NoiseModel, n_paths: usize, checkpoints: &[f64], seed: u64) -> Self {
        Self {
            grid: default_audit_grid(model.dim),
            model: model.clone(),
            initial: InitialProfile::Gaussian { amplitude: 0.5, width: 1.0 },
            dt: 1.0 / 128.0,
            checkpoints: checkpoints.to_vec(),
            n_paths,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleCheckpoint {
    pub time: f64,
    /// Ensemble mean of `‖X(t)‖²/‖X₀‖²`.
    pub mean_ratio: f64,
    pub std_error: f64,
    pub mean_ok: bool,
    /// Worst per-path relative deviation from `e^{2M(t) - 2‖c‖²t}`.
    pub identity_error: f64,
    /// Correlation of the increment since the previous checkpoint with the
    /// previous value; absent when the previous value is deterministic.
    pub increment_correlation: Option<f64>,
    /// Sample covariance of the same pair within 3 standard errors of zero.
    pub correlation_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleReport {
    pub c_norm: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub identity_tol: f64,
    pub checkpoints: Vec<MartingaleCheckpoint>,
}

impl MartingaleReport {
    pub fn passed(&self) -> bool {
        self.checkpoints
            .iter()
            .all(|c| c.mean_ok && c.correlation_ok && c.identity_error <= self.identity_tol)
    }

    pub fn max_identity_error(&self) -> f64 {
        self.checkpoints.iter().map(|c| c.identity_error).fold(0.0, f64::max)
    }
}

/// Per-path identity tolerance.
pub const MARTINGALE_IDENTITY_TOL: f64 = 1e-10;

/// Mass ratios of one physical-frame path at each checkpoint, with the
/// martingale prediction `e^{2M - 2‖c‖²t}`.
fn mass_ratios(cfg: &MartingaleAuditConfig, solver: &SolverConfig, seed: u64) -> Result<Vec<(f64, f64)>, ExperimentError> {
    let t_end = solver.t_end;
    let path = sample_path(&cfg.model, cfg.dt, t_end, seed)?;
    let initial = cfg.initial.build(cfg.grid, Frame::Physical)?;
    let m0 = mass(&initial);
    let record = integrate(solver, &path, &initial)?;
    let c2 = cfg.model.c_norm_sq();
    cfg.checkpoints
        .iter()
        .map(|&t| {
            let j = path.index_of(t)?;
            let snap = record
                .snapshots
                .iter()
                .find(|s| (s.time - t).abs() <= 1e-9 * cfg.dt)
                .ok_or_else(|| ExperimentError::Config(format!("no snapshot at checkpoint {t}")))?;
            let predicted = (2.0 * path.m[j] - 2.0 * c2 * path.time(j)).exp();
            Ok((snap.mass / m0, predicted))
        })
        .collect()
}

/// Mass-martingale audit of the physical frame.
pub fn martingale_audit(
    model: &NoiseModel,
    n_paths: usize,
    checkpoints: &[f64],
    seed: u64,
) -> Result<MartingaleReport, ExperimentError> {
    martingale_audit_with(&MartingaleAuditConfig::new(model, n_paths, checkpoints, seed))
}

pub fn martingale_audit_with(cfg: &MartingaleAuditConfig) -> Result<MartingaleReport, ExperimentError> {
    if cfg.n_paths < 2 {
        return Err(ExperimentError::Config("martingale audit needs at least 2 paths".into()));
    }
    if cfg.checkpoints.is_empty() || cfg.checkpoints.windows(2).any(|w| w[1] <= w[0]) || cfg.checkpoints[0] < 0.0 {
        return Err(ExperimentError::Config("checkpoints must be nonnegative and increasing".into()));
    }
    let t_last = *cfg.checkpoints.last().unwrap();
    let steps = (t_last / cfg.dt).round().max(1.0);
    let solver = SolverConfig {
        grid: cfg.grid,
        model: cfg.model.clone(),
        dt: cfg.dt,
        t_end: steps * cfg.dt,
        frame: Frame::Physical,
        record_stride: 1,
        thresholds: audit_thresholds(),
        store_fields: false,
    };
    solver.validate()?;
    for &t in &cfg.checkpoints {
        let k = (t / cfg.dt).round();
        if (t - k * cfg.dt).abs() > 1e-9 * cfg.dt.max(t) {
            return Err(ExperimentError::Config(format!("checkpoint {t} is not a multiple of dt = {}", cfg.dt)));
        }
    }
    let per_path: Vec<Vec<(f64, f64)>> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| mass_ratios(cfg, &solver, derived_seed(cfg.seed, i as u64)))
        .collect::<Result<_, _>>()?;

    let mut out = Vec::with_capacity(cfg.checkpoints.len());
    let mut previous: Option<Vec<f64>> = None;
    for (k, &time) in cfg.checkpoints.iter().enumerate() {
        let ratios: Vec<f64> = per_path.iter().map(|p| p[k].0).collect();
        let identity_error = per_path
            .iter()
            .map(|p| ((p[k].0 - p[k].1) / p[k].1).abs())
            .fold(0.0, f64::max);
        let mean_ratio = mean(&ratios);
        let std_error = std_error_of_mean(&ratios);
        // Roundoff floor keeps the deterministic t = 0 case exact.
        let mean_ok = (mean_ratio - 1.0).abs() <= 3.0 * std_error + 1e-12;
        // The covariance test uses the sample standard error of the products,
        // which stays honest under the lognormal tails of the mass ratio.
        let orthogonality = previous.as_ref().and_then(|prev| {
            (std_error_of_mean(prev) > 1e-12).then(|| {
                let inc: Vec<f64> = ratios.iter().zip(prev).map(|(a, b)| a - b).collect();
                let (mi, mp) = (mean(&inc), mean(prev));
                let products: Vec<f64> = inc.iter().zip(prev).map(|(a, b)| (a - mi) * (b - mp)).collect();
                let ok = mean(&products).abs() <= 3.0 * std_error_of_mean(&products);
                (correlation(&inc, prev), ok)
            })
        });
        let increment_correlation = orthogonality.map(|(r, _)| r);
        let correlation_ok = orthogonality.map_or(true, |(_, ok)| ok);
        out.push(MartingaleCheckpoint {
            time,
            mean_ratio,
            std_error,
            mean_ok,
            identity_error,
            increment_correlation,
            correlation_ok,
        });
        previous = Some(ratios);
    }
    Ok(MartingaleReport {
        c_norm: cfg.model.c_norm,
        n_paths: cfg.n_paths,
        seed: cfg.seed,
        identity_tol: MARTINGALE_IDENTITY_TOL,
        checkpoints: out,
    })
}

/// Setup shared by every rung of an equivalence ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConfig {
    pub grid: GridSpec,
    pub model: NoiseModel,
    pub initial: InitialProfile,
    pub t_end: f64,
    /// Spacing of the comparison times.
    pub checkpoint_every: f64,
    /// Brownian mesh; must divide `dt/2` for every rung.
    pub path_dt: f64,
    pub n_paths: usize,
    pub seed: u64,
}

impl EquivalenceConfig {
    /// d=1 quintic, `φ = (2)`, Gaussian 0.8/1 on `[0, 0.5]`, 32 paths.
    pub fn fixture() -> Self {
        Self {
            grid: make_grid(1, 256, 40.0).expect("fixture grid"),
            model: crate::noise::build_noise_model(
                vec![num_complex::Complex64::new(2.0, 0.0)],
                5.0,
                crate::noise::SOLITON_SIGN,
                1,
            )
            .expect("fixture model"),
            initial: InitialProfile::Gaussian { amplitude: 0.8, width: 1.0 },
            t_end: 0.5,
            checkpoint_every: 0.05,
            path_dt: 2.5e-4,
            n_paths: 32,
            seed: 7,
        }
    }

    pub fn sample_paths(&self) -> Result<Vec<BrownianPath>, ExperimentError> {
        (0..self.n_paths)
            .map(|i| Ok(sample_path(&self.model, self.path_dt, self.t_end, derived_seed(self.seed, i as u64))?))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub dt: f64,
    /// Mean over paths of the per-path error.
    pub error: f64,
    pub max_error: f64,
    /// Per path: sup over checkpoints of `‖rescale(X) - u‖₂ / ‖u‖₂`.
    pub path_errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivalenceRow>,
    /// `error(dt/2) / error(dt)` for consecutive rungs.
    pub ratios: Vec<f64>,
}

impl EquivalenceReport {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn frame_run(
    cfg: &EquivalenceConfig,
    path: &BrownianPath,
    dt: f64,
    frame: Frame,
) -> Result<TrajectoryRecord, ExperimentError> {
    let stride = (cfg.checkpoint_every / dt).round() as usize;
    let solver = SolverConfig {
        grid: cfg.grid,
        model: cfg.model.clone(),
        dt,
        t_end: cfg.t_end,
        frame,
        record_stride: stride.max(1),
        thresholds: audit_thresholds(),
        store_fields: true,
    };
    let initial = cfg.initial.build(cfg.grid, frame)?;
    Ok(integrate(&solver, path, &initial)?)
}

/// Sup-in-time relative L² distance between the rescaled physical run and the direct rescaled run.
pub fn frame_distance(
    cfg: &EquivalenceConfig,
    path: &BrownianPath,
    dt: f64,
) -> Result<f64, ExperimentError> {
    let x = frame_run(cfg, path, dt, Frame::Physical)?;
    let u = frame_run(cfg, path, dt, Frame::Rescaled)?;
    let mut worst = 0.0f64;
    for (sx, su) in x.snapshots.iter().zip(&u.snapshots) {
        let (Some(fx), Some(fu)) = (&sx.field, &su.field) else { continue };
        let fx = rescale(fx, path, &cfg.model, RescaleDirection::ToRescaled)?;
        let base = mass(fu);
        let diff = mass(&fx.difference(fu)?);
        let rel = if base > 0.0 { (diff / base).sqrt() } else { diff.sqrt() };
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// Frame-equivalence convergence table over a halving `dt_ladder`, averaged over `paths`.
pub fn equivalence_audit(
    cfg: &EquivalenceConfig,
    paths: &[BrownianPath],
    dt_ladder: &[f64],
) -> Result<EquivalenceReport, ExperimentError> {
    if paths.is_empty() || dt_ladder.is_empty() {
        return Err(ExperimentError::Config("equivalence audit needs paths and a dt ladder".into()));
    }
    if dt_ladder.windows(2).any(|w| ((w[1] / w[0]) - 0.5).abs() > 1e-9) {
        return Err(ExperimentError::Config("dt ladder must be a halving sequence".into()));
    }
    let mut rows = Vec::with_capacity(dt_ladder.len());
    for &dt in dt_ladder {
        let path_errors: Vec<f64> = paths
            .par_iter()
            .map(|p| frame_distance(cfg, p, dt))
            .collect::<Result<_, _>>()?;
        rows.push(EquivalenceRow {
            dt,
            error: mean(&path_errors),
            max_error: path_errors.iter().copied().fold(0.0, f64::max),
            path_errors,
        });
    }
    let ratios = rows
        .windows(2)
        .map(|w| if w[0].error > 0.0 { w[1].error / w[0].error } else { 0.0 })
        .collect();
    Ok(EquivalenceReport { rows, ratios })
}

/// Fraction of the box (per side, per axis) treated as the wrap-around layer.
pub const BOUNDARY_LAYER: f64 = 0.05;
pub const WRAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirialSeries {
    pub times: Vec<f64>,
    /// `V(t) = ∫|x|²|u|² dx`.
    pub values: Vec<f64>,
    /// Mass in the boundary layer over total mass, per time.
    pub wrap_fraction: Vec<f64>,
    pub warnings: Vec<String>,
}

/// `V(t)` and the wrap-around monitor at every full snapshot of `traj`.
pub fn virial_track(traj: &TrajectoryRecord) -> Result<VirialSeries, ExperimentError> {
    let mut fields: Vec<_> = traj.snapshots.iter().filter_map(|s| s.field.as_ref()).collect();
    if fields.is_empty() {
        return Err(ExperimentError::Config("trajectory has no full snapshots; set store_fields".into()));
    }
    fields.sort_by(|a, b| a.time.total_cmp(&b.time));
    fields.dedup_by(|a, b| a.time == b.time);
    let mut out = VirialSeries {
        times: Vec::new(),
        values: Vec::new(),
        wrap_fraction: Vec::new(),
        warnings: Vec::new(),
    };
    let edge = (0.5 - BOUNDARY_LAYER) * traj.config.grid.length();
    for f in fields {
        let g = f.grid;
        let (mut v, mut total, mut outer) = (0.0, 0.0, 0.0);
        for (i, z) in f.values.iter().enumerate() {
            let x = g.position(i);
            let r2: f64 = x[..g.dim()].iter().map(|c| c * c).sum();
            let w = z.norm_sqr();
            v += r2 * w;
            total += w;
            if x[..g.dim()].iter().any(|c| c.abs() >= edge) {
                outer += w;
            }
        }
        let frac = if total > 0.0 { outer / total } else { 0.0 };
        if frac > WRAP_TOL {
            out.warnings.push(format!(
                "t = {}: boundary-layer mass fraction {frac:.3e} exceeds {WRAP_TOL:e}",
                f.time
            ));
        }
        out.times.push(f.time);
        out.values.push(v * g.cell_volume());
        out.wrap_fraction.push(frac);
    }
    Ok(out)
}
