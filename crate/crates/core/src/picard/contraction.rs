use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::budget::PicardBudget;
use super::duhamel::DuhamelMap;
use super::sampling::PacketSample;
use super::{time_norm, PicardError};
use crate::noise::{derived_seed, rng_from_seed, Criticality, NoiseModel};
use crate::solver::{integrate_with_coefficient, BlowupThresholds, SolverConfig};
use crate::spectral::{
    energy_pair, lp_norm_values, mass, mass_pair, w1p_norm_with, FieldState, Frame, SampledField, SpectralOps,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub max_iter: usize,
    /// Stop once `d(u_n, u_{n+1}) < tol` in the `S(I)` metric.
    pub tol: f64,
    /// Number of random in-ball pairs for the Lipschitz probe.
    pub lipschitz_pairs: usize,
    pub seed: u64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tol: 1e-12,
            lipschitz_pairs: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzSample {
    pub seed: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub iterations: usize,
    pub converged: bool,
    /// `d(u_n, u_{n+1})` for each iteration.
    pub iterate_distances: Vec<f64>,
    /// Largest `d_{n+1}/d_n` while `d_n` is above the roundoff floor.
    pub geometric_rate: Option<f64>,
    pub empirical_lipschitz: f64,
    pub lipschitz_samples: Vec<LipschitzSample>,
    pub ball_radius: Option<f64>,
    /// Largest ball norm (`S¹` energy-critical, `S` mass-critical) over the iterates.
    pub max_iterate_norm: f64,
    pub stayed_in_ball: Option<bool>,
    pub budget_satisfied: Option<bool>,
    /// Relative sup-in-time L² distance to a split-step run, when computed.
    pub residual: Option<f64>,
    pub warnings: Vec<String>,
}

/// Space-time norms matching the criticality of the map.
pub(crate) struct Metric<'a> {
    ops: &'a SpectralOps,
    q: f64,
    p: f64,
    derivative_ball: bool,
}

impl<'a> Metric<'a> {
    pub(crate) fn new(ops: &'a SpectralOps, criticality: Criticality) -> Result<Self, PicardError> {
        let d = ops.grid().dim();
        let (q, p, derivative_ball) = match criticality {
            Criticality::EnergyCritical => {
                let (q, p) = energy_pair(d)
                    .ok_or_else(|| PicardError::InvalidInput(format!("no energy pair in d = {d}")))?;
                (q, p, true)
            }
            Criticality::MassCritical => {
                let (q, p) = mass_pair(d);
                (q, p, false)
            }
        };
        Ok(Self {
            ops,
            q,
            p,
            derivative_ball,
        })
    }

    fn series(&self, times: &[f64], spatial: impl Fn(&[Complex64]) -> f64 + Sync, fields: &[FieldState]) -> f64 {
        let norms: Vec<f64> = fields.par_iter().map(|f| spatial(&f.values)).collect();
        time_norm(times, &norms, self.q)
    }

    /// `‖u‖_{S(I)}`.
    pub(crate) fn s(&self, u: &SampledField) -> f64 {
        let dv = self.ops.grid().cell_volume();
        self.series(&u.times, |v| lp_norm_values(v, dv, self.p), &u.fields)
    }

    /// `‖u - v‖_{S(I)}`.
    pub(crate) fn distance(&self, u: &SampledField, v: &SampledField) -> f64 {
        let dv = self.ops.grid().cell_volume();
        let norms: Vec<f64> = u
            .fields
            .par_iter()
            .zip(&v.fields)
            .map(|(a, b)| {
                let d: Vec<Complex64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
                lp_norm_values(&d, dv, self.p)
            })
            .collect();
        time_norm(&u.times, &norms, self.q)
    }

    /// Norm defining the ball: `S¹` in the energy-critical case, `S` otherwise.
    pub(crate) fn ball(&self, u: &SampledField) -> f64 {
        if self.derivative_ball {
            self.series(&u.times, |v| w1p_norm_with(self.ops, v, self.p), &u.fields)
        } else {
            self.s(u)
        }
    }
}

fn scale_field(u: &SampledField, s: f64) -> SampledField {
    u.scaled(s)
}

fn combine(a: &SampledField, ca: f64, b: &SampledField, cb: f64) -> SampledField {
    let fields = a
        .fields
        .iter()
        .zip(&b.fields)
        .map(|(x, y)| {
            let mut f = x.clone();
            for (z, w) in f.values.iter_mut().zip(&y.values) {
                *z = ca * *z + cb * w;
            }
            f
        })
        .collect();
    SampledField::new(a.times.clone(), fields)
}

/// Picard iteration `u_{n+1} = Φ(u_n)` from the free evolution, followed by
/// an empirical Lipschitz probe over random pairs inside the ball.
///
/// Without a budget the probe ball has twice the fixed point's ball norm.
/// An unsatisfied budget is reported as a warning and the iteration still runs.
pub fn picard_iterate(
    map: &DuhamelMap,
    criticality: Criticality,
    options: &PicardOptions,
    budget: Option<&PicardBudget>,
) -> Result<(SampledField, ContractionReport), PicardError> {
    let metric = Metric::new(map.ops(), criticality)?;
    let mut warnings = Vec::new();
    if let Some(b) = budget {
        if !b.satisfied {
            warnings.push(format!("budget for {} is not satisfied (lhs = {})", b.regime, b.lhs));
        }
        if b.regime.criticality() != criticality {
            warnings.push(format!("budget regime {} does not match the map's criticality", b.regime));
        }
    }
    let radius = budget.map(|b| b.ball_radius());

    let mut u = map.free_evolution();
    let mut max_norm = metric.ball(&u);
    let mut distances = Vec::new();
    let mut converged = false;
    let mut growth = 0;
    for it in 0..options.max_iter {
        let next = map.apply(&u)?;
        let d = metric.distance(&next, &u);
        max_norm = max_norm.max(metric.ball(&next));
        if let Some(&prev) = distances.last() {
            growth = if d > prev { growth + 1 } else { 0 };
        }
        distances.push(d);
        u = next;
        if !d.is_finite() || growth >= 3 {
            return Err(PicardError::Divergence {
                iteration: it + 1,
                distances,
            });
        }
        if d < options.tol {
            converged = true;
            break;
        }
    }

    let floor = 1e-11 * metric.s(&u).max(f64::MIN_POSITIVE);
    let geometric_rate = distances
        .windows(2)
        .filter(|w| w[0] > floor && w[1] > floor)
        .map(|w| w[1] / w[0])
        .reduce(f64::max);

    let probe_radius = radius.unwrap_or(2.0 * metric.ball(&u));
    let samples = lipschitz_probe(map, &metric, &u, probe_radius, options)?;
    let empirical_lipschitz = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);

    let report = ContractionReport {
        iterations: distances.len(),
        converged,
        iterate_distances: distances,
        geometric_rate,
        empirical_lipschitz,
        lipschitz_samples: samples,
        ball_radius: radius,
        max_iterate_norm: max_norm,
        stayed_in_ball: radius.map(|r| max_norm <= r * (1.0 + 1e-9)),
        budget_satisfied: budget.map(|b| b.satisfied),
        residual: None,
        warnings,
    };
    Ok((u, report))
}

/// Random pairs in the ball of radius `radius`: half are independent free
/// evolutions of packet data, half perturb a scaled copy of the fixed point.
fn lipschitz_probe(
    map: &DuhamelMap,
    metric: &Metric<'_>,
    fixed: &SampledField,
    radius: f64,
    options: &PicardOptions,
) -> Result<Vec<LipschitzSample>, PicardError> {
    let grid = map.anchor().grid;
    let ops = map.ops();
    let steps = map.times().len() - 1;
    let t0 = map.times()[0];
    let random_evolution = |rng: &mut rand_chacha::ChaCha8Rng| -> SampledField {
        let sample = PacketSample::draw_default(rng, grid.dim(), grid.length());
        let f = sample.band_limited(ops, map.anchor().frame);
        SampledField::free_evolution(ops, &f, t0, map.step(), steps)
    };
    let fixed_norm = metric.ball(fixed);
    let pair = |i: u64| -> Result<LipschitzSample, PicardError> {
        let seed = derived_seed(options.seed, i);
        let mut rng = rng_from_seed(seed);
        let w1 = random_evolution(&mut rng);
        let w2 = random_evolution(&mut rng);
        let (mut u, mut v) = if i % 2 == 0 || fixed_norm == 0.0 {
            let a = radius * rng.random_range(0.1..1.0) / metric.ball(&w1);
            let b = radius * rng.random_range(0.1..1.0) / metric.ball(&w2);
            (scale_field(&w1, a), scale_field(&w2, b))
        } else {
            let s = rng.random_range(0.2..1.0) * radius / fixed_norm;
            let eps = rng.random_range(0.01..0.3) * radius;
            (
                combine(fixed, s.min(1.0), &w1, eps / metric.ball(&w1)),
                combine(fixed, s.min(1.0), &w2, eps / metric.ball(&w2)),
            )
        };
        for x in [&mut u, &mut v] {
            let n = metric.ball(x);
            if n > radius {
                *x = scale_field(x, radius / n);
            }
        }
        let du = metric.distance(&u, &v);
        let dphi = metric.distance(&map.apply(&u)?, &map.apply(&v)?);
        Ok(LipschitzSample {
            seed,
            ratio: if du > 0.0 { dphi / du } else { 0.0 },
        })
    };
    (0..options.lipschitz_pairs as u64).map(pair).collect()
}

/// Runs [`picard_iterate`] on the mesh of `interval` with `steps` steps.
pub fn picard_solve(
    initial: &FieldState,
    h: &dyn Fn(f64) -> f64,
    interval: (f64, f64),
    steps: usize,
    model: &NoiseModel,
    options: &PicardOptions,
    budget: Option<&PicardBudget>,
) -> Result<(SampledField, ContractionReport), PicardError> {
    let map = DuhamelMap::new(initial, h, interval, steps, model)?;
    picard_iterate(&map, model.criticality, options, budget)
}

/// Split-step run of `i u_t + Δu = λh|u|^{α-1}u` from `initial` at
/// `interval.0`, sampled on the Duhamel mesh, with `refine` solver steps per
/// mesh step.
pub fn split_step_reference(
    initial: &FieldState,
    h: &(dyn Fn(f64) -> f64 + Sync),
    interval: (f64, f64),
    steps: usize,
    refine: usize,
    model: &NoiseModel,
) -> Result<SampledField, PicardError> {
    let (t0, t1) = interval;
    let span = t1 - t0;
    let dt = span / (steps * refine.max(1)) as f64;
    let quiet = model.with_phi(Vec::new());
    let config = SolverConfig {
        grid: initial.grid,
        model: quiet,
        dt,
        t_end: span,
        frame: Frame::Rescaled,
        record_stride: refine.max(1),
        thresholds: BlowupThresholds {
            grad_cap_factor: 1e12,
            amp_cap_factor: 1e12,
            scatter_window: span,
            scatter_tol: 1.0,
        },
        store_fields: true,
    };
    let mut start = initial.clone();
    start.time = 0.0;
    start.frame = Frame::Rescaled;
    let shifted = |s: f64| h(t0 + s);
    let record = integrate_with_coefficient(&config, &shifted, &start)?;
    if record.snapshots.len() != steps + 1 {
        return Err(PicardError::MeshMismatch(format!(
            "split-step run stopped after {} of {} samples",
            record.snapshots.len(),
            steps + 1
        )));
    }
    let mut fields = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    for s in record.snapshots {
        let mut f = s.field.expect("fields stored");
        f.time += t0;
        f.frame = initial.frame;
        times.push(f.time);
        fields.push(f);
    }
    Ok(SampledField::new(times, fields))
}

/// `max_j ‖a_j - b_j‖₂ / ‖b_j‖₂`.
pub fn relative_sup_l2(a: &SampledField, b: &SampledField) -> Result<f64, PicardError> {
    if a.len() != b.len() {
        return Err(PicardError::MeshMismatch("sample counts differ".into()));
    }
    let mut worst: f64 = 0.0;
    for (x, y) in a.fields.iter().zip(&b.fields) {
        let d = x.difference(y)?;
        worst = worst.max((mass(&d) / mass(y)).sqrt());
    }
    Ok(worst)
}
