//! Mixed space-time norms `L^q_t W^{k,p}_x` over recorded time samples.

use serde::{Deserialize, Serialize};

use super::norms::{lp_norm_values, w1p_norm_with};
use super::{FieldState, SpectralError, SpectralOps};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzSpec {
    /// Temporal exponent (`f64::INFINITY` allowed).
    pub q: f64,
    /// Spatial exponent (`f64::INFINITY` allowed).
    pub p: f64,
    /// 0 for `S(I)`, 1 for `S¹(I)`.
    pub derivative_order: u8,
    pub interval: (f64, f64),
}

impl StrichartzSpec {
    pub fn new(q: f64, p: f64, derivative_order: u8, interval: (f64, f64)) -> Self {
        Self {
            q,
            p,
            derivative_order,
            interval,
        }
    }
}

const ADMISSIBLE_TOL: f64 = 1e-12;

/// Schrödinger admissibility: `2/q + d/p = d/2`, `q, p ≥ 2`, `(d,q,p) ≠ (2,2,∞)`.
pub fn is_admissible(q: f64, p: f64, d: usize) -> bool {
    if q < 2.0 || p < 2.0 || q.is_nan() || p.is_nan() {
        return false;
    }
    if d == 2 && q == 2.0 && p.is_infinite() {
        return false;
    }
    let lhs = 2.0 / q + d as f64 / p;
    (lhs - d as f64 / 2.0).abs() <= ADMISSIBLE_TOL
}

/// The pair used for the energy-critical problem, `(2d/(d-2), 2d²/(d²-2d+4))`, `d ≥ 3`.
pub fn energy_pair(d: usize) -> Option<(f64, f64)> {
    if d < 3 {
        return None;
    }
    let d = d as f64;
    Some((2.0 * d / (d - 2.0), 2.0 * d * d / (d * d - 2.0 * d + 4.0)))
}

/// Dual exponents of the energy pair, `(2d/(d+2), 2d²/(d²+2d-4))`.
pub fn energy_dual_pair(d: usize) -> Option<(f64, f64)> {
    if d < 3 {
        return None;
    }
    let d = d as f64;
    Some((2.0 * d / (d + 2.0), 2.0 * d * d / (d * d + 2.0 * d - 4.0)))
}

/// The diagonal mass-critical pair `q = p = 2(d+2)/d`.
pub fn mass_pair(d: usize) -> (f64, f64) {
    let e = 2.0 * (d as f64 + 2.0) / d as f64;
    (e, e)
}

/// Dual of the mass pair, `q' = p' = 2(d+2)/(d+4)`.
pub fn mass_dual_pair(d: usize) -> (f64, f64) {
    let e = 2.0 * (d as f64 + 2.0) / (d as f64 + 4.0);
    (e, e)
}

/// Anything that offers a sequence of fields at increasing times.
pub trait TimeSamples {
    fn sample_count(&self) -> usize;
    fn sample_time(&self, i: usize) -> f64;
    fn sample_field(&self, i: usize) -> &FieldState;
}

/// Fields sampled on a time mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    pub times: Vec<f64>,
    pub fields: Vec<FieldState>,
}

impl SampledField {
    pub fn new(times: Vec<f64>, fields: Vec<FieldState>) -> Self {
        assert_eq!(times.len(), fields.len());
        Self { times, fields }
    }

    /// Free evolution of `initial` on `t0 + j·dt`, `j = 0..=steps`.
    pub fn free_evolution(ops: &SpectralOps, initial: &FieldState, t0: f64, dt: f64, steps: usize) -> Self {
        let mut times = Vec::with_capacity(steps + 1);
        let mut fields = Vec::with_capacity(steps + 1);
        let mut spectrum = initial.values.clone();
        ops.forward(&mut spectrum);
        for j in 0..=steps {
            let t = t0 + j as f64 * dt;
            let mut s = spectrum.clone();
            ops.apply_free_symbol(&mut s, t - t0);
            ops.inverse(&mut s);
            times.push(t);
            fields.push(FieldState {
                grid: initial.grid,
                values: s,
                frame: initial.frame,
                time: t,
            });
        }
        Self { times, fields }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Pointwise difference of two samplings on the same mesh.
    pub fn difference(&self, other: &SampledField) -> Result<SampledField, SpectralError> {
        if self.times.len() != other.times.len() {
            return Err(SpectralError::GridMismatch);
        }
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.difference(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SampledField {
            times: self.times.clone(),
            fields,
        })
    }

    pub fn scaled(&self, factor: f64) -> SampledField {
        SampledField {
            times: self.times.clone(),
            fields: self
                .fields
                .iter()
                .map(|f| f.scaled(num_complex::Complex64::new(factor, 0.0)))
                .collect(),
        }
    }
}

impl TimeSamples for SampledField {
    fn sample_count(&self) -> usize {
        self.times.len()
    }

    fn sample_time(&self, i: usize) -> f64 {
        self.times[i]
    }

    fn sample_field(&self, i: usize) -> &FieldState {
        &self.fields[i]
    }
}

/// `‖u‖_{L^q(I; W^{k,p})}` with a trapezoid rule in time.
///
/// The temporal integrand `‖u(t)‖^q` is interpolated linearly between
/// samples, which makes the result monotone under interval inclusion.
pub fn spacetime_norm(samples: &impl TimeSamples, spec: &StrichartzSpec) -> Result<f64, SpectralError> {
    if samples.sample_count() == 0 {
        return Err(SpectralError::IntervalNotCovered);
    }
    let ops = SpectralOps::new(&samples.sample_field(0).grid);
    spacetime_norm_with(&ops, samples, spec)
}

pub fn spacetime_norm_with(
    ops: &SpectralOps,
    samples: &impl TimeSamples,
    spec: &StrichartzSpec,
) -> Result<f64, SpectralError> {
    let (ta, tb) = spec.interval;
    if tb < ta {
        return Err(SpectralError::IntervalNotCovered);
    }
    if tb == ta {
        return Ok(0.0);
    }
    let count = samples.sample_count();
    let tol = 1e-9 * (1.0 + ta.abs().max(tb.abs()));
    if count == 0 || samples.sample_time(0) > ta + tol || samples.sample_time(count - 1) < tb - tol {
        return Err(SpectralError::IntervalNotCovered);
    }
    let space_norm = |f: &FieldState| -> f64 {
        if spec.derivative_order == 0 {
            lp_norm_values(&f.values, f.grid.cell_volume(), spec.p)
        } else {
            w1p_norm_with(ops, &f.values, spec.p)
        }
    };
    // Indices whose segment touches [ta, tb].
    let first = (0..count)
        .rev()
        .find(|&i| samples.sample_time(i) <= ta + tol)
        .unwrap_or(0);
    let last = (0..count)
        .find(|&i| samples.sample_time(i) >= tb - tol)
        .unwrap_or(count - 1);
    let times: Vec<f64> = (first..=last).map(|i| samples.sample_time(i)).collect();
    let norms: Vec<f64> = (first..=last).map(|i| space_norm(samples.sample_field(i))).collect();

    if spec.q.is_infinite() {
        let mut peak: f64 = 0.0;
        for w in 0..times.len() {
            let inside = times[w] >= ta - tol && times[w] <= tb + tol;
            if inside {
                peak = peak.max(norms[w]);
            }
        }
        // Interpolated endpoint values.
        peak = peak.max(interp(&times, &norms, ta)).max(interp(&times, &norms, tb));
        return Ok(peak);
    }

    let g: Vec<f64> = norms.iter().map(|v| v.powf(spec.q)).collect();
    let mut integral = 0.0;
    for w in 0..times.len().saturating_sub(1) {
        let (t0, t1) = (times[w], times[w + 1]);
        let lo = t0.max(ta);
        let hi = t1.min(tb);
        if hi <= lo {
            continue;
        }
        let g_lo = lerp(t0, t1, g[w], g[w + 1], lo);
        let g_hi = lerp(t0, t1, g[w], g[w + 1], hi);
        integral += 0.5 * (hi - lo) * (g_lo + g_hi);
    }
    Ok(integral.powf(1.0 / spec.q))
}

fn lerp(t0: f64, t1: f64, g0: f64, g1: f64, t: f64) -> f64 {
    if t1 == t0 {
        return g0;
    }
    g0 + (g1 - g0) * (t - t0) / (t1 - t0)
}

fn interp(times: &[f64], vals: &[f64], t: f64) -> f64 {
    for w in 0..times.len().saturating_sub(1) {
        if t >= times[w] && t <= times[w + 1] {
            return lerp(times[w], times[w + 1], vals[w], vals[w + 1], t);
        }
    }
    if t <= times[0] {
        vals[0]
    } else {
        *vals.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, Frame};
    use num_complex::Complex64;

    #[test]
    fn designated_pairs_are_admissible() {
        let (q, p) = energy_pair(3).unwrap();
        assert!((q - 6.0).abs() < 1e-15 && (p - 18.0 / 7.0).abs() < 1e-15);
        assert!(is_admissible(6.0, 18.0 / 7.0, 3));
        assert!(is_admissible(4.0, 4.0, 2));
        assert!(!is_admissible(2.0, f64::INFINITY, 2));
        for d in 3..=3 {
            let (q, p) = energy_pair(d).unwrap();
            assert!(is_admissible(q, p, d));
        }
        for d in 1..=3 {
            let (q, p) = mass_pair(d);
            assert!(is_admissible(q, p, d));
        }
        assert!(!is_admissible(1.5, 6.0, 1));
        assert!(is_admissible(f64::INFINITY, 2.0, 1));
    }

    #[test]
    fn duals_are_conjugate() {
        let (q, p) = energy_pair(3).unwrap();
        let (qd, pd) = energy_dual_pair(3).unwrap();
        assert!((1.0 / q + 1.0 / qd - 1.0).abs() < 1e-14);
        assert!((1.0 / p + 1.0 / pd - 1.0).abs() < 1e-14);
        let (q, _) = mass_pair(2);
        let (qd, _) = mass_dual_pair(2);
        assert!((1.0 / q + 1.0 / qd - 1.0).abs() < 1e-14);
    }

    fn constant_series(t_end: f64, steps: usize) -> (SampledField, FieldState) {
        let grid = make_grid(1, 16, 4.0).unwrap();
        let g = FieldState::from_fn(grid, Frame::Rescaled, 0.0, |x| Complex64::new((-x[0] * x[0]).exp(), 0.3));
        let dt = t_end / steps as f64;
        let times: Vec<f64> = (0..=steps).map(|j| j as f64 * dt).collect();
        let fields = times.iter().map(|_| g.clone()).collect();
        (SampledField::new(times, fields), g)
    }

    #[test]
    fn time_constant_field_is_separable() {
        let (s, g) = constant_series(2.0, 10);
        let spec = StrichartzSpec::new(6.0, 4.0, 0, (0.0, 2.0));
        let v = spacetime_norm(&s, &spec).unwrap();
        let gp = lp_norm_values(&g.values, g.grid.cell_volume(), 4.0);
        assert!((v - 2f64.powf(1.0 / 6.0) * gp).abs() < 1e-12 * v);
    }

    #[test]
    fn empty_interval_and_coverage() {
        let (s, _) = constant_series(1.0, 4);
        assert_eq!(spacetime_norm(&s, &StrichartzSpec::new(6.0, 6.0, 0, (0.5, 0.5))).unwrap(), 0.0);
        assert!(matches!(
            spacetime_norm(&s, &StrichartzSpec::new(6.0, 6.0, 0, (0.0, 1.5))),
            Err(SpectralError::IntervalNotCovered)
        ));
    }

    #[test]
    fn derivative_order_dominates() {
        let grid = make_grid(2, 16, 8.0).unwrap();
        let ops = SpectralOps::new(&grid);
        let f = FieldState::from_fn(grid, Frame::Rescaled, 0.0, |x| {
            Complex64::new((-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp(), 0.0)
        });
        let s = SampledField::free_evolution(&ops, &f, 0.0, 0.1, 10);
        let s0 = spacetime_norm(&s, &StrichartzSpec::new(4.0, 4.0, 0, (0.0, 1.0))).unwrap();
        let s1 = spacetime_norm(&s, &StrichartzSpec::new(4.0, 4.0, 1, (0.0, 1.0))).unwrap();
        assert!(s1 >= s0);
    }
}
