use num_complex::Complex64;
use rayon::prelude::*;

use super::nonlinearity::apply_nonlinearity;
use super::PicardError;
use crate::noise::NoiseModel;
use crate::spectral::{FieldState, SampledField, SpectralOps};

/// `Φ(u)(t) = e^{i(t-t₀)Δ}u(t₀) - iλ∫_{t₀}^t e^{i(t-s)Δ}(h|u|^{α-1}u)(s) ds`
/// on a uniform mesh of `[t₀, t₁]`.
///
/// The integral is the trapezoid rule in `s` with each sample transported
/// by the exact propagator. Factoring `e^{i(t-s)Δ} = e^{i(t-t₀)Δ}e^{-i(s-t₀)Δ}`
/// turns the nested sums into one running sum, so a single application
/// costs two FFTs per mesh point.
#[derive(Debug, Clone)]
pub struct DuhamelMap {
    ops: SpectralOps,
    anchor: FieldState,
    anchor_spectrum: Vec<Complex64>,
    times: Vec<f64>,
    h: Vec<f64>,
    alpha: f64,
    lambda: f64,
}

impl DuhamelMap {
    pub fn new(
        initial: &FieldState,
        h: &dyn Fn(f64) -> f64,
        interval: (f64, f64),
        steps: usize,
        model: &NoiseModel,
    ) -> Result<Self, PicardError> {
        let (t0, t1) = interval;
        if !(t1 > t0) || steps == 0 {
            return Err(PicardError::InvalidInput(format!(
                "need t1 > t0 and steps >= 1, got [{t0}, {t1}] with {steps} steps"
            )));
        }
        if model.dim != initial.grid.dim() {
            return Err(PicardError::InvalidInput("model and grid dimensions differ".into()));
        }
        initial.ensure_finite()?;
        let tau = (t1 - t0) / steps as f64;
        let times: Vec<f64> = (0..=steps).map(|j| t0 + j as f64 * tau).collect();
        let h: Vec<f64> = times.iter().map(|&t| h(t)).collect();
        if h.iter().any(|v| !v.is_finite()) {
            return Err(PicardError::InvalidInput("h is not finite on the mesh".into()));
        }
        let ops = SpectralOps::new(&initial.grid);
        let mut anchor_spectrum = initial.values.clone();
        ops.forward(&mut anchor_spectrum);
        let mut anchor = initial.clone();
        anchor.time = t0;
        Ok(Self {
            ops,
            anchor,
            anchor_spectrum,
            times,
            h,
            alpha: model.alpha,
            lambda: model.lambda,
        })
    }

    pub fn ops(&self) -> &SpectralOps {
        &self.ops
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    pub fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn h_samples(&self) -> &[f64] {
        &self.h
    }

    pub fn h_sup(&self) -> f64 {
        self.h.iter().fold(0.0, |a, b| a.max(b.abs()))
    }

    pub fn anchor(&self) -> &FieldState {
        &self.anchor
    }

    /// `e^{i(t-t₀)Δ}u(t₀)` on the mesh.
    pub fn free_evolution(&self) -> SampledField {
        let steps = self.times.len() - 1;
        SampledField::free_evolution(&self.ops, &self.anchor, self.times[0], self.step(), steps)
    }

    fn check_mesh(&self, u: &SampledField) -> Result<(), PicardError> {
        if u.len() != self.times.len() {
            return Err(PicardError::MeshMismatch(format!(
                "expected {} samples, found {}",
                self.times.len(),
                u.len()
            )));
        }
        let tol = 1e-9 * self.step();
        for (a, b) in u.times.iter().zip(&self.times) {
            if (a - b).abs() > tol {
                return Err(PicardError::MeshMismatch(format!("sample time {a} is off the mesh point {b}")));
            }
        }
        if u.fields.iter().any(|f| f.grid != self.anchor.grid) {
            return Err(PicardError::MeshMismatch("sample grid differs from the map's grid".into()));
        }
        Ok(())
    }

    pub fn apply(&self, u: &SampledField) -> Result<SampledField, PicardError> {
        self.check_mesh(u)?;
        let t0 = self.times[0];
        let k2 = self.ops.k_squared();
        // G_j = e^{+i(t_j-t₀)|k|²} FFT(h F(u_j))
        let g: Vec<Vec<Complex64>> = u
            .fields
            .par_iter()
            .zip(self.times.par_iter().zip(self.h.par_iter()))
            .map(|(f, (&t, &h))| {
                let mut v = f.values.clone();
                if h == 0.0 {
                    return vec![Complex64::new(0.0, 0.0); v.len()];
                }
                apply_nonlinearity(&mut v, self.alpha);
                self.ops.forward(&mut v);
                for (z, &k) in v.iter_mut().zip(k2) {
                    *z *= h * Complex64::from_polar(1.0, (t - t0) * k);
                }
                v
            })
            .collect();
        let half_tau = 0.5 * self.step();
        let coeff = Complex64::new(0.0, -self.lambda);
        let mut acc = vec![Complex64::new(0.0, 0.0); k2.len()];
        let mut partial = Vec::with_capacity(g.len());
        partial.push(acc.clone());
        for w in g.windows(2) {
            for ((a, x), y) in acc.iter_mut().zip(&w[0]).zip(&w[1]) {
                *a += half_tau * (x + y);
            }
            partial.push(acc.clone());
        }
        let fields: Vec<FieldState> = partial
            .into_par_iter()
            .zip(self.times.par_iter())
            .map(|(s, &t)| {
                let mut v: Vec<Complex64> = self
                    .anchor_spectrum
                    .iter()
                    .zip(&s)
                    .zip(k2)
                    .map(|((a, i), &k)| (a + coeff * i) * Complex64::from_polar(1.0, -(t - t0) * k))
                    .collect();
                self.ops.inverse(&mut v);
                FieldState {
                    grid: self.anchor.grid,
                    values: v,
                    frame: self.anchor.frame,
                    time: t,
                }
            })
            .collect();
        Ok(SampledField::new(self.times.clone(), fields))
    }
}

/// One application of the Duhamel map anchored at `interval.0`; `u` must be
/// sampled on the uniform mesh of `interval` with `u.len() - 1` steps.
pub fn duhamel_map(
    initial: &FieldState,
    u: &SampledField,
    h: &dyn Fn(f64) -> f64,
    interval: (f64, f64),
    model: &NoiseModel,
) -> Result<SampledField, PicardError> {
    if u.len() < 2 {
        return Err(PicardError::MeshMismatch("need at least two samples".into()));
    }
    DuhamelMap::new(initial, h, interval, u.len() - 1, model)?.apply(u)
}
