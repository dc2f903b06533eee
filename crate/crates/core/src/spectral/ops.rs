use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlannerScalar};

use super::{FieldState, GridSpec};

/// FFT plans and wavenumber tables for one grid.
///
/// Plans are immutable and `Sync`; scratch space is allocated per call, so a
/// single instance can be shared across worker threads.
#[derive(Clone)]
pub struct SpectralOps {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k_axis: Vec<f64>,
    k_sq: Vec<f64>,
}

impl std::fmt::Debug for SpectralOps {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralOps").field("grid", &self.grid).finish()
    }
}

impl SpectralOps {
    pub fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlannerScalar::new();
        Self {
            grid: *grid,
            forward: planner.plan_fft_forward(grid.n()),
            inverse: planner.plan_fft_inverse(grid.n()),
            k_axis: grid.wavenumbers(),
            k_sq: grid.wavenumber_squared(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `|k|^2` per flat spectral index.
    pub fn k_squared(&self) -> &[f64] {
        &self.k_sq
    }

    /// Unnormalized forward transform over every axis.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, self.forward.as_ref());
    }

    /// Inverse transform, normalized so that `inverse(forward(f)) = f`.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, self.inverse.as_ref());
        let scale = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
    }

    fn transform(&self, buf: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.grid.n();
        let dim = self.grid.dim();
        debug_assert_eq!(buf.len(), self.grid.len());
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                fft.process_with_scratch(buf, &mut scratch);
                continue;
            }
            let block = n * stride;
            for start in (0..buf.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (j, z) in line.iter_mut().enumerate() {
                        *z = buf[base + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, z) in line.iter().enumerate() {
                        buf[base + j * stride] = *z;
                    }
                }
            }
        }
    }

    /// Multiplies a spectrum by the free Schrödinger symbol `e^{-i dt |k|^2}`.
    pub fn apply_free_symbol(&self, spectrum: &mut [Complex64], dt: f64) {
        for (z, &k2) in spectrum.iter_mut().zip(&self.k_sq) {
            *z *= Complex64::from_polar(1.0, -dt * k2);
        }
    }

    /// Applies `e^{i dt Δ}` to physical-space values in place.
    pub fn propagate(&self, values: &mut [Complex64], dt: f64) {
        if dt == 0.0 {
            return;
        }
        self.forward(values);
        self.apply_free_symbol(values, dt);
        self.inverse(values);
    }

    /// `‖∇f‖₂²` from an unnormalized spectrum (Parseval).
    pub fn gradient_norm_sq_from_spectrum(&self, spectrum: &[Complex64]) -> f64 {
        let sum: f64 = spectrum
            .iter()
            .zip(&self.k_sq)
            .map(|(z, k2)| k2 * z.norm_sqr())
            .sum();
        sum * self.grid.cell_volume() / spectrum.len() as f64
    }

    /// `‖f‖₂²` from an unnormalized spectrum (Parseval).
    pub fn mass_from_spectrum(&self, spectrum: &[Complex64]) -> f64 {
        let sum: f64 = spectrum.iter().map(|z| z.norm_sqr()).sum();
        sum * self.grid.cell_volume() / spectrum.len() as f64
    }

    /// Spectral partial derivatives, one physical-space array per axis.
    pub fn gradient(&self, values: &[Complex64]) -> Vec<Vec<Complex64>> {
        let mut spectrum = values.to_vec();
        self.forward(&mut spectrum);
        (0..self.grid.dim())
            .map(|axis| {
                let mut d: Vec<Complex64> = spectrum
                    .iter()
                    .enumerate()
                    .map(|(i, z)| {
                        let k = self.k_axis[self.grid.unravel(i)[axis]];
                        z * Complex64::new(0.0, k)
                    })
                    .collect();
                self.inverse(&mut d);
                d
            })
            .collect()
    }

    /// Pointwise `|∇f|` from the spectral gradient.
    pub fn gradient_modulus(&self, values: &[Complex64]) -> Vec<f64> {
        let grads = self.gradient(values);
        (0..values.len())
            .map(|i| grads.iter().map(|g| g[i].norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    /// Spectral Laplacian of physical-space values.
    pub fn laplacian(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut s = values.to_vec();
        self.forward(&mut s);
        for (z, &k2) in s.iter_mut().zip(&self.k_sq) {
            *z *= -k2;
        }
        self.inverse(&mut s);
        s
    }

    /// Free evolution of a field state by `dt` (time tag advanced by `dt`).
    pub fn propagate_state(&self, f: &FieldState, dt: f64) -> FieldState {
        let mut out = f.clone();
        self.propagate(&mut out.values, dt);
        out.time += dt;
        out
    }
}
