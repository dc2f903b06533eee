use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{NoiseError, NoiseModel};

/// Deterministic RNG for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-index seed used by every parallel Monte Carlo loop.
pub fn derived_seed(base: u64, index: u64) -> u64 {
    base ^ index
}

/// Sampled Brownian drivers on a uniform mesh `t_j = j·dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownianPath {
    pub dt: f64,
    pub steps: usize,
    /// `increments[k][j] = β_k(t_{j+1}) - β_k(t_j)`.
    pub increments: Vec<Vec<f64>>,
    /// `M(t_j) = Σ c_k β_k(t_j)`.
    pub m: Vec<f64>,
    /// `W(t_j) = Σ φ_k β_k(t_j)`.
    pub w: Vec<Complex64>,
    pub seed: u64,
}

impl BrownianPath {
    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn modes(&self) -> usize {
        self.increments.len()
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    /// Mesh index of `t`, or `OffMesh` if `t` is not a mesh time.
    pub fn index_of(&self, t: f64) -> Result<usize, NoiseError> {
        let k = (t / self.dt).round();
        let tol = 1e-9 * self.dt.max(t.abs());
        if !t.is_finite() || k < 0.0 || k as usize > self.steps || (t - k * self.dt).abs() > tol {
            return Err(NoiseError::OffMesh(t));
        }
        Ok(k as usize)
    }

    pub fn m_at(&self, t: f64) -> Result<f64, NoiseError> {
        Ok(self.m[self.index_of(t)?])
    }

    pub fn w_at(&self, t: f64) -> Result<Complex64, NoiseError> {
        Ok(self.w[self.index_of(t)?])
    }

    /// `β_k(t_j)` for one mode, accumulated from the increments.
    pub fn beta(&self, mode: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.steps + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for inc in &self.increments[mode] {
            acc += inc;
            out.push(acc);
        }
        out
    }
}

/// Samples independent Brownian motions for every mode of `model`.
pub fn sample_path(model: &NoiseModel, dt: f64, horizon: f64, seed: u64) -> Result<BrownianPath, NoiseError> {
    let mut rng = rng_from_seed(seed);
    sample_path_with(model, dt, horizon, seed, &mut rng)
}

/// Like [`sample_path`] but draws from a caller-owned RNG; `seed` is only recorded.
pub fn sample_path_with<R: Rng + ?Sized>(
    model: &NoiseModel,
    dt: f64,
    horizon: f64,
    seed: u64,
    rng: &mut R,
) -> Result<BrownianPath, NoiseError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(NoiseError::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    if !(horizon >= dt && horizon.is_finite()) {
        return Err(NoiseError::InvalidInput(format!("horizon {horizon} shorter than dt {dt}")));
    }
    let steps = (horizon / dt - 1e-9).ceil() as usize;
    let modes = model.modes();
    let sd = dt.sqrt();
    let mut increments = vec![Vec::with_capacity(steps); modes];
    let mut m = Vec::with_capacity(steps + 1);
    let mut w = Vec::with_capacity(steps + 1);
    let mut m_acc = 0.0;
    let mut w_acc = Complex64::new(0.0, 0.0);
    m.push(0.0);
    w.push(w_acc);
    for _ in 0..steps {
        for (k, phi) in model.phi.iter().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            let inc = sd * z;
            increments[k].push(inc);
            m_acc += phi.re * inc;
            w_acc += phi * inc;
        }
        m.push(m_acc);
        w.push(w_acc);
    }
    Ok(BrownianPath {
        dt,
        steps,
        increments,
        m,
        w,
        seed,
    })
}

/// Geometric Brownian motion `h_c(t) = exp((α-1)(M(t) - ‖c‖² t))` on the path mesh.
pub fn eval_gbm(path: &BrownianPath, model: &NoiseModel, t: f64) -> Result<f64, NoiseError> {
    let j = path.index_of(t)?;
    Ok(gbm_at_index(path, model, j))
}

pub fn gbm_at_index(path: &BrownianPath, model: &NoiseModel, j: usize) -> f64 {
    let t = path.time(j);
    ((model.alpha - 1.0) * (path.m[j] - model.c_norm_sq() * t)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::build_noise_model;

    fn model(phi: Vec<Complex64>) -> NoiseModel {
        build_noise_model(phi, 5.0, -1.0, 1).unwrap()
    }

    #[test]
    fn starts_at_zero_and_is_deterministic() {
        let m = model(vec![Complex64::new(1.0, 0.5), Complex64::new(-0.3, 0.0)]);
        let a = sample_path(&m, 0.01, 1.0, 7).unwrap();
        let b = sample_path(&m, 0.01, 1.0, 7).unwrap();
        assert_eq!(a.m[0], 0.0);
        assert_eq!(a.w[0], Complex64::new(0.0, 0.0));
        assert_eq!(a, b);
        assert_eq!(a.steps, 100);
        let c = sample_path(&m, 0.01, 1.0, 8).unwrap();
        assert_ne!(a.m, c.m);
    }

    #[test]
    fn aggregates_match_modes() {
        let m = model(vec![Complex64::new(1.0, 0.5), Complex64::new(-0.3, 2.0)]);
        let p = sample_path(&m, 0.05, 2.0, 3).unwrap();
        let b0 = p.beta(0);
        let b1 = p.beta(1);
        for j in 0..=p.steps {
            let m_j = 1.0 * b0[j] - 0.3 * b1[j];
            assert!((p.m[j] - m_j).abs() < 1e-12);
            let w_j = m.phi[0] * b0[j] + m.phi[1] * b1[j];
            assert!((p.w[j] - w_j).norm() < 1e-12);
        }
    }

    #[test]
    fn gbm_basics() {
        let m = model(vec![Complex64::new(1.3, 0.0)]);
        let p = sample_path(&m, 0.01, 1.0, 11).unwrap();
        assert_eq!(eval_gbm(&p, &m, 0.0).unwrap(), 1.0);
        for j in 0..=p.steps {
            let t = p.time(j);
            let h = eval_gbm(&p, &m, t).unwrap();
            assert!(h > 0.0);
            let replay = (4.0 * (p.m[j] - 1.69 * t)).exp();
            assert!((h - replay).abs() <= 1e-12 * replay);
        }
        assert!(matches!(eval_gbm(&p, &m, 0.005), Err(NoiseError::OffMesh(_))));
        assert!(eval_gbm(&p, &m, 2.0).is_err());

        let conservative = model(vec![Complex64::new(0.0, 2.0)]);
        let p = sample_path(&conservative, 0.01, 1.0, 11).unwrap();
        for j in 0..=p.steps {
            assert_eq!(gbm_at_index(&p, &conservative, j), 1.0);
        }
    }

    #[test]
    fn rejects_bad_mesh() {
        let m = model(vec![Complex64::new(1.0, 0.0)]);
        assert!(sample_path(&m, 0.0, 1.0, 0).is_err());
        assert!(sample_path(&m, 0.1, 0.05, 0).is_err());
    }
}
