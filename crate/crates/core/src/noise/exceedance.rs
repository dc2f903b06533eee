//! Probability that `h_c` exceeds `ε` after time `‖c‖⁻¹`.
//!
//! With `M = Σ c_k β_k` time-changed to a standard Brownian motion `B̃`
//! (`⟨M⟩(t) = ‖c‖² t`), the event `sup_{t ≥ ‖c‖⁻¹} h_c(t) > ε` becomes
//! `sup_{τ ≥ s} (B̃(τ) - τ) > a` with `s = ‖c‖` and `a = ln ε / (α - 1)`.
//!
//! Closed form: writing `sup_{τ ≥ s}(B̃(τ) - τ) = X + Y` with
//! `X = B̃(s) - s ~ N(-s, s)` and `Y ~ Exp(2)` independent (running maximum of
//! Brownian motion with unit negative drift),
//!
//! ```text
//! P = Φ̄((a + s)/√s) + e^{-2a} Φ((a - s)/√s).
//! ```

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::stats::{normal_cdf, normal_sf, EstimateMethod, ProbabilityEstimate};
use super::{derived_seed, rng_from_seed, NoiseError, NoiseModel};

/// Reduced barrier `a = ln ε / (α - 1)`.
pub fn reduced_barrier(epsilon: f64, alpha: f64) -> f64 {
    epsilon.ln() / (alpha - 1.0)
}

/// `P(sup_{τ ≥ s} (B(τ) - τ) > a)` for a standard Brownian motion `B`.
pub fn closed_form_exceedance(s: f64, a: f64) -> f64 {
    let root = s.sqrt();
    let first = normal_sf((a + s) / root);
    let tail = normal_cdf((a - s) / root);
    let second = if tail > 0.0 { (-2.0 * a + tail.ln()).exp() } else { 0.0 };
    (first + second).min(1.0)
}

/// Truncation and step parameters of the reduced-process simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedMcParams {
    pub dt: f64,
    /// Simulated length after `s`; defaults to `20 + 10/s`.
    pub horizon: f64,
    /// A path is abandoned once it sits this far below the barrier; its
    /// remaining crossing probability is `e^{-2·gap}`.
    pub abandon_gap: f64,
}

impl ReducedMcParams {
    pub fn default_for(s: f64) -> Self {
        Self {
            dt: 1e-3,
            horizon: 20.0 + 10.0 / s,
            abandon_gap: 3.0 * std::f64::consts::LN_10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PathOutcome {
    Hit,
    Miss,
    Alive,
}

/// Bridge crossing probabilities below `e^{-40}` are skipped.
const BRIDGE_CUTOFF: f64 = 20.0;

/// One reduced path: exact `B(s)`, then Euler steps of `dB - dτ` with the
/// Brownian-bridge crossing probability between mesh points.
fn reduced_path<R: Rng>(s: f64, a: f64, params: &ReducedMcParams, rng: &mut R) -> PathOutcome {
    let z: f64 = rng.sample(StandardNormal);
    let mut x = -s + s.sqrt() * z;
    if x > a {
        return PathOutcome::Hit;
    }
    let dt = params.dt;
    let sd = dt.sqrt();
    let steps = (params.horizon / dt).ceil() as usize;
    for _ in 0..steps {
        let z: f64 = rng.sample(StandardNormal);
        let x1 = x - dt + sd * z;
        if x1 > a {
            return PathOutcome::Hit;
        }
        let prod = (a - x) * (a - x1);
        if prod < BRIDGE_CUTOFF * dt {
            let p = (-2.0 * prod / dt).exp();
            if rng.random::<f64>() < p {
                return PathOutcome::Hit;
            }
        }
        x = x1;
        if a - x > params.abandon_gap {
            return PathOutcome::Miss;
        }
    }
    PathOutcome::Alive
}

/// Monte Carlo estimate of `P(sup_{τ ≥ s}(B(τ) - τ) > a)`.
pub fn monte_carlo_exceedance(s: f64, a: f64, n_samples: u64, seed: u64, params: &ReducedMcParams) -> ProbabilityEstimate {
    let (hits, alive) = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derived_seed(seed, i));
            match reduced_path(s, a, params, &mut rng) {
                PathOutcome::Hit => (1u64, 0u64),
                PathOutcome::Miss => (0, 0),
                PathOutcome::Alive => (0, 1),
            }
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    let steps = (params.horizon / params.dt).ceil();
    let tail = (-2.0 * params.abandon_gap).exp() + steps * (-2.0 * BRIDGE_CUTOFF).exp() + alive as f64 / n_samples.max(1) as f64;
    let mut est = ProbabilityEstimate::from_counts(hits, n_samples);
    est.tail_bound = Some(tail);
    est.seed = Some(seed);
    est
}

/// `P(sup_{t ≥ ‖c‖⁻¹} h_c(t) > ε)`.
pub fn decay_exceedance_probability(
    c_norm: f64,
    epsilon: f64,
    alpha: f64,
    method: EstimateMethod,
    n_samples: u64,
    seed: u64,
) -> Result<ProbabilityEstimate, NoiseError> {
    if !(c_norm > 0.0 && c_norm.is_finite()) {
        return Err(NoiseError::InvalidInput(format!("c_norm must be positive, got {c_norm}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(NoiseError::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(alpha > 1.0) {
        return Err(NoiseError::InvalidInput(format!("alpha must exceed 1, got {alpha}")));
    }
    let a = reduced_barrier(epsilon, alpha);
    match method {
        EstimateMethod::ClosedForm => Ok(ProbabilityEstimate::exact(closed_form_exceedance(c_norm, a))),
        EstimateMethod::MonteCarlo => {
            if n_samples == 0 {
                return Err(NoiseError::InvalidInput("n_samples must be positive".into()));
            }
            Ok(monte_carlo_exceedance(c_norm, a, n_samples, seed, &ReducedMcParams::default_for(c_norm)))
        }
    }
}

/// Discrete running supremum of `B(τ) - τ` over `τ ∈ [s, s + horizon]` on
/// the mesh `τ = s + j·dt`, with `B(s)` drawn exactly.
pub fn reduced_running_sup(s: f64, dt: f64, horizon: f64, seed: u64) -> f64 {
    let mut rng = rng_from_seed(seed);
    let z: f64 = rng.sample(StandardNormal);
    let mut x = -s + s.sqrt() * z;
    let mut sup = x;
    let sd = dt.sqrt();
    let steps = (horizon / dt).round() as usize;
    for _ in 0..steps {
        let z: f64 = rng.sample(StandardNormal);
        x += -dt + sd * z;
        sup = sup.max(x);
    }
    sup
}

/// Discrete running supremum of `M(t) - ‖c‖² t` over the mesh points
/// `t ≥ ‖c‖⁻¹` up to `‖c‖⁻¹ + horizon/‖c‖²`, simulating every mode of
/// `model` directly at step `dt / ‖c‖²`.
///
/// The time change maps this onto [`reduced_running_sup`] with the same
/// `(dt, horizon)`, which is what the scale-identity test checks.
pub fn direct_running_sup(model: &NoiseModel, dt: f64, horizon: f64, seed: u64) -> f64 {
    let c = model.c();
    let c2 = model.c_norm_sq();
    let dt_m = dt / c2;
    let sd = dt_m.sqrt();
    let start = ((1.0 / model.c_norm) / dt_m).round() as usize;
    let steps = start + (horizon / dt).round() as usize;
    let mut rng = rng_from_seed(seed);
    let mut m = 0.0;
    let mut sup = f64::NEG_INFINITY;
    for j in 1..=steps {
        for ck in &c {
            let z: f64 = rng.sample(StandardNormal);
            m += ck * sd * z;
        }
        if j >= start {
            sup = sup.max(m - c2 * j as f64 * dt_m);
        }
    }
    sup
}

/// Largest value of `B(t)/√(2t ln ln t)` over `t ∈ [e^e, horizon]` across
/// `n_paths` simulated paths. Informational only.
pub fn lil_statistic(horizon: f64, dt: f64, n_paths: u64, seed: u64) -> f64 {
    let t_min = std::f64::consts::E.exp();
    (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derived_seed(seed, i));
            let sd = dt.sqrt();
            let mut b = 0.0;
            let mut best = f64::NEG_INFINITY;
            let steps = (horizon / dt).round() as usize;
            for j in 1..=steps {
                let z: f64 = rng.sample(StandardNormal);
                b += sd * z;
                let t = j as f64 * dt;
                if t >= t_min {
                    best = best.max(b / (2.0 * t * t.ln().ln()).sqrt());
                }
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_at_zero_barrier() {
        let expect = 2.0 * normal_cdf(-1.0);
        assert!((closed_form_exceedance(1.0, 0.0) - expect).abs() < 1e-15);
        assert!((expect - 0.3173).abs() < 1e-4);
    }

    #[test]
    fn closed_form_limits() {
        // Very low barrier: the supremum exceeds it almost surely.
        assert!(closed_form_exceedance(2.0, -50.0) > 1.0 - 1e-12);
        // Very high barrier: essentially never.
        assert!(closed_form_exceedance(2.0, 30.0) < 1e-20);
    }

    #[test]
    fn closed_form_decreases_in_strength() {
        let a = reduced_barrier(0.5, 5.0);
        let v: Vec<f64> = [1.0, 2.0, 4.0, 8.0].iter().map(|&s| closed_form_exceedance(s, a)).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
        assert!(v[3] < 0.05);
    }

    #[test]
    fn tiny_epsilon_gives_probability_near_one() {
        let e = decay_exceedance_probability(1.0, 1e-30, 5.0, EstimateMethod::ClosedForm, 0, 0).unwrap();
        assert!(e.p_hat > 0.999);
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        assert!(decay_exceedance_probability(0.0, 0.5, 5.0, EstimateMethod::ClosedForm, 0, 0).is_err());
        assert!(decay_exceedance_probability(1.0, -0.5, 5.0, EstimateMethod::ClosedForm, 0, 0).is_err());
        assert!(decay_exceedance_probability(1.0, 0.5, 5.0, EstimateMethod::MonteCarlo, 0, 0).is_err());
    }

    #[test]
    fn monte_carlo_is_deterministic_per_seed() {
        let p = ReducedMcParams::default_for(2.0);
        let a = monte_carlo_exceedance(2.0, 0.0, 200, 5, &p);
        let b = monte_carlo_exceedance(2.0, 0.0, 200, 5, &p);
        assert_eq!(a, b);
        assert!(a.tail_bound.unwrap() < 1e-4);
    }
}
