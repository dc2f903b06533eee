use num_complex::Complex64;

use super::SolverError;
use crate::noise::{BrownianPath, NoiseModel};
use crate::spectral::FieldState;

/// `|z|^{e}` computed from `|z|²`, with fast paths for the common exponents.
#[inline]
pub fn modulus_pow(z: Complex64, exponent: f64) -> f64 {
    let r2 = z.norm_sqr();
    if exponent == 4.0 {
        r2 * r2
    } else if exponent == 2.0 {
        r2
    } else if exponent == 1.0 {
        r2.sqrt()
    } else if r2 == 0.0 {
        0.0
    } else {
        r2.powf(0.5 * exponent)
    }
}

/// In-place exact flow of `i u_t = λ h |u|^{α-1} u` over `dt`.
pub fn apply_nonlinear_phase(values: &mut [Complex64], lambda_h_dt: f64, alpha: f64) {
    if lambda_h_dt == 0.0 {
        return;
    }
    let e = alpha - 1.0;
    for z in values.iter_mut() {
        let phase = -lambda_h_dt * modulus_pow(*z, e);
        *z *= Complex64::from_polar(1.0, phase);
    }
}

/// `u ← e^{-iλ h |u|^{α-1} dt} u` pointwise; `|u|` is unchanged.
pub fn nonlinear_phase_step(f: &FieldState, h_value: f64, dt: f64, model: &NoiseModel) -> FieldState {
    let mut out = f.clone();
    apply_nonlinear_phase(&mut out.values, model.lambda * h_value * dt, model.alpha);
    out
}

/// Scalar `e^{ΔW - μ̂Δt}` solving `dX = -μX dt + X dW` exactly between two mesh indices.
pub fn noise_multiplier(path: &BrownianPath, model: &NoiseModel, j_from: usize, j_to: usize) -> Complex64 {
    let dw = path.w[j_to] - path.w[j_from];
    let dt = (j_to as f64 - j_from as f64) * path.dt;
    (dw - model.mu_hat * dt).exp()
}

/// Exact Itô solution of the noise substep from `t_from` to `t_to`.
pub fn noise_multiplier_step(
    f: &FieldState,
    path: &BrownianPath,
    model: &NoiseModel,
    t_from: f64,
    t_to: f64,
) -> Result<FieldState, SolverError> {
    let j_from = path.index_of(t_from)?;
    let j_to = path.index_of(t_to)?;
    let z = noise_multiplier(path, model, j_from, j_to);
    let mut out = f.scaled(z);
    out.time = f.time + (t_to - t_from);
    Ok(out)
}
