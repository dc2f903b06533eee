use num_complex::Complex64;

use super::{FieldState, SpectralError, SpectralOps};

/// `e^{i dt Δ} f`, computed exactly in Fourier space. Negative `dt` runs
/// the group backwards.
pub fn free_propagate(f: &FieldState, dt: f64) -> Result<FieldState, SpectralError> {
    f.ensure_finite()?;
    if !dt.is_finite() {
        return Err(SpectralError::NonFinite);
    }
    let ops = SpectralOps::new(&f.grid);
    Ok(ops.propagate_state(f, dt))
}

/// Riemann-sum `L^p` norm of raw grid values (`p = ∞` reads the grid maximum).
pub fn lp_norm_values(values: &[Complex64], cell_volume: f64, p: f64) -> f64 {
    lp_norm_moduli(values.iter().map(|z| z.norm()), cell_volume, p)
}

/// Same as [`lp_norm_values`] but on precomputed moduli.
pub fn lp_norm_moduli(moduli: impl Iterator<Item = f64>, cell_volume: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return moduli.fold(0.0, f64::max);
    }
    if p == 2.0 {
        return (moduli.map(|a| a * a).sum::<f64>() * cell_volume).sqrt();
    }
    // Normalize by the maximum to keep large exponents in range.
    let moduli: Vec<f64> = moduli.collect();
    let peak = moduli.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let sum: f64 = moduli.iter().map(|a| (a / peak).powf(p)).sum();
    peak * (sum * cell_volume).powf(1.0 / p)
}

/// `‖f‖_{L^p}` on the grid, `p ∈ [1, ∞]`.
pub fn lebesgue_norm(f: &FieldState, p: f64) -> Result<f64, SpectralError> {
    if !(p >= 1.0) {
        return Err(SpectralError::InvalidExponent(p));
    }
    f.ensure_finite()?;
    Ok(lp_norm_values(&f.values, f.grid.cell_volume(), p))
}

pub fn mass(f: &FieldState) -> f64 {
    f.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * f.grid.cell_volume()
}

/// `‖f‖_{H¹} = (‖f‖₂² + ‖∇f‖₂²)^{1/2}` with a spectral gradient.
pub fn sobolev_h1_norm(f: &FieldState) -> Result<f64, SpectralError> {
    f.ensure_finite()?;
    let ops = SpectralOps::new(&f.grid);
    Ok(h1_norm_with(&ops, &f.values))
}

pub fn h1_norm_with(ops: &SpectralOps, values: &[Complex64]) -> f64 {
    let mut s = values.to_vec();
    ops.forward(&mut s);
    (ops.mass_from_spectrum(&s) + ops.gradient_norm_sq_from_spectrum(&s)).sqrt()
}

pub fn gradient_norm_with(ops: &SpectralOps, values: &[Complex64]) -> f64 {
    let mut s = values.to_vec();
    ops.forward(&mut s);
    ops.gradient_norm_sq_from_spectrum(&s).sqrt()
}

/// `‖f‖_{W^{1,p}} = ‖f‖_{L^p} + ‖ |∇f| ‖_{L^p}`.
pub fn w1p_norm_with(ops: &SpectralOps, values: &[Complex64], p: f64) -> f64 {
    let dv = ops.grid().cell_volume();
    let grad = ops.gradient_modulus(values);
    lp_norm_values(values, dv, p) + lp_norm_moduli(grad.into_iter(), dv, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, Frame};

    #[test]
    fn constant_field_l2_is_sqrt_volume() {
        let grid = make_grid(2, 16, 3.0).unwrap();
        let f = FieldState::from_fn(grid, Frame::Physical, 0.0, |_| Complex64::new(1.0, 0.0));
        let v = lebesgue_norm(&f, 2.0).unwrap();
        assert!((v - 3.0).abs() < 1e-13);
        assert_eq!(lebesgue_norm(&f, f64::INFINITY).unwrap(), 1.0);
        // gradient vanishes, so H¹ equals L².
        assert!((sobolev_h1_norm(&f).unwrap() - v).abs() < 1e-12);
    }

    #[test]
    fn plane_wave_h1() {
        let grid = make_grid(1, 32, 2.0 * std::f64::consts::PI).unwrap();
        let a = Complex64::new(0.5, -1.5);
        let xi = 4.0;
        let f = FieldState::from_fn(grid, Frame::Physical, 0.0, |x| a * Complex64::from_polar(1.0, xi * x[0]));
        let h1 = sobolev_h1_norm(&f).unwrap();
        let expect = a.norm_sqr() * grid.volume() * (1.0 + xi * xi);
        assert!((h1 * h1 - expect).abs() < 1e-11 * expect);
    }

    #[test]
    fn invalid_exponent() {
        let grid = make_grid(1, 8, 1.0).unwrap();
        let f = FieldState::zeros(grid, Frame::Physical, 0.0);
        assert!(lebesgue_norm(&f, 0.5).is_err());
        assert_eq!(lebesgue_norm(&f, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_input_rejected() {
        let grid = make_grid(1, 8, 1.0).unwrap();
        let mut f = FieldState::zeros(grid, Frame::Physical, 0.0);
        f.values[3] = Complex64::new(f64::NAN, 0.0);
        assert!(free_propagate(&f, 0.1).is_err());
    }

    #[test]
    fn zero_step_is_identity() {
        let grid = make_grid(1, 16, 4.0).unwrap();
        let f = FieldState::from_fn(grid, Frame::Physical, 0.0, |x| Complex64::new((-x[0] * x[0]).exp(), x[0]));
        let g = free_propagate(&f, 0.0).unwrap();
        assert_eq!(g.values, f.values);
    }
}
