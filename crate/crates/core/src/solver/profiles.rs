use num_complex::Complex64;

use super::SolverError;
use crate::spectral::{lp_norm_values, FieldState, Frame, GridSpec, SpectralOps};

/// `A exp(-|x|²/(2w²))`.
pub fn gaussian(grid: GridSpec, frame: Frame, amplitude: f64, width: f64) -> FieldState {
    let s = 0.5 / (width * width);
    FieldState::from_fn(grid, frame, 0.0, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        Complex64::new(amplitude * (-s * r2).exp(), 0.0)
    })
}

/// `Q(x) = 3^{1/4} sech^{1/2}(2x)`, the positive solution of `Q'' - Q + Q⁵ = 0`.
pub fn ground_state_value(x: f64) -> f64 {
    let y = 2.0 * x.abs();
    // sech y = 2e^{-y}/(1 + e^{-2y}) without overflow
    let e = (-y).exp();
    let sech = 2.0 * e / (1.0 + e * e);
    3f64.powf(0.25) * sech.sqrt()
}

/// `scale · Q` sampled on a one-dimensional grid.
pub fn ground_state(grid: GridSpec, frame: Frame, scale: f64) -> Result<FieldState, SolverError> {
    if grid.dim() != 1 {
        return Err(SolverError::InvalidConfig(format!(
            "ground state is one-dimensional, grid has dim {}",
            grid.dim()
        )));
    }
    Ok(FieldState::from_fn(grid, frame, 0.0, |x| {
        Complex64::new(scale * ground_state_value(x[0]), 0.0)
    }))
}

/// Residual of `Q'' - Q + Q⁵` on the grid with a spectral second derivative:
/// returns `(max |r|, ‖r‖₂)`.
pub fn ground_state_residual(grid: GridSpec) -> Result<(f64, f64), SolverError> {
    let q = ground_state(grid, Frame::Rescaled, 1.0)?;
    let ops = SpectralOps::new(&grid);
    let lap = ops.laplacian(&q.values);
    let r: Vec<Complex64> = lap
        .iter()
        .zip(&q.values)
        .map(|(l, v)| l - v + v.powu(5))
        .collect();
    let sup = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((sup, lp_norm_values(&r, grid.cell_volume(), 2.0)))
}
