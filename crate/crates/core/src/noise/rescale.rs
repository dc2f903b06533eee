use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BrownianPath, NoiseError, NoiseModel};
use crate::spectral::{FieldState, Frame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RescaleDirection {
    ToRescaled,
    ToPhysical,
}

/// Scalar `e^{μ̂t - W(t)}` mapping `X(t)` to `u(t)`.
pub fn rescale_factor(path: &BrownianPath, model: &NoiseModel, t: f64) -> Result<Complex64, NoiseError> {
    let w = path.w_at(t)?;
    Ok((model.mu_hat * t - w).exp())
}

/// Applies `u = e^{μ̂t - W(t)} X` (or its inverse) at the field's time.
pub fn rescale(
    f: &FieldState,
    path: &BrownianPath,
    model: &NoiseModel,
    direction: RescaleDirection,
) -> Result<FieldState, NoiseError> {
    let (expected, target) = match direction {
        RescaleDirection::ToRescaled => (Frame::Physical, Frame::Rescaled),
        RescaleDirection::ToPhysical => (Frame::Rescaled, Frame::Physical),
    };
    if f.frame != expected {
        return Err(NoiseError::FrameMismatch {
            expected,
            found: f.frame,
        });
    }
    let z = rescale_factor(path, model, f.time)?;
    let factor = match direction {
        RescaleDirection::ToRescaled => z,
        RescaleDirection::ToPhysical => z.inv(),
    };
    let mut out = f.scaled(factor);
    out.frame = target;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{build_noise_model, sample_path};
    use crate::spectral::make_grid;

    fn field(t: f64) -> FieldState {
        let grid = make_grid(1, 16, 8.0).unwrap();
        FieldState::from_fn(grid, Frame::Physical, t, |x| Complex64::new((-x[0] * x[0]).exp(), 0.2 * x[0]))
    }

    #[test]
    fn identity_at_time_zero() {
        let m = build_noise_model(vec![Complex64::new(1.0, 0.7)], 5.0, -1.0, 1).unwrap();
        let p = sample_path(&m, 0.01, 1.0, 1).unwrap();
        let u = rescale(&field(0.0), &p, &m, RescaleDirection::ToRescaled).unwrap();
        assert_eq!(u.values, field(0.0).values);
        assert_eq!(u.frame, Frame::Rescaled);
    }

    #[test]
    fn conservative_noise_keeps_modulus() {
        let m = build_noise_model(vec![Complex64::new(0.0, 1.5), Complex64::new(0.0, -0.4)], 5.0, -1.0, 1).unwrap();
        let p = sample_path(&m, 0.01, 1.0, 2).unwrap();
        let x = field(0.73);
        let u = rescale(&x, &p, &m, RescaleDirection::ToRescaled).unwrap();
        for (a, b) in u.values.iter().zip(&x.values) {
            assert!((a.norm() - b.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn roundtrip_and_frame_check() {
        let m = build_noise_model(vec![Complex64::new(2.0, -0.5)], 5.0, -1.0, 1).unwrap();
        let p = sample_path(&m, 0.01, 1.0, 3).unwrap();
        let x = field(0.5);
        let u = rescale(&x, &p, &m, RescaleDirection::ToRescaled).unwrap();
        assert!(matches!(
            rescale(&u, &p, &m, RescaleDirection::ToRescaled),
            Err(NoiseError::FrameMismatch { .. })
        ));
        let back = rescale(&u, &p, &m, RescaleDirection::ToPhysical).unwrap();
        for (a, b) in back.values.iter().zip(&x.values) {
            assert!((a - b).norm() <= 1e-13 * b.norm().max(1e-300) + 1e-300);
        }
        assert!(rescale(&field(0.005), &p, &m, RescaleDirection::ToRescaled).is_err());
    }
}
