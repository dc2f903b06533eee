use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NoiseError;

/// Whether the nonlinearity is scale-invariant in `L²` (`α = 1 + 4/d`) or
/// in `Ḣ¹` (`α = 1 + 4/(d-2)`, `d ≥ 3`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criticality {
    MassCritical,
    EnergyCritical,
}

impl Criticality {
    /// Regularity index `s(α)`: 0 for mass-critical, 1 for energy-critical.
    pub fn regularity(self) -> u8 {
        match self {
            Criticality::MassCritical => 0,
            Criticality::EnergyCritical => 1,
        }
    }
}

pub fn mass_critical_exponent(d: usize) -> f64 {
    1.0 + 4.0 / d as f64
}

pub fn energy_critical_exponent(d: usize) -> Option<f64> {
    (d >= 3).then(|| 1.0 + 4.0 / (d as f64 - 2.0))
}

/// Sign for which `e^{it} Q` with `Q'' - Q + Q⁵ = 0` solves the `d = 1`
/// quintic equation `i u_t + u_xx = λ |u|⁴ u`.
pub const SOLITON_SIGN: f64 = -1.0;

/// Constant noise coefficients `φ_k` together with the nonlinearity data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub phi: Vec<Complex64>,
    pub alpha: f64,
    /// Raw coefficient in front of `|u|^{α-1} u`: `-1`, `+1`, or `0`
    /// (nonlinearity switched off).
    pub lambda: f64,
    pub dim: usize,
    pub criticality: Criticality,
    /// `μ = ½ Σ |φ_k|²`.
    pub mu: f64,
    /// `μ̂ = ½ Σ (|φ_k|² + φ_k²)`.
    pub mu_hat: Complex64,
    /// `‖c‖ = (Σ (Re φ_k)²)^{1/2}`.
    pub c_norm: f64,
}

pub fn build_noise_model(
    phi: Vec<Complex64>,
    alpha: f64,
    lambda: f64,
    dim: usize,
) -> Result<NoiseModel, NoiseError> {
    let criticality = if (alpha - mass_critical_exponent(dim)).abs() < 1e-12 {
        Criticality::MassCritical
    } else if energy_critical_exponent(dim).is_some_and(|e| (alpha - e).abs() < 1e-12) {
        Criticality::EnergyCritical
    } else {
        return Err(NoiseError::ExponentDimensionMismatch { alpha, dim });
    };
    if ![-1.0, 0.0, 1.0].contains(&lambda) {
        return Err(NoiseError::InvalidInput(format!("lambda must be -1, 0 or 1, got {lambda}")));
    }
    if phi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(NoiseError::InvalidInput("non-finite noise coefficient".into()));
    }
    let mu = 0.5 * phi.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mu_hat = 0.5 * phi.iter().map(|z| z.norm_sqr() + z * z).sum::<Complex64>();
    let c_norm = phi.iter().fold(0.0, |acc, z| acc + z.re * z.re).sqrt();
    Ok(NoiseModel {
        phi,
        alpha,
        lambda,
        dim,
        criticality,
        mu,
        mu_hat,
        c_norm,
    })
}

impl NoiseModel {
    /// Real parts `c_k = Re φ_k`.
    pub fn c(&self) -> Vec<f64> {
        self.phi.iter().map(|z| z.re).collect()
    }

    pub fn c_norm_sq(&self) -> f64 {
        self.c_norm * self.c_norm
    }

    pub fn modes(&self) -> usize {
        self.phi.len()
    }

    pub fn is_conservative(&self) -> bool {
        self.phi.iter().all(|z| z.re == 0.0)
    }

    /// Same nonlinearity, different coefficients.
    pub fn with_phi(&self, phi: Vec<Complex64>) -> NoiseModel {
        build_noise_model(phi, self.alpha, self.lambda, self.dim).expect("exponent already validated")
    }
}

/// Parses a complex literal such as `1`, `-0.5i`, `2+3i`, `1.5-0.25i`, `i`.
pub fn parse_complex(text: &str) -> Result<Complex64, NoiseError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || NoiseError::InvalidInput(format!("cannot parse complex literal '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        if (bytes[idx] == b'+' || bytes[idx] == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    let parse_im = |t: &str| -> Result<f64, NoiseError> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            other => other.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(idx) => {
            let re = body[..idx].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, parse_im(&body[idx..])?))
        }
        None => Ok(Complex64::new(0.0, parse_im(body)?)),
    }
}

/// Parses a comma-separated list of complex literals.
pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>, NoiseError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_complex).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derived_quantities() {
        let m = build_noise_model(vec![c(0.0, 1.0)], 5.0, -1.0, 1).unwrap();
        assert_eq!(m.mu, 0.5);
        assert_eq!(m.mu_hat, c(0.0, 0.0));
        assert_eq!(m.c_norm, 0.0);
        assert!(m.is_conservative());

        let m = build_noise_model(vec![c(1.0, 0.0)], 5.0, -1.0, 1).unwrap();
        assert_eq!(m.mu, 0.5);
        assert_eq!(m.mu_hat, c(1.0, 0.0));
        assert_eq!(m.c(), vec![1.0]);

        let m = build_noise_model(vec![c(1.0, 1.0)], 5.0, -1.0, 1).unwrap();
        assert!((m.mu - 1.0).abs() < 1e-15);
        assert!((m.mu_hat - c(1.0, 1.0)).norm() < 1e-15);
        assert_eq!(m.c_norm, 1.0);
    }

    #[test]
    fn exponent_must_match_dimension() {
        assert!(build_noise_model(vec![], 3.0, 1.0, 1).is_err());
        assert!(build_noise_model(vec![], 5.0, 1.0, 3).is_ok());
        assert!(build_noise_model(vec![], 7.0 / 3.0, 1.0, 3).is_ok());
        assert!(build_noise_model(vec![], 3.0, 1.0, 2).is_ok());
        let e = build_noise_model(vec![], 5.0, 1.0, 2).unwrap_err();
        assert!(matches!(e, NoiseError::ExponentDimensionMismatch { .. }));
        assert_eq!(
            build_noise_model(vec![], 5.0, 1.0, 3).unwrap().criticality,
            Criticality::EnergyCritical
        );
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("0.5i").unwrap(), c(0.0, 0.5));
        assert_eq!(parse_complex("2+3i").unwrap(), c(2.0, 3.0));
        assert_eq!(parse_complex("1.5-0.25i").unwrap(), c(1.5, -0.25));
        assert_eq!(parse_complex("-1e-3+2e+1i").unwrap(), c(-1e-3, 20.0));
        assert_eq!(parse_complex(" 1 + i ").unwrap(), c(1.0, 1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
        assert_eq!(parse_complex_list("1, 0.5i,2-i").unwrap().len(), 3);
    }
}
