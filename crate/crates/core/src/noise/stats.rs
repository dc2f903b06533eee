use serde::{Deserialize, Serialize};
use libm::erfc;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal upper tail `1 - Φ(x)`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Wilson score interval for `successes` out of `n` trials.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Clamp, and keep the point estimate inside despite rounding at the ends.
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    MonteCarlo,
    ClosedForm,
}

impl EstimateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateMethod::MonteCarlo => "monte-carlo",
            EstimateMethod::ClosedForm => "closed-form",
        }
    }
}

impl std::str::FromStr for EstimateMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "monte-carlo" => Ok(EstimateMethod::MonteCarlo),
            "closed-form" => Ok(EstimateMethod::ClosedForm),
            other => Err(format!("unknown method '{other}' (expected closed-form|monte-carlo)")),
        }
    }
}

/// A probability with its 95% Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub p_hat: f64,
    pub n_samples: u64,
    pub successes: u64,
    pub ci: (f64, f64),
    pub method: EstimateMethod,
    /// Upper bound on probability mass neglected by truncation (Monte Carlo only).
    pub tail_bound: Option<f64>,
    pub seed: Option<u64>,
}

impl ProbabilityEstimate {
    pub fn from_counts(successes: u64, n: u64) -> Self {
        let p_hat = if n == 0 { 0.0 } else { successes as f64 / n as f64 };
        Self {
            p_hat,
            n_samples: n,
            successes,
            ci: wilson_interval(successes, n, Z95),
            method: EstimateMethod::MonteCarlo,
            tail_bound: None,
            seed: None,
        }
    }

    pub fn exact(p: f64) -> Self {
        let p = p.clamp(0.0, 1.0);
        Self {
            p_hat: p,
            n_samples: 0,
            successes: 0,
            ci: (p, p),
            method: EstimateMethod::ClosedForm,
            tail_bound: None,
            seed: None,
        }
    }

    /// Binomial standard error `sqrt(p(1-p)/n)` (zero for exact values).
    pub fn std_error(&self) -> f64 {
        if self.n_samples == 0 {
            return 0.0;
        }
        (self.p_hat * (1.0 - self.p_hat) / self.n_samples as f64).sqrt()
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci.1 - self.ci.0)
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn std_error_of_mean(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at level 1%.
pub fn ks_critical_1pct(na: usize, nb: usize) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    1.628 * ((na + nb) / (na * nb)).sqrt()
}
