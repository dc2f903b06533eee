use serde::{Deserialize, Serialize};

use super::PicardError;
use crate::noise::Criticality;

/// Which fixed-point construction a budget belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    EnergySmallTime,
    EnergyLargeTime,
    MassSmallTime,
    MassLargeTime,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::EnergySmallTime,
        Regime::EnergyLargeTime,
        Regime::MassSmallTime,
        Regime::MassLargeTime,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::EnergySmallTime => "energy-small-time",
            Regime::EnergyLargeTime => "energy-large-time",
            Regime::MassSmallTime => "mass-small-time",
            Regime::MassLargeTime => "mass-large-time",
        }
    }

    pub fn criticality(self) -> Criticality {
        match self {
            Regime::EnergySmallTime | Regime::EnergyLargeTime => Criticality::EnergyCritical,
            Regime::MassSmallTime | Regime::MassLargeTime => Criticality::MassCritical,
        }
    }

    pub fn is_small_time(self) -> bool {
        matches!(self, Regime::EnergySmallTime | Regime::MassSmallTime)
    }

    /// Power of the nonlinearity: `4/(d-2)` or `4/d`.
    pub fn power(self, d: usize) -> Result<f64, PicardError> {
        match self.criticality() {
            Criticality::EnergyCritical if d >= 3 => Ok(4.0 / (d as f64 - 2.0)),
            Criticality::EnergyCritical => Err(PicardError::InvalidInput(format!(
                "energy-critical regimes need d >= 3, got {d}"
            ))),
            Criticality::MassCritical if d >= 1 => Ok(4.0 / d as f64),
            Criticality::MassCritical => Err(PicardError::InvalidInput("dimension must be >= 1".into())),
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Regime::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown regime '{s}'"))
    }
}

/// Smallness parameter for one regime together with the constants it was solved from.
///
/// `bound` is `A` (small-time, sup of `h`), `E` (energy large-time, H¹ bound)
/// or `M` (mass large-time, L² bound). `parameter` is `δ` for small-time
/// regimes and the admissible `‖h‖_∞` level `ε` for large-time ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardBudget {
    pub regime: Regime,
    pub dim: usize,
    pub bound: f64,
    pub c_est: f64,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    /// Left side of the smallness condition at the stored parameter.
    pub lhs: f64,
    pub satisfied: bool,
}

fn condition_lhs(regime: Regime, e: f64, bound: f64, c: f64, param: f64) -> f64 {
    match regime {
        Regime::EnergySmallTime => 4.0 * c * bound * (2.0 * param).powf(e),
        Regime::EnergyLargeTime => 4.0 * c * param * (2.0 * c * bound).powf(e),
        Regime::MassSmallTime => 2f64.powf(2.0 + e) * c * bound * param.powf(e),
        Regime::MassLargeTime => (2.0 * c + 1.0).powf(1.0 + e) * 2.0 * c * param * bound.powf(e),
    }
}

/// Largest `δ` (or `ε`) meeting the regime's smallness condition with equality.
pub fn solve_budget(regime: Regime, bound: f64, c_est: f64, d: usize) -> Result<PicardBudget, PicardError> {
    let e = regime.power(d)?;
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(PicardError::InvalidInput(format!("bound must be positive, got {bound}")));
    }
    if !(c_est > 0.0 && c_est.is_finite()) {
        return Err(PicardError::InvalidInput(format!("C_est must be positive, got {c_est}")));
    }
    if regime == Regime::EnergyLargeTime && bound <= 1.0 {
        return Err(PicardError::InvalidInput(format!("E must exceed 1, got {bound}")));
    }
    let c = c_est;
    let param = match regime {
        Regime::EnergySmallTime => 0.5 * (4.0 * c * bound).powf(-1.0 / e),
        Regime::EnergyLargeTime => 1.0 / (4.0 * c * (2.0 * c * bound).powf(e)),
        Regime::MassSmallTime => (2f64.powf(2.0 + e) * c * bound).powf(-1.0 / e),
        Regime::MassLargeTime => 1.0 / ((2.0 * c + 1.0).powf(1.0 + e) * 2.0 * c * bound.powf(e)),
    };
    let base = PicardBudget {
        regime,
        dim: d,
        bound,
        c_est,
        delta: None,
        epsilon: None,
        lhs: 0.0,
        satisfied: false,
    };
    Ok(base.with_parameter(param))
}

impl PicardBudget {
    /// `δ` or `ε`, whichever the regime uses.
    pub fn parameter(&self) -> f64 {
        self.delta.or(self.epsilon).unwrap_or(f64::NAN)
    }

    /// Re-evaluates the condition at another parameter value.
    pub fn with_parameter(&self, param: f64) -> PicardBudget {
        let e = self.regime.power(self.dim).unwrap_or(f64::NAN);
        let lhs = condition_lhs(self.regime, e, self.bound, self.c_est, param);
        let mut out = *self;
        if self.regime.is_small_time() {
            out.delta = Some(param);
            out.epsilon = None;
        } else {
            out.epsilon = Some(param);
            out.delta = None;
        }
        out.lhs = lhs;
        out.satisfied = lhs <= 1.0 + 1e-12;
        out
    }

    /// Radius of the ball the fixed point lives in: `2δ`, `2CE` or `(2C+1)M`.
    pub fn ball_radius(&self) -> f64 {
        match self.regime {
            Regime::EnergySmallTime | Regime::MassSmallTime => 2.0 * self.parameter(),
            Regime::EnergyLargeTime => 2.0 * self.c_est * self.bound,
            Regime::MassLargeTime => (2.0 * self.c_est + 1.0) * self.bound,
        }
    }
}
