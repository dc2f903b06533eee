use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::budget::{solve_budget, PicardBudget, Regime};
use super::contraction::{picard_iterate, relative_sup_l2, split_step_reference, ContractionReport, Metric, PicardOptions};
use super::duhamel::DuhamelMap;
use super::nonlinearity::pointwise_constant;
use super::strichartz_const::estimate_strichartz_constant;
use super::PicardError;
use crate::noise::{build_noise_model, Criticality, SOLITON_SIGN};
use crate::solver::gaussian;
use crate::spectral::{energy_pair, make_grid, mass, mass_pair, sobolev_h1_norm, Frame, SpectralOps};

/// One fixed-point experiment: Gaussian data sized by the regime's budget,
/// a constant coefficient `h`, and the Picard iteration on a uniform mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardExperiment {
    pub regime: Regime,
    pub dim: usize,
    pub n: usize,
    pub length: f64,
    pub lambda: f64,
    /// `A`, `E` or `M` depending on the regime.
    pub bound: f64,
    pub interval: (f64, f64),
    pub steps: usize,
    /// Fixed constant; estimated when absent.
    pub c_est: Option<f64>,
    pub strichartz_samples: usize,
    pub pointwise_samples: usize,
    pub data_width: f64,
    pub options: PicardOptions,
    /// Solver steps per mesh step for the split-step comparison; 0 skips it.
    pub refine: usize,
}

impl PicardExperiment {
    pub fn default_for(regime: Regime) -> Self {
        let (dim, n, length) = match regime.criticality() {
            Criticality::EnergyCritical => (3, 32, 16.0),
            Criticality::MassCritical => (1, 512, 40.0),
        };
        let (bound, interval) = match regime {
            Regime::EnergySmallTime | Regime::MassSmallTime => (1.0, (0.0, 0.5)),
            Regime::EnergyLargeTime => (2.0, (0.5, 1.0)),
            Regime::MassLargeTime => (1.0, (0.5, 1.0)),
        };
        Self {
            regime,
            dim,
            n,
            length,
            lambda: SOLITON_SIGN,
            bound,
            interval,
            steps: 50,
            c_est: None,
            strichartz_samples: 16,
            pointwise_samples: 10_000,
            data_width: 1.0,
            options: PicardOptions::default(),
            refine: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub experiment: PicardExperiment,
    pub alpha: f64,
    pub c_strichartz: Option<f64>,
    pub c_nonlinear: Option<f64>,
    /// Constant the budget was solved with.
    pub c_est: f64,
    pub budget: PicardBudget,
    /// `‖e^{itΔ}u₀‖` in the ball norm (small-time) or the data's H¹/L² norm (large-time).
    pub data_norm: f64,
    pub contraction: ContractionReport,
}

/// Builds the budget, the data and the map, iterates to the fixed point and
/// optionally compares it with a refined split-step run.
///
/// When no constant is given, `C_est = max(1, C_S) · K` with `C_S` the
/// empirical Strichartz constant of the regime's pair over the interval and
/// `K` the empirical pointwise difference constant.
pub fn run_picard_experiment(exp: &PicardExperiment) -> Result<PicardReport, PicardError> {
    let d = exp.dim;
    let power = exp.regime.power(d)?;
    let alpha = 1.0 + power;
    let model = build_noise_model(Vec::new(), alpha, exp.lambda, d)?;
    let grid = make_grid(d, exp.n, exp.length)?;
    let (t0, t1) = exp.interval;
    let span = t1 - t0;
    if !(span > 0.0) {
        return Err(PicardError::InvalidInput(format!("empty interval [{t0}, {t1}]")));
    }

    let (c_strichartz, c_nonlinear, c_est) = match exp.c_est {
        Some(c) => (None, None, c),
        None => {
            let (q, p) = match exp.regime.criticality() {
                Criticality::EnergyCritical => energy_pair(d).expect("d >= 3 checked by power()"),
                Criticality::MassCritical => mass_pair(d),
            };
            let cs = estimate_strichartz_constant(d, q, p, &grid, exp.strichartz_samples, span, exp.options.seed)?;
            let k = pointwise_constant(alpha, exp.pointwise_samples, exp.options.seed);
            (Some(cs), Some(k), cs.max(1.0) * k)
        }
    };
    let budget = solve_budget(exp.regime, exp.bound, c_est, d)?;

    let unit = gaussian(grid, Frame::Rescaled, 1.0, exp.data_width);
    let ops = SpectralOps::new(&grid);
    let (initial, h_level, data_norm) = if exp.regime.is_small_time() {
        let probe = DuhamelMap::new(&unit, &|_| 0.0, exp.interval, exp.steps, &model)?;
        let metric = Metric::new(&ops, exp.regime.criticality())?;
        let unit_norm = metric.ball(&probe.free_evolution());
        let delta = budget.parameter();
        let s = delta / unit_norm;
        (unit.scaled(Complex64::new(s, 0.0)), exp.bound, delta)
    } else {
        let unit_norm = match exp.regime.criticality() {
            Criticality::EnergyCritical => sobolev_h1_norm(&unit)?,
            Criticality::MassCritical => mass(&unit).sqrt(),
        };
        let s = exp.bound / unit_norm;
        (unit.scaled(Complex64::new(s, 0.0)), budget.parameter(), exp.bound)
    };
    let h = move |_t: f64| h_level;
    let map = DuhamelMap::new(&initial, &h, exp.interval, exp.steps, &model)?;
    let (fixed, mut contraction) = picard_iterate(&map, exp.regime.criticality(), &exp.options, Some(&budget))?;
    if exp.refine > 0 {
        let reference = split_step_reference(&initial, &h, exp.interval, exp.steps, exp.refine, &model)?;
        contraction.residual = Some(relative_sup_l2(&fixed, &reference)?);
    }
    Ok(PicardReport {
        experiment: exp.clone(),
        alpha,
        c_strichartz,
        c_nonlinear,
        c_est,
        budget,
        data_norm,
        contraction,
    })
}
