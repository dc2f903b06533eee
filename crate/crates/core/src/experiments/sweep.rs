use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ExperimentError, SweepConfig};
use crate::noise::{derived_seed, sample_path, ProbabilityEstimate};
use crate::solver::{classify_outcome, integrate, Outcome};

/// One trajectory of a sweep, reduced to what the report needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub strength_index: usize,
    pub c_norm: f64,
    pub path_index: usize,
    pub seed: u64,
    /// Outcome under the loose scattering tolerance.
    pub outcome: Outcome,
    pub strict_outcome: Outcome,
    pub scattering_residual: Option<f64>,
    /// `sup_t ‖∇u(t)‖ / ‖∇u(0)‖`.
    pub peak_grad_ratio: Option<f64>,
    pub final_time: f64,
    pub steps_taken: usize,
    /// Set when the trajectory could not be integrated; the outcome is then undecided.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthSummary {
    pub c_norm: f64,
    pub n_paths: usize,
    pub n_scattering: usize,
    pub n_blowup: usize,
    pub n_undecided: usize,
    pub n_failed: usize,
    /// Probability of global scattering, loose tolerance.
    pub estimate: ProbabilityEstimate,
    pub strict_estimate: ProbabilityEstimate,
    pub mean_blowup_time: Option<f64>,
    pub mean_peak_grad_ratio: Option<f64>,
    /// `1/‖c‖`, absent at zero strength.
    pub splitting_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub config_hash: String,
    pub crate_version: String,
    pub strengths: Vec<StrengthSummary>,
    pub trajectories: Vec<TrajectorySummary>,
}

/// Hex SHA-256 of the config's canonical JSON.
pub fn config_hash(config: &SweepConfig) -> String {
    let json = serde_json::to_string(config).expect("sweep config serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}

/// Seed of trajectory `path_index` at strength `strength_index`.
pub fn trajectory_seed(config: &SweepConfig, strength_index: usize, path_index: usize) -> u64 {
    derived_seed(config.base_seed, (strength_index * config.n_paths + path_index) as u64)
}

/// Integrates a single sweep trajectory.
pub fn run_trajectory(
    config: &SweepConfig,
    strength_index: usize,
    path_index: usize,
) -> TrajectorySummary {
    let c_norm = config.c_norm_list[strength_index];
    let seed = trajectory_seed(config, strength_index, path_index);
    let blank = TrajectorySummary {
        strength_index,
        c_norm,
        path_index,
        seed,
        outcome: Outcome::Undecided,
        strict_outcome: Outcome::Undecided,
        scattering_residual: None,
        peak_grad_ratio: None,
        final_time: 0.0,
        steps_taken: 0,
        error: None,
    };
    let result = (|| -> Result<TrajectorySummary, ExperimentError> {
        let solver = config.solver_config(c_norm)?;
        let initial = config.initial.build(solver.grid, config.frame)?;
        let path = sample_path(&solver.model, config.path_dt(), config.t_end, seed)?;
        let record = integrate(&solver, &path, &initial)?;
        let d = &record.diagnostics;
        Ok(TrajectorySummary {
            outcome: record.outcome,
            strict_outcome: classify_outcome(&record, &config.thresholds.strict()),
            scattering_residual: d.scattering_residual,
            peak_grad_ratio: (d.initial_grad > 0.0 && d.peak_grad.is_finite()).then(|| d.peak_grad / d.initial_grad),
            final_time: record.final_time(),
            steps_taken: d.steps_taken,
            ..blank.clone()
        })
    })();
    result.unwrap_or_else(|e| TrajectorySummary {
        error: Some(e.to_string()),
        ..blank
    })
}

fn summarize(config: &SweepConfig, strength_index: usize, trajs: &[TrajectorySummary]) -> StrengthSummary {
    let c_norm = config.c_norm_list[strength_index];
    let count = |f: &dyn Fn(&TrajectorySummary) -> bool| trajs.iter().filter(|t| f(t)).count();
    let n_scattering = count(&|t| t.outcome.is_scattering());
    let n_blowup = count(&|t| t.outcome.is_blowup());
    let n_strict = count(&|t| t.strict_outcome.is_scattering());
    let n = trajs.len();
    let times: Vec<f64> = trajs
        .iter()
        .filter_map(|t| match t.outcome {
            Outcome::Blowup { time, .. } => Some(time),
            _ => None,
        })
        .collect();
    let ratios: Vec<f64> = trajs.iter().filter_map(|t| t.peak_grad_ratio).collect();
    let mut estimate = ProbabilityEstimate::from_counts(n_scattering as u64, n as u64);
    estimate.seed = Some(config.base_seed);
    let mut strict_estimate = ProbabilityEstimate::from_counts(n_strict as u64, n as u64);
    strict_estimate.seed = Some(config.base_seed);
    StrengthSummary {
        c_norm,
        n_paths: n,
        n_scattering,
        n_blowup,
        n_undecided: n - n_scattering - n_blowup,
        n_failed: count(&|t| t.error.is_some()),
        estimate,
        strict_estimate,
        mean_blowup_time: (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64),
        mean_peak_grad_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
        splitting_time: (c_norm > 0.0).then(|| 1.0 / c_norm),
    }
}

/// Rebuilds per-strength summaries from trajectory summaries.
pub fn summarize_trajectories(
    config: &SweepConfig,
    trajectories: &[TrajectorySummary],
) -> Vec<StrengthSummary> {
    (0..config.c_norm_list.len())
        .map(|k| {
            let group: Vec<TrajectorySummary> =
                trajectories.iter().filter(|t| t.strength_index == k).cloned().collect();
            summarize(config, k, &group)
        })
        .collect()
}

/// Runs every (strength, path) pair on a dedicated pool of `workers` threads
/// (`None`: rayon's default). Output does not depend on the worker count.
pub fn run_sweep(config: &SweepConfig, workers: Option<usize>) -> Result<SweepReport, ExperimentError> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(ExperimentError::Config("workers must be >= 1".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| ExperimentError::Config(e.to_string()))?;
    let jobs: Vec<(usize, usize)> = (0..config.c_norm_list.len())
        .flat_map(|k| (0..config.n_paths).map(move |i| (k, i)))
        .collect();
    let trajectories: Vec<TrajectorySummary> =
        pool.install(|| jobs.par_iter().map(|&(k, i)| run_trajectory(config, k, i)).collect());
    Ok(SweepReport {
        config: config.clone(),
        config_hash: config_hash(config),
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        strengths: summarize_trajectories(config, &trajectories),
        trajectories,
    })
}
