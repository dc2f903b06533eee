use rayon::prelude::*;

use super::sampling::PacketSample;
use super::PicardError;
use crate::noise::{derived_seed, rng_from_seed};
use crate::spectral::{is_admissible, spacetime_norm_with, GridSpec, SampledField, SpectralOps, StrichartzSpec};
use crate::spectral::Frame;

/// Time-mesh spacing used to evaluate `L^q_t`; horizons that are dyadic
/// multiples of it give nested meshes.
pub const STRICHARTZ_TIME_STEP: f64 = 1.0 / 128.0;

/// `‖e^{itΔ}f‖_{L^q_t L^p_x([0,T])} / ‖f‖₂` for one sample.
pub fn strichartz_ratio(ops: &SpectralOps, sample: &PacketSample, q: f64, p: f64, horizon: f64) -> f64 {
    let f = sample.band_limited(ops, Frame::Rescaled);
    let steps = ((horizon / STRICHARTZ_TIME_STEP) - 1e-9).ceil().max(1.0) as usize;
    let dt = horizon / steps as f64;
    let s = SampledField::free_evolution(ops, &f, 0.0, dt, steps);
    spacetime_norm_with(ops, &s, &StrichartzSpec::new(q, p, 0, (0.0, horizon))).unwrap_or(f64::NAN)
}

/// Empirical Strichartz constant: supremum of [`strichartz_ratio`] over
/// `n_samples` random band-limited packet superpositions. The samples depend
/// only on `seed` and the box length, not on the resolution.
pub fn estimate_strichartz_constant(
    d: usize,
    q: f64,
    p: f64,
    grid: &GridSpec,
    n_samples: usize,
    horizon: f64,
    seed: u64,
) -> Result<f64, PicardError> {
    if grid.dim() != d {
        return Err(PicardError::InvalidInput(format!("grid has dimension {}, expected {d}", grid.dim())));
    }
    if !is_admissible(q, p, d) {
        return Err(PicardError::Inadmissible { q, p, d });
    }
    if n_samples == 0 || !(horizon > 0.0 && horizon.is_finite()) {
        return Err(PicardError::InvalidInput("need n_samples >= 1 and a positive horizon".into()));
    }
    let ops = SpectralOps::new(grid);
    let best = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derived_seed(seed, i));
            let sample = PacketSample::draw_default(&mut rng, d, grid.length());
            strichartz_ratio(&ops, &sample, q, p, horizon)
        })
        .reduce(|| 0.0, f64::max);
    if !best.is_finite() || best <= 0.0 {
        return Err(PicardError::InvalidInput("Strichartz estimate is not finite".into()));
    }
    Ok(best)
}
