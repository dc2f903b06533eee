//! Quick built-in checks: exact identities and degenerate cases of every
//! module, run by `snls selftest`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::experiments::{
    equivalence_audit, load_run, martingale_audit, persist_run, run_sweep, EquivalenceConfig, ExperimentError,
    InitialProfile, SweepConfig, SweepThresholds, MANIFEST_FILE, TRAJECTORIES_FILE,
};
use crate::noise::{
    build_noise_model, decay_exceedance_probability, eval_gbm, rescale, rng_from_seed, sample_path, EstimateMethod,
    NoiseModel, RescaleDirection, SOLITON_SIGN,
};
use crate::picard::{
    nonlinearity, picard_solve, pointwise_difference_ratio, solve_budget, DuhamelMap, PicardOptions, Regime,
};
use crate::solver::{
    apply_nonlinear_phase, classify_outcome, gaussian, integrate, noise_multiplier, scattering_residual,
    BlowupThresholds, Outcome, SolverConfig,
};
use crate::spectral::{
    free_propagate, gradient_norm_with, lebesgue_norm, make_grid, mass, sobolev_h1_norm, spacetime_norm, FieldState,
    Frame, GridSpec, SampledField, SpectralError, SpectralOps, StrichartzSpec,
};

#[derive(Debug, Clone, Serialize)]
pub struct SelfTestCase {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfTestReport {
    pub cases: Vec<SelfTestCase>,
}

impl SelfTestReport {
    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SelfTestCase> {
        self.cases.iter().filter(|c| !c.passed)
    }
}

type Check = fn() -> Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(name: &str, got: f64, want: f64, rel: f64) -> Result<(), String> {
    let scale = want.abs().max(f64::MIN_POSITIVE);
    ensure((got - want).abs() <= rel * scale, || format!("{name}: got {got:e}, want {want:e} (rel tol {rel:e})"))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_field(grid: GridSpec, seed: u64) -> FieldState {
    let mut rng = rng_from_seed(seed);
    let values = (0..grid.len())
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    FieldState::new(grid, values, Frame::Physical, 0.0).expect("sizes match")
}

fn rel_l2(a: &FieldState, b: &FieldState) -> Result<f64, String> {
    Ok((mass(&a.difference(b).map_err(err)?) / mass(b)).sqrt())
}

fn quintic(phi: Vec<Complex64>, lambda: f64) -> Result<NoiseModel, String> {
    build_noise_model(phi, 5.0, lambda, 1).map_err(err)
}

fn grid_1d_spacing() -> Result<(), String> {
    let g = make_grid(1, 8, 2.0 * std::f64::consts::PI).map_err(err)?;
    ensure(g.len() == 8, || format!("{} points", g.len()))?;
    close("spacing", g.spacing(), std::f64::consts::FRAC_PI_4, 1e-15)
}

fn grid_3d_points() -> Result<(), String> {
    let g = make_grid(3, 64, 40.0).map_err(err)?;
    ensure(g.len() == 64 * 64 * 64, || format!("{} points", g.len()))
}

fn grid_rejects_odd_resolution() -> Result<(), String> {
    ensure(matches!(make_grid(2, 7, 10.0), Err(SpectralError::InvalidResolution(7))), || {
        "n = 7 accepted".into()
    })
}

fn propagator_zero_step() -> Result<(), String> {
    let f = random_field(make_grid(2, 16, 6.0).map_err(err)?, 1);
    let g = free_propagate(&f, 0.0).map_err(err)?;
    ensure(rel_l2(&g, &f)? <= 1e-14, || "dt = 0 moved the field".into())
}

fn propagator_unitary() -> Result<(), String> {
    let f = random_field(make_grid(1, 128, 20.0).map_err(err)?, 2);
    let g = free_propagate(&f, 0.7).map_err(err)?;
    close("mass", mass(&g), mass(&f), 1e-12)
}

fn lp_constant_field() -> Result<(), String> {
    let g = make_grid(2, 16, 3.0).map_err(err)?;
    let f = FieldState::from_fn(g, Frame::Physical, 0.0, |_| Complex64::new(1.0, 0.0));
    close("L2 of 1", lebesgue_norm(&f, 2.0).map_err(err)?, g.volume().sqrt(), 1e-12)
}

fn parseval() -> Result<(), String> {
    let g = make_grid(1, 64, 10.0).map_err(err)?;
    let f = random_field(g, 3);
    let ops = SpectralOps::new(&g);
    let mut spec = f.values.clone();
    ops.forward(&mut spec);
    let l2 = lebesgue_norm(&f, 2.0).map_err(err)?;
    close("Parseval", l2 * l2, ops.mass_from_spectrum(&spec), 1e-10)
}

fn h1_constant_field() -> Result<(), String> {
    let g = make_grid(2, 16, 5.0).map_err(err)?;
    let f = FieldState::from_fn(g, Frame::Physical, 0.0, |_| Complex64::new(0.3, -0.2));
    let grad = gradient_norm_with(&SpectralOps::new(&g), &f.values);
    ensure(grad <= 1e-12, || format!("gradient {grad:e}"))
}

fn h1_plane_wave() -> Result<(), String> {
    let g = make_grid(1, 64, 10.0).map_err(err)?;
    let (a, xi) = (1.5, 2.0 * std::f64::consts::PI * 3.0 / 10.0);
    let f = FieldState::from_fn(g, Frame::Physical, 0.0, |x| Complex64::from_polar(a, xi * x[0]));
    let h1 = sobolev_h1_norm(&f).map_err(err)?;
    close("H1^2", h1 * h1, a * a * g.volume() * (1.0 + xi * xi), 1e-12)
}

fn constant_series(t_end: f64, steps: usize) -> Result<(SampledField, FieldState), String> {
    let g = make_grid(1, 32, 8.0).map_err(err)?;
    let f = gaussian(g, Frame::Physical, 1.0, 1.0);
    let times: Vec<f64> = (0..=steps).map(|j| t_end * j as f64 / steps as f64).collect();
    let fields = times.iter().map(|_| f.clone()).collect();
    Ok((SampledField::new(times, fields), f))
}

fn strichartz_time_constant() -> Result<(), String> {
    let (s, g) = constant_series(2.0, 10)?;
    let v = spacetime_norm(&s, &StrichartzSpec::new(6.0, 4.0, 0, (0.0, 2.0))).map_err(err)?;
    close("T^{1/q}|g|_p", v, 2f64.powf(1.0 / 6.0) * lebesgue_norm(&g, 4.0).map_err(err)?, 1e-12)
}

fn strichartz_empty_interval() -> Result<(), String> {
    let (s, _) = constant_series(1.0, 4)?;
    let v = spacetime_norm(&s, &StrichartzSpec::new(6.0, 6.0, 0, (0.5, 0.5))).map_err(err)?;
    ensure(v == 0.0, || format!("{v}"))
}

fn noise_conservative_mode() -> Result<(), String> {
    let m = quintic(vec![Complex64::new(0.0, 1.0)], SOLITON_SIGN)?;
    close("mu", m.mu, 0.5, 1e-15)?;
    ensure(m.mu_hat.norm() <= 1e-15 && m.c_norm == 0.0, || format!("{:?} {}", m.mu_hat, m.c_norm))
}

fn noise_mixed_mode() -> Result<(), String> {
    let m = quintic(vec![Complex64::new(1.0, 1.0)], SOLITON_SIGN)?;
    close("mu", m.mu, 1.0, 1e-15)?;
    ensure((m.mu_hat - Complex64::new(1.0, 1.0)).norm() <= 1e-15, || format!("{:?}", m.mu_hat))?;
    close("c", m.c_norm, 1.0, 1e-15)
}

fn path_starts_at_zero() -> Result<(), String> {
    let m = quintic(vec![Complex64::new(0.7, 0.2), Complex64::new(0.0, 1.0)], SOLITON_SIGN)?;
    let p = sample_path(&m, 1e-2, 1.0, 99).map_err(err)?;
    ensure(p.m[0] == 0.0 && p.w[0] == Complex64::new(0.0, 0.0), || "nonzero start".into())
}

fn path_is_deterministic() -> Result<(), String> {
    let m = quintic(vec![Complex64::new(1.0, 0.0)], SOLITON_SIGN)?;
    let a = sample_path(&m, 1e-3, 1.0, 5).map_err(err)?;
    let b = sample_path(&m, 1e-3, 1.0, 5).map_err(err)?;
    ensure(a == b, || "paths differ".into())
}

fn gbm_identities() -> Result<(), String> {
    let m = quintic(vec![Complex64::new(1.3, 0.4)], SOLITON_SIGN)?;
    let p = sample_path(&m, 1e-2, 2.0, 6).map_err(err)?;
    ensure(eval_gbm(&p, &m, 0.0).map_err(err)? == 1.0, || "h(0) != 1".into())?;
    for j in (0..=p.steps).step_by(10) {
        let t = p.time(j);
        let replay = ((m.alpha - 1.0) * (p.m[j] - m.c_norm_sq() * t)).exp();
        close("h replay", eval_gbm(&p, &m, t).map_err(err)?, replay, 1e-12)?;
    }
    let quiet = quintic(vec![Complex64::new(0.0, 2.0)], SOLITON_SIGN)?;
    let p = sample_path(&quiet, 1e-2, 2.0, 6).map_err(err)?;
    ensure((0..=p.steps).all(|j| eval_gbm(&p, &quiet, p.time(j)).unwrap() == 1.0), || "h != 1 at c = 0".into())
}

fn rescale_identities() -> Result<(), String> {
    let g = make_grid(1, 64, 20.0).map_err(err)?;
    let f = random_field(g, 7);
    let m = quintic(vec![Complex64::new(0.8, -0.3)], SOLITON_SIGN)?;
    let p = sample_path(&m, 1e-2, 1.0, 8).map_err(err)?;
    let u = rescale(&f, &p, &m, RescaleDirection::ToRescaled).map_err(err)?;
    ensure(u.values == f.values, || "t = 0 is not the identity".into())?;
    let mut late = f.clone();
    late.time = 0.6;
    let back = rescale(
        &rescale(&late, &p, &m, RescaleDirection::ToRescaled).map_err(err)?,
        &p,
        &m,
        RescaleDirection::ToPhysical,
    )
    .map_err(err)?;
    ensure(rel_l2(&back, &late)? <= 1e-13, || "round trip drifted".into())?;
    let cons = quintic(vec![Complex64::new(0.0, 1.0)], SOLITON_SIGN)?;
    let p = sample_path(&cons, 1e-2, 1.0, 9).map_err(err)?;
    let u = rescale(&late, &p, &cons, RescaleDirection::ToRescaled).map_err(err)?;
    let worst = u.values.iter().zip(&late.values).map(|(a, b)| (a.norm() - b.norm()).abs()).fold(0.0, f64::max);
    ensure(worst <= 1e-14, || format!("|u| - |X| = {worst:e}"))
}

fn exceedance_small_barrier() -> Result<(), String> {
    let p = decay_exceedance_probability(1.0, 1e-12, 5.0, EstimateMethod::ClosedForm, 0, 0).map_err(err)?;
    ensure(p.p_hat > 0.999, || format!("p = {}", p.p_hat))
}

fn phase_step_identities() -> Result<(), String> {
    let f = random_field(make_grid(1, 64, 10.0).map_err(err)?, 10);
    let mut v = f.values.clone();
    apply_nonlinear_phase(&mut v, 0.0, 5.0);
    ensure(v == f.values, || "dt = 0 changed the field".into())?;
    apply_nonlinear_phase(&mut v, -3.7, 5.0);
    let worst = v.iter().zip(&f.values).map(|(a, b)| (a.norm() - b.norm()).abs()).fold(0.0, f64::max);
    ensure(worst <= 1e-14, || format!("modulus changed by {worst:e}"))
}

fn noise_step_identities() -> Result<(), String> {
    let cons = quintic(vec![Complex64::new(0.0, 1.2)], SOLITON_SIGN)?;
    let p = sample_path(&cons, 1e-2, 1.0, 11).map_err(err)?;
    ensure(noise_multiplier(&p, &cons, 5, 5) == Complex64::new(1.0, 0.0), || "zero increment moved X".into())?;
    let z = noise_multiplier(&p, &cons, 0, p.steps);
    close("|multiplier|", z.norm(), 1.0, 1e-13)
}

fn free_config(grid: GridSpec, frame: Frame) -> Result<SolverConfig, String> {
    Ok(SolverConfig {
        grid,
        model: quintic(vec![], 0.0)?,
        dt: 1e-2,
        t_end: 1.0,
        frame,
        record_stride: 10,
        thresholds: BlowupThresholds {
            scatter_window: 0.5,
            ..BlowupThresholds::default()
        },
        store_fields: true,
    })
}

fn free_run_is_exact() -> Result<(), String> {
    let g = make_grid(1, 128, 30.0).map_err(err)?;
    let cfg = free_config(g, Frame::Physical)?;
    let u0 = gaussian(g, Frame::Physical, 1.0, 1.0);
    let p = sample_path(&cfg.model, 1e-2, 1.0, 0).map_err(err)?;
    let rec = integrate(&cfg, &p, &u0).map_err(err)?;
    let exact = free_propagate(&u0, 1.0).map_err(err)?;
    ensure(rel_l2(&rec.final_field, &exact)? <= 1e-10, || "splitting is not exact".into())?;
    ensure(rec.outcome == Outcome::GlobalScattering, || format!("{:?}", rec.outcome))
}

fn residual_identities() -> Result<(), String> {
    let g = make_grid(1, 128, 30.0).map_err(err)?;
    let cfg = free_config(g, Frame::Rescaled)?;
    let p = sample_path(&cfg.model, 5e-3, 1.0, 0).map_err(err)?;
    let mut rec = integrate(&cfg, &p, &gaussian(g, Frame::Rescaled, 1.0, 1.0)).map_err(err)?;
    ensure(scattering_residual(&rec, 0.3, 0.3).map_err(err)? == 0.0, || "t1 = t2 residual".into())?;
    let r = scattering_residual(&rec, 0.1, 0.7).map_err(err)?;
    ensure(r <= 1e-12, || format!("free residual {r:e}"))?;
    rec.snapshots[3].grad_norm = f64::NAN;
    let t = rec.snapshots[3].time;
    let o = classify_outcome(&rec, &cfg.thresholds);
    ensure(o == Outcome::Blowup { time: t, unstable: true }, || format!("NaN classified as {o:?}"))
}

fn budget_slack() -> Result<(), String> {
    for regime in Regime::ALL {
        let d = if regime.criticality() == crate::noise::Criticality::EnergyCritical { 3 } else { 1 };
        let b = solve_budget(regime, 1.5, 2.0, d).map_err(err)?;
        let half = b.with_parameter(0.5 * b.parameter());
        ensure(half.satisfied, || format!("{regime}: halved parameter unsatisfied"))?;
    }
    Ok(())
}

fn duhamel_degenerate_cases() -> Result<(), String> {
    let g = make_grid(1, 64, 20.0).map_err(err)?;
    let u0 = gaussian(g, Frame::Rescaled, 0.8, 1.0);
    let model = quintic(vec![], SOLITON_SIGN)?;
    let map = DuhamelMap::new(&u0, &|_| 1.0, (0.0, 0.3), 10, &model).map_err(err)?;
    let free = map.free_evolution();
    let zero = SampledField::new(
        free.times.clone(),
        free.fields.iter().map(|f| f.scaled(Complex64::new(0.0, 0.0))).collect(),
    );
    let max_diff = |a: &SampledField, b: &SampledField| {
        a.fields
            .iter()
            .zip(&b.fields)
            .flat_map(|(x, y)| x.values.iter().zip(&y.values).map(|(p, q)| (p - q).norm()))
            .fold(0.0, f64::max)
    };
    let out = map.apply(&zero).map_err(err)?;
    ensure(max_diff(&out, &free) <= 1e-15, || "u = 0 is not free evolution".into())?;
    let silent = DuhamelMap::new(&u0, &|_| 0.0, (0.0, 0.3), 10, &model).map_err(err)?;
    let out = silent.apply(&free.scaled(3.0)).map_err(err)?;
    ensure(max_diff(&out, &free) <= 1e-15, || "h = 0 is not free evolution".into())?;
    let (fp, rep) =
        picard_solve(&u0, &|_| 0.0, (0.0, 0.3), 10, &model, &PicardOptions::default(), None).map_err(err)?;
    ensure(rep.converged && rep.iterations == 1, || format!("{} iterations", rep.iterations))?;
    ensure(max_diff(&fp, &free) <= 1e-15, || "fixed point is not free evolution".into())
}

fn nonlinearity_identities() -> Result<(), String> {
    let g = make_grid(1, 32, 8.0).map_err(err)?;
    let zero = FieldState::zeros(g, Frame::Rescaled, 0.0);
    ensure(nonlinearity(&zero, 5.0).values.iter().all(|z| z.norm() == 0.0), || "F(0) != 0".into())?;
    let a = 1.3;
    let c = FieldState::from_fn(g, Frame::Rescaled, 0.0, |_| Complex64::new(a, 0.0));
    close("F(a)", nonlinearity(&c, 5.0).values[0].re, a.powi(5), 1e-14)?;
    let v = random_field(g, 12);
    let theta = Complex64::from_polar(1.0, 0.9);
    let lhs = nonlinearity(&v.scaled(theta), 5.0);
    let rhs = nonlinearity(&v, 5.0).scaled(theta);
    let worst = lhs.values.iter().zip(&rhs.values).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    ensure(worst <= 1e-14, || format!("gauge covariance off by {worst:e}"))?;
    let u = Complex64::new(0.4, -1.1);
    ensure(pointwise_difference_ratio(u, u, 5.0) == 0.0, || "u = v ratio".into())?;
    close("v = 0 ratio", pointwise_difference_ratio(u, Complex64::new(0.0, 0.0), 5.0), 1.0, 1e-14)
}

fn strichartz_ratio_homogeneous() -> Result<(), String> {
    let g = make_grid(1, 128, 30.0).map_err(err)?;
    let ops = SpectralOps::new(&g);
    let f = gaussian(g, Frame::Rescaled, 1.0, 1.0);
    let spec = StrichartzSpec::new(6.0, 6.0, 0, (0.0, 1.0));
    let ratio = |f: &FieldState| -> Result<f64, String> {
        let s = SampledField::free_evolution(&ops, f, 0.0, 1.0 / 32.0, 32);
        Ok(spacetime_norm(&s, &spec).map_err(err)? / mass(f).sqrt())
    };
    close("ratio(2f)", ratio(&f.scaled(Complex64::new(2.0, 0.0)))?, ratio(&f)?, 1e-13)
}

fn small_defocusing_sweep() -> SweepConfig {
    let base = SweepConfig::focusing_fixture();
    SweepConfig {
        n: 128,
        lambda: 1.0,
        dt: 1e-3,
        t_end: 4.0,
        record_stride: 500,
        c_norm_list: vec![0.0],
        n_paths: 3,
        initial: InitialProfile::Gaussian { amplitude: 0.5, width: 1.0 },
        thresholds: SweepThresholds {
            scatter_window: 2.0,
            ..base.thresholds
        },
        ..base
    }
}

fn sweep_without_noise() -> Result<(), String> {
    let r = run_sweep(&small_defocusing_sweep(), Some(1)).map_err(err)?;
    ensure(r.strengths[0].estimate.p_hat == 1.0, || format!("p = {}", r.strengths[0].estimate.p_hat))?;
    let first = &r.trajectories[0];
    ensure(
        r.trajectories.iter().all(|t| t.scattering_residual == first.scattering_residual),
        || "noiseless paths differ".into(),
    )
}

fn martingale_degenerate_cases() -> Result<(), String> {
    let cons = quintic(vec![Complex64::new(0.0, 1.5)], SOLITON_SIGN)?;
    let r = martingale_audit(&cons, 1000, &[0.0, 0.5], 3).map_err(err)?;
    ensure(r.passed() && r.max_identity_error() <= 1e-13, || format!("conservative: {r:?}"))?;
    let m = quintic(vec![Complex64::new(1.0, 0.0)], SOLITON_SIGN)?;
    let r = martingale_audit(&m, 1000, &[0.0], 4).map_err(err)?;
    let c = &r.checkpoints[0];
    ensure(c.mean_ok && c.correlation_ok && c.identity_error <= 1e-14, || format!("t = 0: {c:?}"))
}

fn equivalence_degenerate_cases() -> Result<(), String> {
    for (phi, tol) in [(vec![], 1e-13), (vec![Complex64::new(0.0, 2.0)], 1e-11)] {
        let cfg = EquivalenceConfig {
            model: quintic(phi, SOLITON_SIGN)?,
            n_paths: 1,
            ..EquivalenceConfig::fixture()
        };
        let r = equivalence_audit(&cfg, &cfg.sample_paths().map_err(err)?, &[2e-3, 1e-3]).map_err(err)?;
        let worst = r.rows.iter().map(|row| row.max_error).fold(0.0, f64::max);
        ensure(worst <= tol, || format!("frame distance {worst:e}"))?;
    }
    Ok(())
}

fn persistence_round_trip() -> Result<(), String> {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    let dir = std::env::temp_dir().join(format!("snls-selftest-{}-{stamp}", std::process::id()));
    let result = (|| {
        let report = run_sweep(&small_defocusing_sweep(), Some(1)).map_err(err)?;
        persist_run(&report, &dir).map_err(err)?;
        ensure(load_run(&dir).map_err(err)? == report, || "reloaded report differs".into())?;
        let manifest = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&manifest).map_err(err)?;
        std::fs::write(&manifest, text.replace(&report.config_hash, &"0".repeat(64))).map_err(err)?;
        ensure(matches!(load_run(&dir), Err(ExperimentError::VersionMismatch(_))), || {
            "tampered hash accepted".into()
        })?;
        std::fs::write(&manifest, text).map_err(err)?;
        std::fs::remove_file(dir.join(TRAJECTORIES_FILE)).map_err(err)?;
        ensure(matches!(load_run(&dir), Err(ExperimentError::CorruptManifest(_))), || {
            "missing file accepted".into()
        })
    })();
    let _ = std::fs::remove_dir_all(&dir);
    result
}

const CASES: &[(&str, Check)] = &[
    ("grid-1d-spacing", grid_1d_spacing),
    ("grid-3d-points", grid_3d_points),
    ("grid-rejects-odd-resolution", grid_rejects_odd_resolution),
    ("propagator-zero-step", propagator_zero_step),
    ("propagator-unitary", propagator_unitary),
    ("lp-constant-field", lp_constant_field),
    ("parseval", parseval),
    ("h1-constant-field", h1_constant_field),
    ("h1-plane-wave", h1_plane_wave),
    ("strichartz-time-constant", strichartz_time_constant),
    ("strichartz-empty-interval", strichartz_empty_interval),
    ("noise-conservative-mode", noise_conservative_mode),
    ("noise-mixed-mode", noise_mixed_mode),
    ("path-starts-at-zero", path_starts_at_zero),
    ("path-is-deterministic", path_is_deterministic),
    ("gbm-identities", gbm_identities),
    ("rescale-identities", rescale_identities),
    ("exceedance-small-barrier", exceedance_small_barrier),
    ("phase-step-identities", phase_step_identities),
    ("noise-step-identities", noise_step_identities),
    ("free-run-is-exact", free_run_is_exact),
    ("residual-identities", residual_identities),
    ("budget-slack", budget_slack),
    ("duhamel-degenerate-cases", duhamel_degenerate_cases),
    ("nonlinearity-identities", nonlinearity_identities),
    ("strichartz-ratio-homogeneous", strichartz_ratio_homogeneous),
    ("sweep-without-noise", sweep_without_noise),
    ("martingale-degenerate-cases", martingale_degenerate_cases),
    ("equivalence-degenerate-cases", equivalence_degenerate_cases),
    ("persistence-round-trip", persistence_round_trip),
];

pub fn case_names() -> impl Iterator<Item = &'static str> {
    CASES.iter().map(|(n, _)| *n)
}

/// Runs every case; a panicking case counts as a failure.
pub fn run_selftest() -> SelfTestReport {
    let cases = CASES
        .iter()
        .map(|(name, check)| {
            let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
            SelfTestCase {
                name,
                passed: outcome.is_ok(),
                detail: outcome.err().unwrap_or_default(),
            }
        })
        .collect();
    SelfTestReport { cases }
}
