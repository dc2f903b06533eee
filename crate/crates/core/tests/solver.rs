use snls_core::noise::{build_noise_model, rescale, sample_path, NoiseModel, RescaleDirection, SOLITON_SIGN};
use snls_core::solver::*;
use snls_core::spectral::{free_propagate, lp_norm_values, make_grid, mass, FieldState, Frame, GridSpec};
use snls_core::Complex64;

fn quiet(lambda: f64) -> NoiseModel {
    build_noise_model(vec![], 5.0, lambda, 1).unwrap()
}

fn config(grid: GridSpec, model: NoiseModel, dt: f64, t_end: f64, frame: Frame) -> SolverConfig {
    SolverConfig {
        grid,
        model,
        dt,
        t_end,
        frame,
        record_stride: 10,
        thresholds: BlowupThresholds::default(),
        store_fields: true,
    }
}

fn rel_l2(a: &FieldState, b: &FieldState) -> f64 {
    (mass(&a.difference(b).unwrap()) / mass(b)).sqrt()
}

#[test]
fn linear_run_is_free_evolution() {
    let g = make_grid(1, 128, 30.0).unwrap();
    let cfg = config(g, quiet(0.0), 1e-2, 1.0, Frame::Physical);
    let path = sample_path(&cfg.model, 1e-2, 1.0, 3).unwrap();
    let u0 = gaussian(g, Frame::Physical, 1.0, 1.5);
    let rec = integrate(&cfg, &path, &u0).unwrap();
    let exact = free_propagate(&u0, 1.0).unwrap();
    let err = rec
        .final_field
        .values
        .iter()
        .zip(&exact.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
    assert_eq!(rec.outcome, Outcome::GlobalScattering);
}

#[test]
fn ground_state_residual_on_wide_box() {
    let (sup, l2) = ground_state_residual(make_grid(1, 512, 50.0).unwrap()).unwrap();
    assert!(sup <= 1e-8 && l2 <= 1e-8, "{sup} {l2}");
}

#[test]
fn soliton_is_stationary() {
    let g = make_grid(1, 512, 40.0).unwrap();
    let mut cfg = config(g, quiet(SOLITON_SIGN), 1e-4, 1.0, Frame::Rescaled);
    cfg.record_stride = 500;
    let path = sample_path(&cfg.model, 5e-5, 1.0, 0).unwrap();
    let q = ground_state(g, Frame::Rescaled, 1.0).unwrap();
    let rec = integrate(&cfg, &path, &q).unwrap();
    let qn = mass(&q).sqrt();
    for s in &rec.snapshots {
        let f = s.field.as_ref().unwrap();
        let d: Vec<Complex64> = f
            .values
            .iter()
            .zip(&q.values)
            .map(|(a, b)| Complex64::new(a.norm() - b.re, 0.0))
            .collect();
        let rel = lp_norm_values(&d, g.cell_volume(), 2.0) / qn;
        assert!(rel < 1e-4, "t = {}: {rel}", s.time);
    }
}

#[test]
fn the_other_sign_does_not_hold_q() {
    let g = make_grid(1, 256, 40.0).unwrap();
    let cfg = config(g, quiet(-SOLITON_SIGN), 1e-3, 1.0, Frame::Rescaled);
    let path = sample_path(&cfg.model, 5e-4, 1.0, 0).unwrap();
    let q = ground_state(g, Frame::Rescaled, 1.0).unwrap();
    let rec = integrate(&cfg, &path, &q).unwrap();
    let amp: Vec<Complex64> = rec.final_field.values.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect();
    let a = FieldState::new(g, amp, Frame::Rescaled, 1.0).unwrap();
    assert!(rel_l2(&a, &q) > 1e-2);
}

#[test]
fn halving_dt_at_least_halves_the_error() {
    let g = make_grid(1, 256, 40.0).unwrap();
    let mut finals = Vec::new();
    for dt in [4e-3, 2e-3, 1e-3, 5e-4] {
        let cfg = config(g, quiet(SOLITON_SIGN), dt, 0.5, Frame::Rescaled);
        let path = sample_path(&cfg.model, dt / 2.0, 0.5, 0).unwrap();
        finals.push(integrate(&cfg, &path, &gaussian(g, Frame::Rescaled, 0.8, 1.0)).unwrap().final_field);
    }
    let d: Vec<f64> = finals.windows(2).map(|w| mass(&w[0].difference(&w[1]).unwrap()).sqrt()).collect();
    for w in d.windows(2) {
        assert!(w[1] / w[0] <= 0.65, "{d:?}");
    }
}

fn noisy() -> NoiseModel {
    build_noise_model(vec![Complex64::new(0.5, 0.3), Complex64::new(-0.4, 0.9)], 5.0, SOLITON_SIGN, 1).unwrap()
}

#[test]
fn rescaled_frame_conserves_mass() {
    let g = make_grid(1, 128, 30.0).unwrap();
    let cfg = config(g, noisy(), 2e-3, 1.0, Frame::Rescaled);
    let path = sample_path(&cfg.model, 1e-3, 1.0, 11).unwrap();
    let rec = integrate(&cfg, &path, &gaussian(g, Frame::Rescaled, 0.9, 1.2)).unwrap();
    let m0 = rec.snapshots[0].mass;
    for s in &rec.snapshots {
        assert!((s.mass / m0 - 1.0).abs() < 1e-10);
    }
}

#[test]
fn physical_mass_follows_the_exponential_martingale() {
    let g = make_grid(1, 128, 30.0).unwrap();
    let model = noisy();
    let cfg = config(g, model.clone(), 2e-3, 1.0, Frame::Physical);
    let path = sample_path(&model, 1e-3, 1.0, 5).unwrap();
    let rec = integrate(&cfg, &path, &gaussian(g, Frame::Physical, 0.9, 1.2)).unwrap();
    let m0 = rec.snapshots[0].mass;
    for s in &rec.snapshots {
        let law = (2.0 * path.m_at(s.time).unwrap() - 2.0 * model.c_norm_sq() * s.time).exp();
        assert!((s.mass / (m0 * law) - 1.0).abs() < 1e-10);
        // h_c is the (α-1)/2 power of the mass ratio
        assert!((s.h_c / (s.mass / m0).powf(2.0) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn frames_agree_after_rescaling() {
    let g = make_grid(1, 128, 30.0).unwrap();
    let model = noisy();
    let path = sample_path(&model, 2.5e-4, 0.5, 21).unwrap();
    let rx = integrate(&config(g, model.clone(), 1e-3, 0.5, Frame::Physical), &path, &gaussian(g, Frame::Physical, 0.8, 1.0)).unwrap();
    let ru = integrate(&config(g, model.clone(), 1e-3, 0.5, Frame::Rescaled), &path, &gaussian(g, Frame::Rescaled, 0.8, 1.0)).unwrap();
    let x = rescale(&rx.final_field, &path, &model, RescaleDirection::ToRescaled).unwrap();
    assert!(rel_l2(&x, &ru.final_field) < 1e-2);
}

#[test]
fn runs_are_deterministic() {
    let g = make_grid(1, 64, 20.0).unwrap();
    let cfg = config(g, noisy(), 1e-3, 0.2, Frame::Physical);
    let path = sample_path(&cfg.model, 1e-3, 0.2, 2).unwrap();
    let u0 = gaussian(g, Frame::Physical, 1.0, 1.0);
    assert_eq!(integrate(&cfg, &path, &u0).unwrap(), integrate(&cfg, &path, &u0).unwrap());
}

fn blowup_run(n: usize, dt: f64) -> TrajectoryRecord {
    let g = make_grid(1, n, 40.0).unwrap();
    let mut cfg = config(g, quiet(SOLITON_SIGN), dt, 2.0, Frame::Rescaled);
    cfg.thresholds.grad_cap_factor = 5.0;
    cfg.thresholds.amp_cap_factor = 2.5;
    cfg.store_fields = false;
    let path = sample_path(&cfg.model, dt / 2.0, 2.0, 0).unwrap();
    integrate(&cfg, &path, &ground_state(g, Frame::Rescaled, 1.1).unwrap()).unwrap()
}

#[test]
fn supercritical_q_blows_up_under_refinement() {
    let times: Vec<f64> = [(256, 5e-4), (256, 2.5e-4), (512, 2.5e-4)]
        .into_iter()
        .map(|(n, dt)| match blowup_run(n, dt).outcome {
            Outcome::Blowup { time, unstable } => {
                assert!(!unstable);
                time
            }
            o => panic!("{o:?}"),
        })
        .collect();
    assert!((times[0] - times[1]).abs() < 0.01, "{times:?}");
    assert!((times[1] - times[2]).abs() < 0.03, "{times:?}");
    // the gradient grows monotonically up to the trigger
    let rec = blowup_run(256, 2.5e-4);
    for w in rec.snapshots.windows(2) {
        assert!(w[1].grad_norm > w[0].grad_norm);
    }
}

#[test]
fn residual_vanishes_for_free_evolution() {
    let g = make_grid(1, 128, 30.0).unwrap();
    let cfg = config(g, quiet(0.0), 1e-2, 1.0, Frame::Rescaled);
    let path = sample_path(&cfg.model, 5e-3, 1.0, 0).unwrap();
    let rec = integrate(&cfg, &path, &gaussian(g, Frame::Rescaled, 1.0, 1.0)).unwrap();
    assert_eq!(scattering_residual(&rec, 0.3, 0.3).unwrap(), 0.0);
    for (t1, t2) in [(0.0, 1.0), (0.1, 0.7), (0.5, 0.6)] {
        assert!(scattering_residual(&rec, t1, t2).unwrap() < 1e-12);
    }
    assert!(matches!(scattering_residual(&rec, 0.0, 0.55), Err(SolverError::MissingSnapshot(_))));
}

#[test]
fn defocusing_residual_decreases_along_the_run() {
    let g = make_grid(1, 256, 80.0).unwrap();
    let mut cfg = config(g, quiet(-SOLITON_SIGN), 5e-3, 4.0, Frame::Rescaled);
    cfg.record_stride = 100;
    let path = sample_path(&cfg.model, 2.5e-3, 4.0, 0).unwrap();
    let rec = integrate(&cfg, &path, &gaussian(g, Frame::Rescaled, 1.0, 1.0)).unwrap();
    let r: Vec<f64> = (0..4)
        .map(|k| relative_scattering_residual(&rec, k as f64 * 0.5, k as f64 * 0.5 + 2.0).unwrap())
        .collect();
    for w in r.windows(2) {
        assert!(w[1] < w[0], "{r:?}");
    }
}

#[test]
fn nan_state_is_unstable_blowup() {
    let g = make_grid(1, 64, 20.0).unwrap();
    let cfg = config(g, quiet(0.0), 1e-2, 0.5, Frame::Rescaled);
    let path = sample_path(&cfg.model, 5e-3, 0.5, 0).unwrap();
    let mut rec = integrate(&cfg, &path, &gaussian(g, Frame::Rescaled, 1.0, 1.0)).unwrap();
    assert_eq!(classify_outcome(&rec, &cfg.thresholds), Outcome::GlobalScattering);
    let k = 3;
    rec.snapshots[k].grad_norm = f64::NAN;
    let t = rec.snapshots[k].time;
    assert_eq!(
        classify_outcome(&rec, &cfg.thresholds),
        Outcome::Blowup { time: t, unstable: true }
    );
}

#[test]
fn invalid_configs_are_rejected() {
    let g = make_grid(1, 64, 20.0).unwrap();
    let path = sample_path(&quiet(0.0), 1e-2, 1.0, 0).unwrap();
    let u0 = gaussian(g, Frame::Rescaled, 1.0, 1.0);
    let mut cfg = config(g, quiet(0.0), 1e-2, 1.0, Frame::Rescaled);
    cfg.dt = -1.0;
    assert!(matches!(integrate(&cfg, &path, &u0), Err(SolverError::InvalidConfig(_))));
    cfg.dt = 0.3;
    assert!(integrate(&cfg, &path, &u0).is_err());
    cfg.dt = 1e-2;
    cfg.record_stride = 0;
    assert!(integrate(&cfg, &path, &u0).is_err());
    cfg.record_stride = 1;
    cfg.thresholds.scatter_tol = 0.0;
    assert!(integrate(&cfg, &path, &u0).is_err());
    cfg.thresholds = BlowupThresholds::default();
    // the rescaled scheme needs the path at dt/2
    assert!(matches!(integrate(&cfg, &path, &u0), Err(SolverError::PathMesh { .. })));
    cfg.frame = Frame::Physical;
    assert!(matches!(integrate(&cfg, &path, &u0), Err(SolverError::FrameMismatch { .. })));
    cfg.t_end = 2.0;
    let x0 = gaussian(g, Frame::Physical, 1.0, 1.0);
    assert!(matches!(integrate(&cfg, &path, &x0), Err(SolverError::PathTooShort { .. })));
}

#[test]
fn coefficient_driver_matches_path_driver() {
    let g = make_grid(1, 64, 20.0).unwrap();
    let model = noisy();
    let path = sample_path(&model, 5e-4, 0.2, 8).unwrap();
    let cfg = config(g, model.clone(), 1e-3, 0.2, Frame::Rescaled);
    let u0 = gaussian(g, Frame::Rescaled, 1.0, 1.0);
    let a = integrate(&cfg, &path, &u0).unwrap();
    let h = |t: f64| snls_core::noise::eval_gbm(&path, &model, t).unwrap();
    let b = integrate_with_coefficient(&cfg, &h, &u0).unwrap();
    assert_eq!(a.final_field.values, b.final_field.values);
}
