use proptest::prelude::*;
use rayon::prelude::*;
use snls_core::noise::stats::{ks_critical_1pct, ks_two_sample, mean, std_error_of_mean, wilson_interval, Z95};
use snls_core::noise::*;
use snls_core::spectral::{make_grid, FieldState, Frame};
use snls_core::Complex64;

/// `Φ(x)` by composite Simpson on `[-12, x]`, independent of the library's erfc.
fn phi_simpson(x: f64) -> f64 {
    let (a, n) = (-12.0, 20_000);
    let h = (x - a) / n as f64;
    let pdf = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = pdf(a) + pdf(x);
    for k in 1..n {
        s += pdf(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn unit_strength_unit_threshold_is_two_phi_minus_one() {
    let oracle = 2.0 * phi_simpson(-1.0);
    for alpha in [3.0, 5.0, 7.0 / 3.0] {
        let p = decay_exceedance_probability(1.0, 1.0, alpha, EstimateMethod::ClosedForm, 0, 0).unwrap();
        assert!((p.p_hat - oracle).abs() < 1e-12, "{} vs {oracle}", p.p_hat);
    }
    assert!((oracle - 0.3173).abs() < 1e-4);
}

#[test]
fn closed_form_agrees_with_discrete_brute_force() {
    // Discrete maxima undershoot the continuous one by about 0.5826·√dt.
    let dt: f64 = 1e-3;
    let shift = 0.5826 * dt.sqrt();
    let n = 4000u64;
    for (s, a) in [(1.0, 0.0), (2.0, -0.5), (0.5, 0.3)] {
        let hits = (0..n)
            .into_par_iter()
            .filter(|&i| reduced_running_sup(s, dt, 20.0 + 10.0 / s, derived_seed(11, i)) > a - shift)
            .count() as f64;
        let p = hits / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        let exact = closed_form_exceedance(s, a);
        assert!((p - exact).abs() <= 3.0 * se, "s={s} a={a}: brute {p} vs {exact} (se {se})");
    }
}

#[test]
fn monte_carlo_matches_closed_form_on_a_grid() {
    for c in [1.0, 2.0, 4.0] {
        for eps in [0.25, 0.5, 1.0] {
            let exact = decay_exceedance_probability(c, eps, 5.0, EstimateMethod::ClosedForm, 0, 0).unwrap();
            let mc = decay_exceedance_probability(c, eps, 5.0, EstimateMethod::MonteCarlo, 20_000, 3).unwrap();
            let se = mc.std_error().max(1.0 / mc.n_samples as f64);
            assert!((mc.p_hat - exact.p_hat).abs() <= 3.0 * se, "c={c} eps={eps}: {} vs {}", mc.p_hat, exact.p_hat);
            assert!(mc.tail_bound.unwrap() < 1e-4);
            assert!(mc.ci.0 <= mc.p_hat && mc.p_hat <= mc.ci.1);
        }
    }
}

#[test]
fn exceedance_decays_with_strength() {
    let p: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 64.0]
        .iter()
        .map(|&c| decay_exceedance_probability(c, 0.5, 5.0, EstimateMethod::ClosedForm, 0, 0).unwrap().p_hat)
        .collect();
    assert!(p.windows(2).all(|w| w[1] < w[0]), "{p:?}");
    assert!(p[3] < 0.05);
    assert!(p[4] < 1e-6);
}

#[test]
fn direct_and_reduced_suprema_share_a_law() {
    let model = build_noise_model(vec![Complex64::new(1.5, 0.0), Complex64::new(0.8, 0.3)], 5.0, -1.0, 1).unwrap();
    let (dt, horizon, n) = (1e-2, 10.0, 10_000u64);
    let direct: Vec<f64> = (0..n).into_par_iter().map(|i| direct_running_sup(&model, dt, horizon, derived_seed(1, i))).collect();
    let reduced: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| reduced_running_sup(model.c_norm, dt, horizon, derived_seed(1 << 40, i)))
        .collect();
    let d = ks_two_sample(&direct, &reduced);
    assert!(d < ks_critical_1pct(n as usize, n as usize), "KS {d}");
}

#[test]
fn martingale_variance_is_quadratic_variation() {
    let model = build_noise_model(vec![Complex64::new(0.6, 1.0), Complex64::new(-0.8, 0.0)], 5.0, -1.0, 1).unwrap();
    let n = 100_000u64;
    let m1: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| sample_path(&model, 0.05, 1.0, derived_seed(5, i)).unwrap().m_at(1.0).unwrap())
        .collect();
    let mu = mean(&m1);
    let sq: Vec<f64> = m1.iter().map(|m| (m - mu) * (m - mu)).collect();
    let var = mean(&sq);
    let se = std_error_of_mean(&sq);
    assert!((var - model.c_norm_sq()).abs() <= 3.0 * se, "{var} vs {} (se {se})", model.c_norm_sq());
}

#[test]
fn exponential_martingale_has_unit_mean() {
    let model = build_noise_model(vec![Complex64::new(0.5, 0.0)], 5.0, -1.0, 1).unwrap();
    let paths: Vec<BrownianPath> =
        (0..10_000u64).into_par_iter().map(|i| sample_path(&model, 0.1, 1.0, derived_seed(9, i)).unwrap()).collect();
    for j in 0..=10 {
        let e: Vec<f64> = paths.iter().map(|p| (2.0 * p.m[j] - 2.0 * model.c_norm_sq() * p.time(j)).exp()).collect();
        let (m, se) = (mean(&e), std_error_of_mean(&e));
        assert!((m - 1.0).abs() <= 3.0 * se + 1e-15, "t={}: {m} (se {se})", paths[0].time(j));
    }
}

#[test]
fn real_unit_mode() {
    let m = build_noise_model(vec![Complex64::new(1.0, 0.0)], 5.0, -1.0, 1).unwrap();
    assert_eq!(m.mu, 0.5);
    assert_eq!(m.mu_hat, Complex64::new(1.0, 0.0));
    assert_eq!(m.c(), vec![1.0]);
}

#[test]
fn off_mesh_times_are_rejected() {
    let m = build_noise_model(vec![Complex64::new(1.0, 0.0)], 5.0, -1.0, 1).unwrap();
    let p = sample_path(&m, 0.1, 1.0, 0).unwrap();
    assert!(matches!(eval_gbm(&p, &m, 0.15), Err(NoiseError::OffMesh(_))));
    let g = make_grid(1, 16, 4.0).unwrap();
    let u = FieldState::zeros(g, Frame::Rescaled, 0.0);
    assert!(rescale(&u, &p, &m, RescaleDirection::ToRescaled).is_err());
}

fn phi_strategy() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| Complex64::new(a, b)), 0..5)
}

proptest! {
    #[test]
    fn derived_quantities_are_consistent(phi in phi_strategy()) {
        let m = build_noise_model(phi.clone(), 5.0, -1.0, 1).unwrap();
        let sum_c2: f64 = phi.iter().map(|z| z.re * z.re).sum();
        prop_assert!(m.mu >= 0.0 && m.c_norm >= 0.0);
        prop_assert!((m.mu_hat.re - sum_c2).abs() <= 1e-14 * sum_c2.max(1.0));
        prop_assert!((m.c_norm_sq() - sum_c2).abs() <= 1e-12 * sum_c2.max(1.0));
    }

    #[test]
    fn gbm_is_positive_and_starts_at_one(phi in phi_strategy(), seed in any::<u64>()) {
        let m = build_noise_model(phi, 5.0, -1.0, 1).unwrap();
        let p = sample_path(&m, 0.05, 2.0, seed).unwrap();
        prop_assert_eq!(eval_gbm(&p, &m, 0.0).unwrap(), 1.0);
        for j in 0..=p.steps {
            prop_assert!(gbm_at_index(&p, &m, j) > 0.0);
        }
    }

    #[test]
    fn rescaling_round_trips(phi in phi_strategy(), seed in any::<u64>(), j in 0usize..=20) {
        let m = build_noise_model(phi, 5.0, -1.0, 1).unwrap();
        let p = sample_path(&m, 0.05, 1.0, seed).unwrap();
        let g = make_grid(1, 16, 4.0).unwrap();
        let mut f = FieldState::from_fn(g, Frame::Physical, 0.0, |x| Complex64::new(x[0].cos(), x[0].sin() * 0.3));
        f.time = p.time(j);
        let back = rescale(&rescale(&f, &p, &m, RescaleDirection::ToRescaled).unwrap(), &p, &m, RescaleDirection::ToPhysical).unwrap();
        for (a, b) in back.values.iter().zip(&f.values) {
            prop_assert!((a - b).norm() <= 1e-13 * b.norm().max(1.0));
        }
    }

    #[test]
    fn wilson_interval_brackets_the_estimate(n in 1u64..100_000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(k, n, Z95);
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
    }
}
