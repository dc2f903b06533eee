//! Acceptance gate. Runs every criterion, prints one line each and exits
//! non-zero if any fails. Positional arguments select criteria by number.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;
use snls_core::experiments::*;
use snls_core::noise::*;
use snls_core::picard::*;
use snls_core::solver::*;
use snls_core::spectral::*;
use snls_core::Complex64;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// `Φ(x)` by composite Simpson on `[-12, x]`.
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

fn within_3se(mc: &ProbabilityEstimate, exact: f64) -> bool {
    let se = mc.std_error().max(1.0 / mc.n_samples as f64);
    (mc.p_hat - exact).abs() <= 3.0 * se
}

fn gbm_exceedance() -> Check {
    let oracle = 2.0 * phi_simpson(-1.0);
    for alpha in [3.0, 5.0, 9.0] {
        let p = decay_exceedance_probability(1.0, 1.0, alpha, EstimateMethod::ClosedForm, 0, 0).map_err(|e| e.to_string())?;
        ensure((p.p_hat - oracle).abs() < 1e-12, format!("closed form {} vs 2Φ(-1) = {oracle} at α={alpha}", p.p_hat))?;
    }
    let mc = decay_exceedance_probability(1.0, 1.0, 5.0, EstimateMethod::MonteCarlo, 100_000, 1).map_err(|e| e.to_string())?;
    ensure(within_3se(&mc, oracle), format!("MC {} vs {oracle} (se {:.2e})", mc.p_hat, mc.std_error()))?;

    // brute force without the bridge, shifted by the discrete-maximum offset 0.5826·√dt
    let dt: f64 = 1e-3;
    let n = 4000u64;
    let hits = (0..n)
        .into_par_iter()
        .filter(|&i| reduced_running_sup(1.0, dt, 30.0, derived_seed(77, i)) > -0.5826 * dt.sqrt())
        .count() as f64;
    let pb = hits / n as f64;
    let se_b = (pb * (1.0 - pb) / n as f64).sqrt();
    ensure((pb - oracle).abs() <= 3.0 * se_b, format!("brute force {pb} vs {oracle}"))?;
    Ok(format!("closed {oracle:.6}, MC {:.5} ± {:.5}, brute {pb:.4}", mc.p_hat, mc.std_error()))
}

fn decay() -> Check {
    let strengths = [1.0, 2.0, 4.0, 8.0];
    let mut closed = Vec::new();
    for &c in &strengths {
        let exact = decay_exceedance_probability(c, 0.5, 5.0, EstimateMethod::ClosedForm, 0, 0).map_err(|e| e.to_string())?.p_hat;
        let mc = decay_exceedance_probability(c, 0.5, 5.0, EstimateMethod::MonteCarlo, 50_000, 2).map_err(|e| e.to_string())?;
        ensure(within_3se(&mc, exact), format!("c={c}: MC {} vs closed {exact}", mc.p_hat))?;
        closed.push(exact);
    }
    ensure(closed.windows(2).all(|w| w[1] < w[0]), format!("not strictly decreasing: {closed:?}"))?;
    ensure(closed[3] < 0.05, format!("P at ‖c‖=8 is {}", closed[3]))?;
    Ok(format!("closed {:?}", closed.iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>()))
}

fn propagator() -> Check {
    let grid = make_grid(1, 256, 40.0).map_err(|e| e.to_string())?;
    let u0 = gaussian(grid, Frame::Rescaled, 1.0, 1.0);
    let t = 1.0;
    let u1 = free_propagate(&u0, t).map_err(|e| e.to_string())?;
    // e^{-x²/2} evolves into (1+2it)^{-1/2} exp(-x²/(2(1+2it)))
    let z = Complex64::new(1.0, 2.0 * t);
    let exact = FieldState::from_fn(grid, Frame::Rescaled, t, |x| (-(x[0] * x[0]) / (2.0 * z)).exp() / z.sqrt());
    let err = (mass(&u1.difference(&exact).map_err(|e| e.to_string())?) / mass(&exact)).sqrt();
    ensure(err <= 1e-6, format!("closed-form error {err:.3e}"))?;

    let ops = SpectralOps::new(&grid);
    let mut v = u0.values.clone();
    for _ in 0..10_000 {
        ops.propagate(&mut v, 1e-4);
    }
    let evolved = FieldState::new(grid, v, Frame::Rescaled, 1.0).map_err(|e| e.to_string())?;
    let drift = (mass(&evolved) / mass(&u0) - 1.0).abs();
    ensure(drift <= 1e-12, format!("mass drift {drift:.3e} over 1e4 steps"))?;
    Ok(format!("closed-form error {err:.2e}, mass drift {drift:.2e}"))
}

fn martingale() -> Check {
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    // checkpoints keep the log-mass spread 2‖c‖√t at or below √2
    for (c, checkpoints) in [(0.5, vec![0.25, 0.5, 1.0, 2.0]), (2.0, vec![1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0])] {
        let model = build_noise_model(vec![Complex64::new(c, 0.0)], 5.0, SOLITON_SIGN, 1).map_err(|e| e.to_string())?;
        let identity = martingale_audit(&model, 100, &checkpoints, 31).map_err(|e| e.to_string())?;
        worst = worst.max(identity.max_identity_error());
        ensure(
            identity.max_identity_error() <= 1e-10,
            format!("c={c}: identity error {:.3e}", identity.max_identity_error()),
        )?;
        let ensemble = martingale_audit(&model, 10_000, &checkpoints, 32).map_err(|e| e.to_string())?;
        for cp in &ensemble.checkpoints {
            ensure(
                cp.mean_ok,
                format!("c={c} t={}: mean ratio {} (se {:.3e})", cp.time, cp.mean_ratio, cp.std_error),
            )?;
        }
        let last = ensemble.checkpoints.last().unwrap();
        notes.push(format!("c={c}: mean {:.4} ± {:.4} at t={}", last.mean_ratio, last.std_error, last.time));
    }
    Ok(format!("identity ≤ {worst:.1e}; {}", notes.join("; ")))
}

fn equivalence() -> Check {
    let cfg = EquivalenceConfig::fixture();
    let paths = cfg.sample_paths().map_err(|e| e.to_string())?;
    let rep = equivalence_audit(&cfg, &paths, &[4e-3, 2e-3, 1e-3, 5e-4]).map_err(|e| e.to_string())?;
    ensure(rep.ratios.len() == 3, "ladder has missing ratios")?;
    ensure(rep.max_ratio() <= 0.65, format!("ratios {:?}", rep.ratios))?;
    let errs: Vec<String> = rep.rows.iter().map(|r| format!("{:.2e}", r.error)).collect();
    let ratios: Vec<String> = rep.ratios.iter().map(|r| format!("{r:.3}")).collect();
    Ok(format!("errors {errs:?}, ratios {ratios:?}"))
}

fn contraction() -> Check {
    let mut notes = Vec::new();
    for regime in [Regime::EnergySmallTime, Regime::EnergyLargeTime, Regime::MassSmallTime, Regime::MassLargeTime] {
        let exp = PicardExperiment::default_for(regime);
        let rep = run_picard_experiment(&exp).map_err(|e| e.to_string())?;
        let c = &rep.contraction;
        let tag = format!("{} ({}d, n={})", regime.as_str(), exp.dim, exp.n);
        ensure(rep.budget.satisfied, format!("{tag}: budget not satisfied"))?;
        ensure(c.lipschitz_samples.len() >= 20, format!("{tag}: {} pairs", c.lipschitz_samples.len()))?;
        ensure(c.empirical_lipschitz <= 0.55, format!("{tag}: Lipschitz {}", c.empirical_lipschitz))?;
        ensure(c.converged, format!("{tag}: iteration did not converge"))?;
        // each distance shrinks by the contraction factor until it reaches roundoff
        let floor = 1e-11 * c.max_iterate_norm;
        let d = &c.iterate_distances;
        ensure(
            d.len() >= 2 && d.windows(2).all(|w| w[1] <= 0.55 * w[0] || w[1] <= floor),
            format!("{tag}: iterate distances {d:?}"),
        )?;
        let rate = c.geometric_rate.map_or("below roundoff".to_string(), |r| format!("{r:.2e}"));
        let residual = c.residual.ok_or(format!("{tag}: no split-step comparison"))?;
        ensure(residual <= 1e-3, format!("{tag}: residual {residual:.3e}"))?;
        notes.push(format!(
            "{tag}: C_est {:.3}, Lip {:.2e}, rate {rate}, residual {residual:.1e}",
            rep.c_est, c.empirical_lipschitz
        ));
    }
    Ok(notes.join("; "))
}

fn solitons() -> Check {
    let (sup, _) = ground_state_residual(make_grid(1, 512, 50.0).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(sup <= 1e-8, format!("Q residual {sup:.3e}"))?;

    let quiet = build_noise_model(vec![], 5.0, SOLITON_SIGN, 1).map_err(|e| e.to_string())?;
    let g = make_grid(1, 512, 40.0).map_err(|e| e.to_string())?;
    let cfg = SolverConfig {
        grid: g,
        model: quiet.clone(),
        dt: 1e-4,
        t_end: 1.0,
        frame: Frame::Rescaled,
        record_stride: 500,
        thresholds: BlowupThresholds::default(),
        store_fields: true,
    };
    let path = sample_path(&quiet, 5e-5, 1.0, 0).map_err(|e| e.to_string())?;
    let q = ground_state(g, Frame::Rescaled, 1.0).map_err(|e| e.to_string())?;
    let rec = integrate(&cfg, &path, &q).map_err(|e| e.to_string())?;
    let qn = mass(&q).sqrt();
    let mut drift: f64 = 0.0;
    for s in &rec.snapshots {
        let f = s.field.as_ref().ok_or("snapshot without field")?;
        let d: Vec<Complex64> = f.values.iter().zip(&q.values).map(|(a, b)| Complex64::new(a.norm() - b.re, 0.0)).collect();
        drift = drift.max(lp_norm_values(&d, g.cell_volume(), 2.0) / qn);
    }
    ensure(drift <= 1e-4, format!("soliton modulus drift {drift:.3e}"))?;

    let g = make_grid(1, 256, 40.0).map_err(|e| e.to_string())?;
    let data = ground_state(g, Frame::Rescaled, 1.1).map_err(|e| e.to_string())?;
    let mut times = Vec::new();
    for dt in [5e-4, 2.5e-4] {
        let cfg = SolverConfig {
            grid: g,
            model: quiet.clone(),
            dt,
            t_end: 2.0,
            frame: Frame::Rescaled,
            record_stride: 1000,
            thresholds: BlowupThresholds {
                grad_cap_factor: 5.0,
                amp_cap_factor: 2.5,
                ..BlowupThresholds::default()
            },
            store_fields: false,
        };
        let path = sample_path(&quiet, dt / 2.0, 2.0, 0).map_err(|e| e.to_string())?;
        let rec = integrate(&cfg, &path, &data).map_err(|e| e.to_string())?;
        match rec.outcome {
            Outcome::Blowup { time, .. } => times.push(time),
            other => return Err(format!("1.1Q at dt={dt}: {}", other.label())),
        }
    }
    let shift = (times[1] - times[0]).abs() / times[0];
    ensure(shift <= 0.02, format!("trigger times {times:?} move under dt halving"))?;
    Ok(format!("residual {sup:.1e}, soliton drift {drift:.1e}, blow-up at {times:?}"))
}

fn noise_curve() -> Check {
    let cfg = SweepConfig::focusing_fixture();
    let report = run_sweep(&cfg, None).map_err(|e| e.to_string())?;
    let s = &report.strengths;
    ensure(s.iter().all(|x| x.n_paths == 200), "expected 200 paths per strength")?;
    ensure(s[0].c_norm == 0.0 && s[0].estimate.p_hat == 0.0, format!("P̂ at strength 0 is {}", s[0].estimate.p_hat))?;
    for w in s.windows(2) {
        let (a, b) = (&w[0].estimate, &w[1].estimate);
        ensure(
            b.p_hat >= a.p_hat || b.ci.1 >= a.ci.0,
            format!("P̂ drops from {} to {} between ‖c‖={} and {}", a.p_hat, b.p_hat, w[0].c_norm, w[1].c_norm),
        )?;
    }
    let top = s.last().unwrap();
    ensure(top.c_norm == 16.0 && top.estimate.p_hat >= 0.8, format!("P̂ at ‖c‖=16 is {}", top.estimate.p_hat))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    persist_run(&report, dir.path()).map_err(|e| e.to_string())?;
    let loaded = load_run(dir.path()).map_err(|e| e.to_string())?;
    ensure(loaded == report, "reloaded report differs")?;
    let rerun = run_sweep(&loaded.config, Some(2)).map_err(|e| e.to_string())?;
    ensure(rerun == report, "rerun from the manifest differs")?;
    let curve: Vec<String> = s.iter().map(|x| format!("{}:{:.3}", x.c_norm, x.estimate.p_hat)).collect();
    Ok(format!("P̂ {curve:?}, reproduced from manifest"))
}

fn probes() -> Check {
    let r = probe_nonlinearity_estimates(3, 5.0, 2000, 4).map_err(|e| e.to_string())?;
    ensure((1.0..=5.0).contains(&r.pointwise), format!("pointwise constant {}", r.pointwise))?;
    ensure(r.pointwise_change() <= 0.05, format!("pointwise constant moves {:.3} under doubling", r.pointwise_change()))?;
    let ratios = r.norm_ratios.ok_or("no norm probes")?;
    for (name, v) in ["bound", "difference", "gradient"].iter().zip(ratios.as_array()) {
        ensure(v.is_finite() && v > 0.0 && v < 1e3, format!("{name} ratio {v}"))?;
    }
    let change = r.max_norm_change().ok_or("missing doubled or refined probes")?;
    ensure(change <= 0.1, format!("norm ratios move {change:.3} under doubling or refinement"))?;
    Ok(format!(
        "pointwise {:.4} (Δ {:.1e}), ratios {:?}, max change {change:.3}",
        r.pointwise,
        r.pointwise_change(),
        ratios.as_array().map(|v| (v * 1e4).round() / 1e4)
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("gbm-exceedance", gbm_exceedance),
        ("exceedance-decay", decay),
        ("spectral-propagator", propagator),
        ("mass-martingale", martingale),
        ("rescaling-equivalence", equivalence),
        ("picard-contraction", contraction),
        ("soliton-and-blowup", solitons),
        ("noise-curve", noise_curve),
        ("nonlinearity-probes", probes),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let k = i + 1;
        if !selected.is_empty() && !selected.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {k} {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {k} {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
