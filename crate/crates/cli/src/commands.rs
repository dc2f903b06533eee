use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use snls_core::experiments::{persist_run, run_sweep, ExperimentError, SweepConfig, SUMMARY_FILE};
use snls_core::noise::{build_noise_model, decay_exceedance_probability, sample_path, EstimateMethod, NoiseError};
use snls_core::picard::{run_picard_experiment, PicardExperiment, Regime};
use snls_core::selftest::run_selftest;
use snls_core::solver::{gaussian, ground_state, integrate, BlowupThresholds, Outcome, SolverConfig, SolverError};
use snls_core::spectral::{make_grid, mass, Frame};

use crate::args::{Command, GbmArgs, PicardArgs, ProfileArg, SimulateArgs, SweepArgs};
use crate::{from_clap, Cli, ErrorLine};

fn log(cli: &Cli, event: serde_json::Value) {
    if cli.verbose {
        eprintln!("{event}");
    }
}

pub fn dispatch(cli: &Cli) -> Result<ExitCode, ErrorLine> {
    if let Some(w) = cli.workers {
        // Only fails if a global pool already exists, which is harmless here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let name = match &cli.command {
        Command::Simulate(_) => "simulate",
        Command::Sweep(_) => "sweep",
        Command::Gbm(_) => "gbm",
        Command::Picard(_) => "picard",
        Command::Selftest => "selftest",
    };
    let start = Instant::now();
    log(cli, serde_json::json!({ "event": "start", "command": name }));
    let code = match &cli.command {
        Command::Simulate(a) => simulate(a)?,
        Command::Sweep(a) => sweep(cli, a)?,
        Command::Gbm(a) => gbm(a)?,
        Command::Picard(a) => picard(a)?,
        Command::Selftest => selftest(),
    };
    log(
        cli,
        serde_json::json!({ "event": "done", "command": name, "elapsed_s": start.elapsed().as_secs_f64() }),
    );
    Ok(code)
}

/// Writes to stdout; a closed pipe (`snls ... | head`) is not an error.
fn emit_stdout(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn invalid(message: impl ToString) -> ErrorLine {
    ErrorLine {
        error: "validation-failure",
        parameter: None,
        message: message.to_string(),
    }
}

fn runtime(e: impl ToString) -> ErrorLine {
    ErrorLine::runtime(e.to_string())
}

fn noise_error(e: NoiseError) -> ErrorLine {
    match e {
        NoiseError::ExponentDimensionMismatch { .. } => ErrorLine::validation("alpha", e.to_string()),
        other => invalid(other),
    }
}

fn experiment_error(e: ExperimentError) -> ErrorLine {
    match e {
        ExperimentError::Config(m) => ErrorLine::validation("config", m),
        ExperimentError::VersionMismatch(m) => ErrorLine {
            error: "version-mismatch",
            parameter: Some("config".into()),
            message: m,
        },
        ExperimentError::Noise(n) => noise_error(n),
        other => runtime(other),
    }
}

#[derive(Debug, Serialize)]
struct SimulationSummary {
    outcome: Outcome,
    frame: Frame,
    seed: u64,
    c_norm: f64,
    final_time: f64,
    steps_taken: usize,
    initial_mass: f64,
    final_mass: f64,
    initial_grad: f64,
    peak_grad: f64,
    scattering_residual: Option<f64>,
    splitting_time: Option<f64>,
}

fn simulate(a: &SimulateArgs) -> Result<ExitCode, ErrorLine> {
    let grid = make_grid(a.dim, a.n, a.length).map_err(invalid)?;
    let model = build_noise_model(a.phi.0.clone(), a.alpha, a.lambda, a.dim).map_err(noise_error)?;
    let frame: Frame = a.frame.into();
    let cfg = SolverConfig {
        grid,
        model,
        dt: a.dt,
        t_end: a.t_end,
        frame,
        record_stride: a.record_stride,
        thresholds: BlowupThresholds {
            grad_cap_factor: a.grad_cap,
            amp_cap_factor: a.amp_cap,
            scatter_window: a.scatter_window,
            scatter_tol: a.scatter_tol,
        },
        store_fields: false,
    };
    cfg.validate().map_err(invalid)?;
    let initial = match a.profile {
        ProfileArg::Gaussian => gaussian(grid, frame, a.amplitude, a.width),
        ProfileArg::Soliton => ground_state(grid, frame, a.factor).map_err(|e| ErrorLine::validation("profile", e.to_string()))?,
    };
    let path_dt = a.path_dt.unwrap_or(match frame {
        Frame::Physical => a.dt,
        Frame::Rescaled => 0.5 * a.dt,
    });
    let path = sample_path(&cfg.model, path_dt, a.t_end, a.seed).map_err(noise_error)?;
    let rec = integrate(&cfg, &path, &initial).map_err(|e| match e {
        SolverError::PathMesh { .. } => ErrorLine::validation("path_dt", e.to_string()),
        other => runtime(other),
    })?;
    let d = &rec.diagnostics;
    let summary = SimulationSummary {
        outcome: rec.outcome,
        frame,
        seed: a.seed,
        c_norm: cfg.model.c_norm,
        final_time: rec.final_time(),
        steps_taken: d.steps_taken,
        initial_mass: mass(&initial),
        final_mass: mass(&rec.final_field),
        initial_grad: d.initial_grad,
        peak_grad: d.peak_grad,
        scattering_residual: d.scattering_residual,
        splitting_time: d.splitting_time,
    };
    let json = serde_json::to_string(&summary).map_err(runtime)?;
    emit_stdout(&format!("{json}\n"));
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(runtime)?;
        fs::write(dir.join("summary.json"), &json).map_err(runtime)?;
        let mut csv = String::from("time,mass,h1_norm,grad_norm,max_amplitude,h_c\n");
        for s in &rec.snapshots {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.time, s.mass, s.h1_norm, s.grad_norm, s.max_amplitude, s.h_c
            ));
        }
        fs::write(dir.join("snapshots.csv"), csv).map_err(runtime)?;
        let file = fs::File::create(dir.join("final_field.snls")).map_err(runtime)?;
        rec.final_field.write_snapshot(std::io::BufWriter::new(file)).map_err(runtime)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(cli: &Cli, a: &SweepArgs) -> Result<ExitCode, ErrorLine> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| ErrorLine::validation("config", format!("{}: {e}", a.config.display())))?;
    let mut cfg = SweepConfig::from_toml_str(&text).map_err(experiment_error)?;
    if let Some(n) = a.n_paths {
        cfg.n_paths = n;
    }
    if let Some(seed) = a.seed {
        cfg.base_seed = seed;
    }
    cfg.validate().map_err(experiment_error)?;
    log(
        cli,
        serde_json::json!({
            "event": "sweep-config",
            "strengths": cfg.c_norm_list,
            "n_paths": cfg.n_paths,
            "base_seed": cfg.base_seed,
        }),
    );
    let report = run_sweep(&cfg, cli.workers).map_err(experiment_error)?;
    persist_run(&report, &a.out).map_err(experiment_error)?;
    let summary = fs::read_to_string(a.out.join(SUMMARY_FILE)).map_err(runtime)?;
    emit_stdout(&summary);
    Ok(ExitCode::SUCCESS)
}

fn gbm(a: &GbmArgs) -> Result<ExitCode, ErrorLine> {
    let method: EstimateMethod = a.method.into();
    if a.alpha <= 1.0 {
        return Err(ErrorLine::validation("alpha", format!("must exceed 1, got {}", a.alpha)));
    }
    let mut out = String::from("c_norm,epsilon,method,p_hat,ci_lo,ci_hi,n_samples,seed\n");
    for &c in &a.c_norm {
        for &eps in &a.epsilon {
            let est = decay_exceedance_probability(c, eps, a.alpha, method, a.n_samples, a.seed).map_err(noise_error)?;
            out.push_str(&format!(
                "{c},{eps},{},{},{},{},{},{}\n",
                method.as_str(),
                est.p_hat,
                est.ci.0,
                est.ci.1,
                est.n_samples,
                est.seed.map(|s| s.to_string()).unwrap_or_default()
            ));
        }
    }
    emit_stdout(&out);
    Ok(ExitCode::SUCCESS)
}

fn picard(a: &PicardArgs) -> Result<ExitCode, ErrorLine> {
    let regime: Regime = a.regime.into();
    let mut exp = PicardExperiment::default_for(regime);
    if let Some(n) = a.n {
        exp.n = n;
    }
    if let Some(l) = a.length {
        exp.length = l;
    }
    if let Some(b) = a.bound {
        exp.bound = b;
    }
    if let Some(s) = a.steps {
        exp.steps = s;
    }
    exp.c_est = a.c_est.or(exp.c_est);
    if let Some(s) = a.strichartz_samples {
        exp.strichartz_samples = s;
    }
    if let Some(s) = a.pointwise_samples {
        if s < 100 {
            return Err(ErrorLine::validation("pointwise_samples", format!("must be at least 100, got {s}")));
        }
        exp.pointwise_samples = s;
    }
    if let Some(r) = a.refine {
        exp.refine = r;
    }
    exp.options.seed = a.seed;
    let report = run_picard_experiment(&exp).map_err(runtime)?;
    emit_stdout(&format!("{}\n", serde_json::to_string_pretty(&report).map_err(runtime)?));
    Ok(ExitCode::SUCCESS)
}

/// Front-end check run alongside the core self test.
fn cli_rejects_negative_dt() -> Result<(), String> {
    let err = Cli::try_parse_from(["snls", "simulate", "--dt", "-1"]).err().ok_or("--dt -1 was accepted")?;
    let line = from_clap(&err).ok_or("no error line")?;
    if line.error == "validation-failure" && line.parameter.as_deref() == Some("dt") {
        Ok(())
    } else {
        Err(format!("unexpected error line {line:?}"))
    }
}

fn selftest() -> ExitCode {
    let report = run_selftest();
    let mut cases: Vec<(String, Result<(), String>)> = report
        .cases
        .iter()
        .map(|c| (c.name.to_string(), if c.passed { Ok(()) } else { Err(c.detail.clone()) }))
        .collect();
    cases.push(("cli-rejects-negative-dt".into(), cli_rejects_negative_dt()));
    let mut stdout = std::io::stdout().lock();
    let mut failed = 0;
    for (name, outcome) in &cases {
        let _ = match outcome {
            Ok(()) => writeln!(stdout, "ok    {name}"),
            Err(detail) => {
                failed += 1;
                writeln!(stdout, "FAIL  {name}: {detail}")
            }
        };
    }
    let _ = writeln!(stdout, "{} passed, {failed} failed", cases.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
