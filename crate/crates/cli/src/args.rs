use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use snls_core::noise::{parse_complex_list, EstimateMethod};
use snls_core::picard::Regime;
use snls_core::spectral::Frame;
use snls_core::Complex64;

#[derive(Debug, Parser)]
#[command(name = "snls", version, about = "Split-step solver and Monte Carlo laboratory for the NLS with multiplicative noise")]
#[command(allow_negative_numbers = true, propagate_version = true)]
pub struct Cli {
    /// Worker threads for parallel loops [default: available parallelism]
    #[arg(long, global = true, value_parser = positive_usize)]
    pub workers: Option<usize>,

    /// Emit JSONL progress events on stderr
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and print a JSON summary
    Simulate(SimulateArgs),
    /// Run a noise-strength sweep from a TOML config and persist it
    Sweep(SweepArgs),
    /// Exceedance probability P(sup_{t >= 1/|c|} h_c(t) > epsilon), one CSV row per (c, epsilon)
    Gbm(GbmArgs),
    /// Picard fixed-point experiment for one regime, as JSON
    Picard(PicardArgs),
    /// Run the built-in self checks
    Selftest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProfileArg {
    /// A exp(-|x|^2 / (2 w^2))
    Gaussian,
    /// factor * Q, one dimension only
    Soliton,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FrameArg {
    Physical,
    Rescaled,
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Physical => Frame::Physical,
            FrameArg::Rescaled => Frame::Rescaled,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    ClosedForm,
    MonteCarlo,
}

impl From<MethodArg> for EstimateMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::ClosedForm => EstimateMethod::ClosedForm,
            MethodArg::MonteCarlo => EstimateMethod::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RegimeArg {
    EnergySmallTime,
    EnergyLargeTime,
    MassSmallTime,
    MassLargeTime,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::EnergySmallTime => Regime::EnergySmallTime,
            RegimeArg::EnergyLargeTime => Regime::EnergyLargeTime,
            RegimeArg::MassSmallTime => Regime::MassSmallTime,
            RegimeArg::MassLargeTime => Regime::MassLargeTime,
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    /// Spatial dimension (1, 2 or 3)
    #[arg(long, default_value_t = 1, value_parser = dimension)]
    pub dim: usize,
    /// Grid points per axis (power of two, at least 8)
    #[arg(long, default_value_t = 256, value_parser = resolution)]
    pub n: usize,
    /// Box side length L; the box is [-L/2, L/2)^d
    #[arg(long, default_value_t = 40.0, value_parser = positive_f64)]
    pub length: f64,
    /// Nonlinearity exponent; must be mass- or energy-critical for the dimension
    #[arg(long, default_value_t = 5.0, value_parser = finite_f64)]
    pub alpha: f64,
    /// Sign in front of |u|^{alpha-1} u: -1 (focusing), 1 (defocusing) or 0
    #[arg(long, default_value_t = -1.0, value_parser = sign)]
    pub lambda: f64,
    /// Noise coefficients as comma-separated complex literals, e.g. "1,0.5+2i"
    #[arg(long, default_value = "", value_parser = complex_list)]
    pub phi: ComplexList,
    /// Time step (time units)
    #[arg(long, default_value_t = 1e-3, value_parser = positive_f64)]
    pub dt: f64,
    /// Final time (time units)
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    pub t_end: f64,
    #[arg(long, value_enum, default_value_t = FrameArg::Physical)]
    pub frame: FrameArg,
    /// Brownian mesh (time units) [default: dt in the physical frame, dt/2 in the rescaled frame]
    #[arg(long, value_parser = positive_f64)]
    pub path_dt: Option<f64>,
    #[arg(long, value_enum, default_value_t = ProfileArg::Gaussian)]
    pub profile: ProfileArg,
    /// Gaussian amplitude A
    #[arg(long, default_value_t = 1.0, value_parser = finite_f64)]
    pub amplitude: f64,
    /// Gaussian width w (length units)
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    pub width: f64,
    /// Multiple of Q for the soliton profile
    #[arg(long, default_value_t = 1.0, value_parser = finite_f64)]
    pub factor: f64,
    /// Seed of the Brownian path
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record a snapshot every this many steps
    #[arg(long, default_value_t = 10, value_parser = positive_usize)]
    pub record_stride: usize,
    /// Blow-up cap on the gradient norm, as a multiple of its initial value
    #[arg(long, default_value_t = 1e3, value_parser = positive_f64)]
    pub grad_cap: f64,
    /// Blow-up cap on the sup norm, as a multiple of its initial value
    #[arg(long, default_value_t = 1e3, value_parser = positive_f64)]
    pub amp_cap: f64,
    /// Trailing window for the scattering residual (time units)
    #[arg(long, default_value_t = 5.0, value_parser = positive_f64)]
    pub scatter_window: f64,
    /// Relative scattering-residual tolerance
    #[arg(long, default_value_t = 1e-2, value_parser = positive_f64)]
    pub scatter_tol: f64,
    /// Directory for snapshots.csv, summary.json and the final field
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    /// Sweep config (TOML)
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for the manifest, JSONL and CSV files
    #[arg(long)]
    pub out: PathBuf,
    /// Override n_paths from the config
    #[arg(long, value_parser = positive_usize)]
    pub n_paths: Option<usize>,
    /// Override base_seed from the config
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct GbmArgs {
    /// Noise strengths |c|, comma-separated, each > 0
    #[arg(long, value_delimiter = ',', required = true, value_parser = positive_f64)]
    pub c_norm: Vec<f64>,
    /// Thresholds epsilon, comma-separated, each > 0
    #[arg(long, value_delimiter = ',', required = true, value_parser = positive_f64)]
    pub epsilon: Vec<f64>,
    /// Nonlinearity exponent (> 1)
    #[arg(long, default_value_t = 5.0, value_parser = positive_f64)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::ClosedForm)]
    pub method: MethodArg,
    /// Monte Carlo sample count
    #[arg(long, default_value_t = 100_000, value_parser = positive_u64)]
    pub n_samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PicardArgs {
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    /// Grid points per axis [default: 32 energy, 512 mass]
    #[arg(long, value_parser = resolution)]
    pub n: Option<usize>,
    /// Box side length [default: 16 energy, 40 mass]
    #[arg(long, value_parser = positive_f64)]
    pub length: Option<f64>,
    /// Data bound A, E or M of the regime [default: 1, 2, 1, 1]
    #[arg(long, value_parser = positive_f64)]
    pub bound: Option<f64>,
    /// Mesh steps over the interval
    #[arg(long, value_parser = positive_usize)]
    pub steps: Option<usize>,
    /// Fixed estimate constant; estimated from probes when absent
    #[arg(long, value_parser = positive_f64)]
    pub c_est: Option<f64>,
    /// Packet samples for the Strichartz constant
    #[arg(long, value_parser = positive_usize)]
    pub strichartz_samples: Option<usize>,
    /// Samples for the pointwise difference constant (at least 100)
    #[arg(long, value_parser = positive_usize)]
    pub pointwise_samples: Option<usize>,
    /// Split-step steps per mesh step for the reference run; 0 skips it
    #[arg(long)]
    pub refine: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn finite_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} is not finite"))
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v = finite_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be > 0, got {v}"))
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("must be a positive integer, got '{s}'")),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    positive_usize(s).map(|v| v as u64)
}

fn dimension(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v @ 1..=3) => Ok(v),
        _ => Err(format!("must be 1, 2 or 3, got '{s}'")),
    }
}

fn resolution(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 8 && v.is_power_of_two() => Ok(v),
        _ => Err(format!("must be a power of two >= 8, got '{s}'")),
    }
}

fn sign(s: &str) -> Result<f64, String> {
    let v = finite_f64(s)?;
    if [-1.0, 0.0, 1.0].contains(&v) {
        Ok(v)
    } else {
        Err(format!("must be -1, 0 or 1, got {v}"))
    }
}

#[derive(Debug, Clone)]
pub struct ComplexList(pub Vec<Complex64>);

fn complex_list(s: &str) -> Result<ComplexList, String> {
    parse_complex_list(s).map(ComplexList).map_err(|e| e.to_string())
}
