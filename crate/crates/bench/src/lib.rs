//! Benchmark fixtures shared by the criterion benches.

use snls_core::noise::{build_noise_model, NoiseModel, SOLITON_SIGN};
use snls_core::solver::{ground_state, BlowupThresholds, SolverConfig};
use snls_core::spectral::{make_grid, FieldState, Frame};
use snls_core::Complex64;

/// d=1 quintic, one real mode of strength `c`, soliton-scaled data on `n` points.
pub fn quintic_fixture(n: usize, c: f64, frame: Frame, t_end: f64) -> (SolverConfig, FieldState) {
    let grid = make_grid(1, n, 40.0).expect("bench grid");
    let model: NoiseModel =
        build_noise_model(vec![Complex64::new(c, 0.0)], 5.0, SOLITON_SIGN, 1).expect("bench model");
    let cfg = SolverConfig {
        grid,
        model,
        dt: 5e-4,
        t_end,
        frame,
        record_stride: 100,
        thresholds: BlowupThresholds::default(),
        store_fields: false,
    };
    let u0 = ground_state(grid, frame, 0.9).expect("d = 1");
    (cfg, u0)
}
