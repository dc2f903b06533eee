use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::spectral::{mass, FieldState, Frame, GridSpec, SpectralOps};

/// One Gaussian wave packet `a exp(-|x-x₀|²/(2w²) + iξ·x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    pub amplitude: Complex64,
    pub center: [f64; 3],
    pub width: f64,
    pub momentum: [f64; 3],
}

/// A random superposition of packets, described independently of any grid
/// so the same sample can be evaluated at several resolutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketSample {
    pub packets: Vec<Packet>,
}

/// Widths used for Strichartz and Lipschitz sampling.
pub const PACKET_WIDTHS: (f64, f64) = (0.5, 2.0);

impl PacketSample {
    /// Up to three packets with widths in [`PACKET_WIDTHS`], centered within a tenth of the box.
    pub fn draw_default<R: Rng + ?Sized>(rng: &mut R, dim: usize, length: f64) -> Self {
        Self::draw(rng, dim, PACKET_WIDTHS, length / 10.0, 3)
    }

    /// Up to `max_packets` packets with widths log-uniform in `widths`,
    /// centers within `spread` of the origin and momenta below `1/w`.
    pub fn draw<R: Rng + ?Sized>(rng: &mut R, dim: usize, widths: (f64, f64), spread: f64, max_packets: usize) -> Self {
        let count = rng.random_range(1..=max_packets.max(1));
        let (lw0, lw1) = (widths.0.ln(), widths.1.ln());
        let packets = (0..count)
            .map(|_| {
                let width = if lw1 > lw0 { rng.random_range(lw0..lw1).exp() } else { widths.0 };
                let mut center = [0.0; 3];
                let mut momentum = [0.0; 3];
                for a in 0..dim {
                    center[a] = if spread > 0.0 { rng.random_range(-spread..spread) } else { 0.0 };
                    momentum[a] = rng.random_range(-1.0..1.0) / width;
                }
                let r: f64 = rng.random_range(0.3..1.0);
                let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                Packet {
                    amplitude: Complex64::from_polar(r, th),
                    center,
                    width,
                    momentum,
                }
            })
            .collect();
        Self { packets }
    }

    pub fn evaluate(&self, grid: GridSpec, frame: Frame) -> FieldState {
        FieldState::from_fn(grid, frame, 0.0, |x| {
            self.packets
                .iter()
                .map(|p| {
                    let mut r2 = 0.0;
                    let mut phase = 0.0;
                    for a in 0..grid.dim() {
                        let y = x[a] - p.center[a];
                        r2 += y * y;
                        phase += p.momentum[a] * x[a];
                    }
                    p.amplitude * Complex64::from_polar((-0.5 * r2 / (p.width * p.width)).exp(), phase)
                })
                .sum()
        })
    }

    /// Grid values with modes above two thirds of the Nyquist wavenumber
    /// removed, scaled to unit L² norm.
    pub fn band_limited(&self, ops: &SpectralOps, frame: Frame) -> FieldState {
        let grid = *ops.grid();
        let mut f = self.evaluate(grid, frame);
        let k_nyq = std::f64::consts::PI / grid.spacing();
        let cut = (2.0 / 3.0 * k_nyq).powi(2);
        ops.forward(&mut f.values);
        for (z, &k2) in f.values.iter_mut().zip(ops.k_squared()) {
            if k2 > cut {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        ops.inverse(&mut f.values);
        let norm = mass(&f).sqrt();
        f.scaled(Complex64::new(1.0 / norm, 0.0))
    }
}
