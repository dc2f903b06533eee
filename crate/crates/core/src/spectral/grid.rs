use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Uniform periodic grid on the box `[-L/2, L/2)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    length: f64,
}

/// Builds a grid with `n` points per axis on a box of side `length`.
pub fn make_grid(dim: usize, n: usize, length: f64) -> Result<GridSpec, SpectralError> {
    if !(1..=3).contains(&dim) {
        return Err(SpectralError::InvalidDimension(dim));
    }
    if n < 8 || !n.is_power_of_two() {
        return Err(SpectralError::InvalidResolution(n));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(SpectralError::InvalidLength(length));
    }
    Ok(GridSpec { dim, n, length })
}

impl GridSpec {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of grid points, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Volume element of the Riemann sum, `dx^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Coordinate of index `j` along one axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coordinate(j)).collect()
    }

    /// Angular wavenumber of FFT bin `j`. The Nyquist bin maps to `-n/2`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let n = self.n as isize;
        let j = j as isize;
        let m = if j < n / 2 { j } else { j - n };
        2.0 * std::f64::consts::PI * m as f64 / self.length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.wavenumber(j)).collect()
    }

    /// Splits a flat row-major index into per-axis indices (last axis fastest).
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for axis in (0..self.dim).rev() {
            idx[axis] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    /// Position vector of a flat index (unused axes are zero).
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.coordinate(idx[axis]);
        }
        x
    }

    /// Squared distance from the box center for every grid point.
    pub fn radius_squared(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.position(i).iter().map(|x| x * x).sum())
            .collect()
    }

    /// `|k|^2` for every flat index.
    pub fn wavenumber_squared(&self) -> Vec<f64> {
        let k = self.wavenumbers();
        (0..self.len())
            .map(|i| {
                let idx = self.unravel(i);
                (0..self.dim).map(|a| k[idx[a]] * k[idx[a]]).sum()
            })
            .collect()
    }
}
