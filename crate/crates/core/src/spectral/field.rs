use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{make_grid, GridSpec, SpectralError};

/// Which formulation a field belongs to: the Itô equation for `X` or the
/// random NLS for `u = e^{μ̂t - W(t)} X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Physical,
    Rescaled,
}

impl Frame {
    fn tag(self) -> u8 {
        match self {
            Frame::Physical => 0,
            Frame::Rescaled => 1,
        }
    }

    fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Frame::Physical),
            1 => Some(Frame::Rescaled),
            _ => None,
        }
    }
}

impl std::str::FromStr for Frame {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "physical" => Ok(Frame::Physical),
            "rescaled" => Ok(Frame::Rescaled),
            other => Err(format!("unknown frame '{other}' (expected physical|rescaled)")),
        }
    }
}

/// Complex field on a periodic grid at a given time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
    pub frame: Frame,
    pub time: f64,
}

impl FieldState {
    pub fn new(
        grid: GridSpec,
        values: Vec<Complex64>,
        frame: Frame,
        time: f64,
    ) -> Result<Self, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::SizeMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            grid,
            values,
            frame,
            time,
        })
    }

    pub fn zeros(grid: GridSpec, frame: Frame, time: f64) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            frame,
            time,
        }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(
        grid: GridSpec,
        frame: Frame,
        time: f64,
        f: impl Fn([f64; 3]) -> Complex64,
    ) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self {
            grid,
            values,
            frame,
            time,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<(), SpectralError> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(SpectralError::NonFinite)
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|z| *z *= factor);
        out
    }

    /// Pointwise difference `self - other`; grids must agree.
    pub fn difference(&self, other: &FieldState) -> Result<FieldState, SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(FieldState {
            grid: self.grid,
            values,
            frame: self.frame,
            time: self.time,
        })
    }

    /// Writes the binary snapshot: magic `SNLS1`, then little-endian
    /// `u32 d`, `u32 n`, `f64 L`, `u8 frame`, `f64 time`, then `n^d`
    /// interleaved `(re, im)` f64 pairs.
    pub fn write_snapshot<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(SNAPSHOT_MAGIC)?;
        w.write_all(&(self.grid.dim() as u32).to_le_bytes())?;
        w.write_all(&(self.grid.n() as u32).to_le_bytes())?;
        w.write_all(&self.grid.length().to_le_bytes())?;
        w.write_all(&[self.frame.tag()])?;
        w.write_all(&self.time.to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * self.values.len());
        for z in &self.values {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf)
    }

    pub fn read_snapshot<R: Read>(mut r: R) -> Result<Self, SpectralError> {
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(SpectralError::BadSnapshot("magic mismatch".into()));
        }
        let dim = read_u32(&mut r)? as usize;
        let n = read_u32(&mut r)? as usize;
        let length = read_f64(&mut r)?;
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        let frame = Frame::from_tag(tag[0])
            .ok_or_else(|| SpectralError::BadSnapshot(format!("frame tag {}", tag[0])))?;
        let time = read_f64(&mut r)?;
        let grid = make_grid(dim, n, length)?;
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            values.push(Complex64::new(re, im));
        }
        Ok(FieldState {
            grid,
            values,
            frame,
            time,
        })
    }
}

pub const SNAPSHOT_MAGIC: &[u8; 5] = b"SNLS1";

fn read_u32<R: Read>(r: &mut R) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> std::io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
