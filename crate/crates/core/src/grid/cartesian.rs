//! Periodic box `[-L, L)ⁿ` with `N` points per axis and FFT transforms under
//! the angular convention `û(ξ) = ∫ u(x) e^{-i x·ξ} dx`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianSpec {
    pub n: usize,
    pub points: usize,
    pub half_length: f64,
}

pub struct CartesianGrid {
    pub spec: CartesianSpec,
    pub spacing: f64,
    forward: Arc<dyn Fft<f64>>,
    backward: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CartesianGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CartesianGrid")
            .field("spec", &self.spec)
            .finish()
    }
}

impl CartesianGrid {
    pub fn new(spec: CartesianSpec) -> Result<Self> {
        if spec.n < 1 {
            return Err(Error::DimensionOutOfRange(spec.n, "n >= 1 required"));
        }
        if spec.n > 3 {
            return Err(Error::DimensionOutOfRange(
                spec.n,
                "cartesian grids support n <= 3",
            ));
        }
        if spec.points < 2 || !spec.points.is_power_of_two() {
            return Err(Error::InvalidSize(format!(
                "points per dimension {} must be a power of two",
                spec.points
            )));
        }
        if !(spec.half_length > 0.0) || !spec.half_length.is_finite() {
            return Err(Error::InvalidSize(format!(
                "box half-length {} must be positive",
                spec.half_length
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(CartesianGrid {
            spacing: 2.0 * spec.half_length / spec.points as f64,
            forward: planner.plan_fft_forward(spec.points),
            backward: planner.plan_fft_inverse(spec.points),
            spec,
        })
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn len(&self) -> usize {
        self.spec.points.pow(self.spec.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice spacing of the wavevectors, `π/L`.
    pub fn wave_spacing(&self) -> f64 {
        PI / self.spec.half_length
    }

    /// Coordinate of node index `j` along an axis.
    pub fn coord(&self, j: usize) -> f64 {
        -self.spec.half_length + j as f64 * self.spacing
    }

    /// Signed mode number of FFT index `m`.
    pub fn mode(&self, m: usize) -> i64 {
        let n = self.spec.points as i64;
        let m = m as i64;
        if m < n / 2 {
            m
        } else {
            m - n
        }
    }

    /// Multi-index of a linear index (last axis fastest).
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let n = self.spec.n;
        for a in (0..n).rev() {
            out[a] = idx % self.spec.points;
            idx /= self.spec.points;
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &j| acc * self.spec.points + j)
    }

    /// Physical position of a linear node index.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let m = self.unravel(idx);
        let mut x = [0.0; 3];
        for a in 0..self.spec.n {
            x[a] = self.coord(m[a]);
        }
        x
    }

    /// Wavevector of a linear coefficient index.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.unravel(idx);
        let mut k = [0.0; 3];
        for a in 0..self.spec.n {
            k[a] = self.mode(m[a]) as f64 * self.wave_spacing();
        }
        k
    }

    /// `|k|` for every coefficient, in storage order.
    pub fn wave_norms(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let k = self.wavevector(i);
                (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
            })
            .collect()
    }

    /// Cell volume `hⁿ`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.spec.n as i32)
    }

    fn sign(&self, idx: usize) -> f64 {
        let m = self.unravel(idx);
        let total: i64 = (0..self.spec.n).map(|a| self.mode(m[a])).sum();
        if total.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft_nd(&mut data, &self.forward);
        let scale = self.cell_volume();
        for (i, c) in data.iter_mut().enumerate() {
            *c *= scale * self.sign(i);
        }
        data
    }

    /// Real part of the inverse transform.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut data: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.sign(i))
            .collect();
        self.fft_nd(&mut data, &self.backward);
        let scale = (2.0 * self.spec.half_length)
            .powi(self.spec.n as i32)
            .recip();
        data.into_iter().map(|c| c.re * scale).collect()
    }

    fn fft_nd(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let np = self.spec.points;
        let total = data.len();
        let mut line = vec![Complex64::new(0.0, 0.0); np];
        for axis in 0..self.spec.n {
            let stride = np.pow((self.spec.n - 1 - axis) as u32);
            for start in 0..total {
                // first element of each line along this axis
                if (start / stride) % np != 0 {
                    continue;
                }
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * stride];
                }
                plan.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    data[start + j * stride] = *v;
                }
            }
        }
    }
}
