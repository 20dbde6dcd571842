//! Radial discretisation: composite Gauss–Legendre rules in `r` and in the
//! frequency `ρ = |ξ|`, with dyadic panels clustered toward the origin, and
//! the dense Hankel-transform matrices between them.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{composite_rule, PANEL_ORDER};
use crate::special::{bessel_j, sphere_area};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSpec {
    pub n: usize,
    pub r_max: f64,
    pub n_r: usize,
    pub rho_max: f64,
    pub n_rho: usize,
}

impl RadialSpec {
    /// Spectral extent defaults to 32 with as many nodes as in `r`.
    pub fn new(n: usize, r_max: f64, n_r: usize) -> Self {
        RadialSpec {
            n,
            r_max,
            n_r,
            rho_max: 32.0,
            n_rho: n_r,
        }
    }

    pub fn with_spectrum(mut self, rho_max: f64, n_rho: usize) -> Self {
        self.rho_max = rho_max;
        self.n_rho = n_rho;
        self
    }
}

#[derive(Debug)]
pub struct RadialGrid {
    pub spec: RadialSpec,
    pub r: Vec<f64>,
    /// Weights for `∫_0^{r_max} · dr`.
    pub w: Vec<f64>,
    pub rho: Vec<f64>,
    /// Weights for `∫_0^{ρ_max} · dρ`.
    pub rho_w: Vec<f64>,
    matrices: OnceLock<Matrices>,
}

#[derive(Debug)]
struct Matrices {
    /// `n_rho × n_r`, row-major.
    forward: Vec<f64>,
    /// `n_r × n_rho`, row-major.
    inverse: Vec<f64>,
}

impl RadialGrid {
    pub fn new(spec: RadialSpec) -> Result<Self> {
        if spec.n < 2 {
            return Err(Error::DimensionOutOfRange(
                spec.n,
                "radial grids need n >= 2",
            ));
        }
        for (name, extent, count) in [
            ("r", spec.r_max, spec.n_r),
            ("rho", spec.rho_max, spec.n_rho),
        ] {
            if !(extent > 0.0) || !extent.is_finite() {
                return Err(Error::InvalidSize(format!(
                    "{name} extent {extent} must be positive"
                )));
            }
            if count % PANEL_ORDER != 0 || count < 3 * PANEL_ORDER {
                return Err(Error::InvalidSize(format!(
                    "{name} node count {count} must be a multiple of {PANEL_ORDER} and at least {}",
                    3 * PANEL_ORDER
                )));
            }
        }
        let (r, w) = composite_rule(&clustered_breaks(spec.r_max, spec.n_r / PANEL_ORDER));
        let (rho, rho_w) =
            composite_rule(&clustered_breaks(spec.rho_max, spec.n_rho / PANEL_ORDER));
        Ok(RadialGrid {
            spec,
            r,
            w,
            rho,
            rho_w,
            matrices: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Bessel order `n/2 - 1` of the radial transform.
    pub fn order(&self) -> f64 {
        0.5 * self.spec.n as f64 - 1.0
    }

    /// `∫_{|x| < r_max} f(|x|) dx` from samples at the nodes.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let n = self.spec.n as i32;
        sphere_area(self.spec.n)
            * self
                .r
                .iter()
                .zip(&self.w)
                .zip(values)
                .map(|((r, w), v)| w * r.powi(n - 1) * v)
                .sum::<f64>()
    }

    /// `(2π)^{-n} ∫_{|ξ| < ρ_max} g(|ξ|) dξ` from samples at the spectral nodes.
    pub fn integrate_spectral(&self, values: &[f64]) -> f64 {
        let n = self.spec.n as i32;
        sphere_area(self.spec.n) / (2.0 * PI).powi(n)
            * self
                .rho
                .iter()
                .zip(&self.rho_w)
                .zip(values)
                .map(|((r, w), v)| w * r.powi(n - 1) * v)
                .sum::<f64>()
    }

    fn matrices(&self) -> &Matrices {
        self.matrices.get_or_init(|| {
            let nu = self.order();
            let half = 0.5 * self.spec.n as f64;
            let c_fwd = (2.0 * PI).powf(half);
            let forward: Vec<f64> = self
                .rho
                .par_iter()
                .flat_map_iter(|&q| {
                    self.r.iter().zip(&self.w).map(move |(&r, &w)| {
                        c_fwd * q.powf(-nu) * w * r.powf(half) * bessel_j(nu, q * r)
                    })
                })
                .collect();
            let inverse: Vec<f64> = self
                .r
                .par_iter()
                .flat_map_iter(|&r| {
                    self.rho.iter().zip(&self.rho_w).map(move |(&q, &w)| {
                        r.powf(-nu) * w * q.powf(half) * bessel_j(nu, q * r) / c_fwd
                    })
                })
                .collect();
            Matrices { forward, inverse }
        })
    }

    /// `û(ρ_j) = (2π)^{n/2} ρ^{1-n/2} ∫ u(r) J_{n/2-1}(rρ) r^{n/2} dr`.
    pub fn forward(&self, values: &[f64]) -> Vec<f64> {
        matvec(&self.matrices().forward, values, self.rho.len())
    }

    /// Inverse of [`RadialGrid::forward`], back onto the `r` nodes.
    pub fn inverse(&self, spectrum: &[f64]) -> Vec<f64> {
        matvec(&self.matrices().inverse, spectrum, self.r.len())
    }

    /// Index of the largest node not exceeding `r`.
    pub fn index_below(&self, r: f64) -> usize {
        self.r.partition_point(|&x| x <= r).saturating_sub(1)
    }
}

fn matvec(m: &[f64], x: &[f64], rows: usize) -> Vec<f64> {
    let cols = x.len();
    (0..rows)
        .into_par_iter()
        .map(|i| {
            m[i * cols..(i + 1) * cols]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

/// Panel edges on `[0, extent]`: dyadic panels below `c = min(1, extent/8)`
/// (a quarter of the panels), uniform panels above.
pub(crate) fn clustered_breaks(extent: f64, panels: usize) -> Vec<f64> {
    let c = (extent / 8.0).min(1.0);
    let geometric = (panels / 4).max(1);
    let uniform = panels - geometric - 1;
    let mut breaks = vec![0.0];
    for k in (0..=geometric).rev() {
        breaks.push(c * 0.5f64.powi(k as i32));
    }
    for k in 1..=uniform {
        breaks.push(c + (extent - c) * k as f64 / uniform as f64);
    }
    breaks
}
