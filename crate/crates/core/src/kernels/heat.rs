use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::gamma::gamma_ur;

use super::subordinator::Subordinator;
use super::{clamp_noise, KernelKind, KernelProfile, QuadratureReport};
use crate::error::{Error, Result};
use crate::grid::{inverse_transform, Field, Grid, Spectrum};
use crate::params::Params;
use crate::quad::{hankel_integral, HankelLayout};
use crate::symbols::symbol_m;

/// Heat kernel of `-Δ + (-Δ)^s` in `ℝⁿ` as a Gaussian mixture over the
/// stable subordinator.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    pub n: usize,
    pub sub: Arc<Subordinator>,
}

impl HeatKernel {
    pub fn new(n: usize, s: f64) -> Self {
        HeatKernel {
            n,
            sub: Arc::new(Subordinator::new(s)),
        }
    }

    pub fn s(&self) -> f64 {
        self.sub.s
    }

    /// Mixture weights and Gaussian variances `τ = t + t^{1/s} x` at time `t`.
    pub fn mixture(&self, t: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let scale = t.powf(1.0 / self.s());
        self.sub
            .weights
            .iter()
            .zip(&self.sub.nodes)
            .map(move |(w, x)| (*w, t + scale * x))
    }

    pub fn at(&self, r: f64, t: f64) -> f64 {
        let half_n = 0.5 * self.n as f64;
        self.mixture(t)
            .map(|(w, tau)| w * (4.0 * PI * tau).powf(-half_n) * (-r * r / (4.0 * tau)).exp())
            .sum()
    }

    /// Bound on the mass dropped beyond the tabulated subordinator range.
    pub fn truncation_bound(&self, t: f64) -> f64 {
        let tau = t + t.powf(1.0 / self.s()) * self.sub.x_hi;
        self.sub.tail_mass(self.sub.x_hi) * (4.0 * PI * tau).powf(-0.5 * self.n as f64)
    }

    /// Mass of `H(·,t)` outside the ball of radius `radius`, exactly per
    /// Gaussian component.
    pub fn exterior_mass(&self, radius: f64, t: f64) -> f64 {
        let a = 0.5 * self.n as f64;
        self.mixture(t)
            .map(|(w, tau)| w * gamma_ur(a, radius * radius / (4.0 * tau)))
            .sum::<f64>()
            + self.sub.tail_mass(self.sub.x_hi)
    }
}

/// Radial profile of `H(·,t)`.
pub fn heat_kernel(grid: &Grid, t: f64, params: &Params) -> Result<KernelProfile> {
    let kernel = HeatKernel::new(grid.n(), params.s);
    heat_kernel_with(&kernel, grid, t)
}

pub(crate) fn heat_kernel_with(kernel: &HeatKernel, grid: &Grid, t: f64) -> Result<KernelProfile> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonpositiveTime(t));
    }
    let radial = grid.as_radial()?.clone();
    let mut values: Vec<f64> = radial.r.par_iter().map(|&r| kernel.at(r, t)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::QuadratureFailure(
            "non-finite heat kernel sample".into(),
        ));
    }
    let truncation = kernel.truncation_bound(t);
    let peak = values.iter().copied().fold(0.0, f64::max);
    if truncation > 1e-8 * peak {
        return Err(Error::QuadratureFailure(format!(
            "subordinator truncation {truncation:e} too large"
        )));
    }
    let mut report = QuadratureReport {
        method: "subordinated-gaussian-mixture".into(),
        mixture_nodes: kernel.sub.nodes.len(),
        truncation_estimate: truncation,
        ..Default::default()
    };
    clamp_noise(&mut values, &mut report)?;
    Ok(KernelProfile {
        grid: radial,
        values,
        kind: KernelKind::Heat { t },
        report,
    })
}

/// Mass of a radial heat profile: grid quadrature inside `r_max` plus the
/// analytic exterior mass.
pub fn heat_mass(profile: &KernelProfile, kernel: &HeatKernel) -> Result<f64> {
    let KernelKind::Heat { t } = profile.kind else {
        return Err(Error::InvalidParameter(
            "heat_mass needs a heat profile".into(),
        ));
    };
    let r_max = profile.grid.spec.r_max;
    Ok(profile.grid.integrate(&profile.values) + kernel.exterior_mass(r_max, t))
}

/// `H(r,t)` by direct Hankel inversion of `e^{-t m(ρ)}`.
pub fn heat_kernel_fourier(n: usize, s: f64, r: f64, t: f64) -> f64 {
    let nu = 0.5 * n as f64 - 1.0;
    let half_n = 0.5 * n as f64;
    let integral = hankel_integral(
        |rho: f64| (-t * symbol_m(rho, s)).exp() * rho.powf(half_n),
        nu,
        r,
        HankelLayout::default(),
        None::<fn(f64) -> f64>,
    );
    (2.0 * PI).powf(-half_n) * r.powf(-nu) * integral
}

/// Periodised heat kernel on a cartesian grid, sampled by exact spectral
/// synthesis.
pub fn heat_kernel_cartesian(grid: &Grid, t: f64, s: f64) -> Result<Field> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonpositiveTime(t));
    }
    grid.as_cartesian()?;
    let coeffs = grid
        .spectral_norms()
        .into_iter()
        .map(|k| Complex64::new((-t * symbol_m(k, s)).exp(), 0.0))
        .collect();
    inverse_transform(
        &Spectrum {
            grid: grid.clone(),
            coeffs,
        },
        grid,
    )
}
