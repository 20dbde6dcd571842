//! Physical-space kernels on radial grids: heat kernel `H(·,t)`, fundamental
//! solution `Z`, Riesz kernels, the split `Z = Z₁ + Z₂`, barrier profiles and
//! log-log bound verification.

mod barrier;
mod bounds;
mod fundamental;
mod heat;
mod identity;
mod riesz;
pub mod subordinator;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;

pub use barrier::{ball_transform, barrier_profile, BarrierKind};
pub use bounds::{fit_loglog, verify_kernel_bounds, BoundReport, LogLogFit};
pub use fundamental::{
    fundamental_at_direct, fundamental_cross_check, fundamental_solution, split_kernels, z1_at,
    z2_at, FundamentalMethod,
};
pub use heat::{heat_kernel, heat_kernel_cartesian, heat_kernel_fourier, heat_mass, HeatKernel};
pub use identity::{
    distributional_identity, schwartz_battery, time_frequency_l1, IdentityCheck, TestProfile,
};
pub use riesz::{gamma_alpha, riesz_kernel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    Heat { t: f64 },
    Fundamental,
    Riesz { alpha: f64 },
    Z1,
    Z2,
    Barrier { which: BarrierKind },
}

impl KernelKind {
    pub fn label(&self) -> String {
        match self {
            KernelKind::Heat { t } => format!("heat(t={t})"),
            KernelKind::Fundamental => "fundamental".into(),
            KernelKind::Riesz { alpha } => format!("riesz(alpha={alpha})"),
            KernelKind::Z1 => "z1".into(),
            KernelKind::Z2 => "z2".into(),
            KernelKind::Barrier { which } => match which {
                BarrierKind::Omega => "barrier(omega)".into(),
                BarrierKind::V => "barrier(v)".into(),
            },
        }
    }
}

/// How a profile was computed and what was done to it afterwards.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    pub method: String,
    pub time_nodes: usize,
    pub mixture_nodes: usize,
    /// Estimated contribution of everything the quadrature truncates.
    pub truncation_estimate: f64,
    /// Nodes whose tiny negative values were clamped to zero.
    pub clamped_nodes: usize,
    pub max_clamped: f64,
    pub warnings: Vec<String>,
}

/// Samples of a radial kernel at the `r` nodes of a radial grid.
#[derive(Debug, Clone)]
pub struct KernelProfile {
    pub grid: Arc<RadialGrid>,
    pub values: Vec<f64>,
    pub kind: KernelKind,
    pub report: QuadratureReport,
}

impl KernelProfile {
    pub fn r(&self) -> &[f64] {
        &self.grid.r
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Samples restricted to `lo <= r <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        self.grid
            .r
            .iter()
            .zip(&self.values)
            .filter(|(r, _)| **r >= lo && **r <= hi)
            .map(|(r, v)| (*r, *v))
            .unzip()
    }
}

/// Clamp negative quadrature noise below `1e-10` of the profile maximum;
/// larger negativity is a failure.
pub(crate) fn clamp_noise(values: &mut [f64], report: &mut QuadratureReport) -> Result<()> {
    let max = values.iter().copied().fold(0.0, f64::max);
    let threshold = 1e-10 * max;
    for v in values.iter_mut() {
        if *v < 0.0 {
            if -*v > threshold {
                return Err(Error::QuadratureFailure(format!(
                    "negative value {:e} exceeds clamp threshold {:e}",
                    v, threshold
                )));
            }
            report.clamped_nodes += 1;
            report.max_clamped = report.max_clamped.max(-*v);
            *v = 0.0;
        }
    }
    if report.clamped_nodes > 0 {
        log::info!(
            "clamped {} negative nodes (max {:e})",
            report.clamped_nodes,
            report.max_clamped
        );
    }
    Ok(())
}
