use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::heat::HeatKernel;
use super::{clamp_noise, KernelKind, KernelProfile, QuadratureReport};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::Params;
use crate::quad::{adaptive, composite_rule, hankel_integral, HankelLayout};
use crate::special::{bessel_j, sphere_area};
use crate::symbols::{cutoff_phi, symbol_m};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FundamentalMethod {
    TimeQuadrature,
    DirectMultiplier,
}

/// Agreement required between the two routes on `[0.1, r_max/2]`.
pub const CROSS_CHECK_TOL: f64 = 1e-4;

/// Edge of the excluded ball around `ξ = 0` in the direct route.
pub(super) const ORIGIN_BALL: f64 = 1e-3;

pub fn fundamental_solution(
    grid: &Grid,
    params: &Params,
    method: FundamentalMethod,
) -> Result<KernelProfile> {
    let radial = grid.as_radial()?.clone();
    let (n, s) = (radial.n(), params.s);
    let (mut values, mut report) = match method {
        FundamentalMethod::TimeQuadrature => time_route(n, s, &radial.r),
        FundamentalMethod::DirectMultiplier => {
            let values = radial
                .r
                .par_iter()
                .map(|&r| fundamental_at_direct(n, s, r))
                .collect();
            let report = QuadratureReport {
                method: "direct-multiplier".into(),
                truncation_estimate: origin_remainder(n, s),
                ..Default::default()
            };
            (values, report)
        }
    };
    if values.iter().any(|v: &f64| !v.is_finite()) {
        return Err(Error::QuadratureFailure(
            "non-finite fundamental solution sample".into(),
        ));
    }
    clamp_noise(&mut values, &mut report)?;
    Ok(KernelProfile {
        grid: radial,
        values,
        kind: KernelKind::Fundamental,
        report,
    })
}

/// Both routes; fails with `MethodDisagreement` beyond `1e-4` relative on
/// `[0.1, r_max/2]`. Returns the time-quadrature profile and the observed
/// disagreement.
pub fn fundamental_cross_check(grid: &Grid, params: &Params) -> Result<(KernelProfile, f64)> {
    let time = fundamental_solution(grid, params, FundamentalMethod::TimeQuadrature)?;
    let direct = fundamental_solution(grid, params, FundamentalMethod::DirectMultiplier)?;
    let hi = 0.5 * time.grid.spec.r_max;
    let worst = time
        .r()
        .iter()
        .zip(time.values.iter().zip(&direct.values))
        .filter(|(r, _)| **r >= 0.1 && **r <= hi)
        .map(|(_, (a, b))| ((a - b) / b).abs())
        .fold(0.0, f64::max);
    if worst > CROSS_CHECK_TOL {
        return Err(Error::MethodDisagreement(worst));
    }
    Ok((time, worst))
}

/// `Z = ∫_0^∞ H(·,t) dt`, split at `t = 1`, Gauss-Legendre panels in `ln t`
/// and an analytic tail beyond `T`.
fn time_route(n: usize, s: f64, radii: &[f64]) -> (Vec<f64>, QuadratureReport) {
    let heat = HeatKernel::new(n, s);
    let r_min = radii
        .iter()
        .copied()
        .filter(|r| *r > 0.0)
        .fold(1.0, f64::min);
    let decay = 0.5 * n as f64 / s - 1.0;
    let y_lo = (1e-6 * r_min * r_min).ln().floor();
    let y_hi = (32.0 / decay).clamp(8.0, 300.0).ceil();
    let mut breaks: Vec<f64> = Vec::new();
    let mut y = y_lo;
    while y < y_hi {
        breaks.push(y);
        y += 1.0;
    }
    breaks.push(y_hi);
    debug_assert!(breaks.contains(&0.0));
    let (ys, ws) = composite_rule(&breaks);
    let half_n = 0.5 * n as f64;
    let mut terms: Vec<(f64, f64)> = Vec::with_capacity(ys.len() * heat.sub.nodes.len());
    for (y, w) in ys.iter().zip(&ws) {
        let t = y.exp();
        for (wx, tau) in heat.mixture(t) {
            let a = w * t * wx * (4.0 * PI * tau).powf(-half_n);
            if a > 0.0 {
                terms.push((a, 0.25 / tau));
            }
        }
    }
    let t_max = y_hi.exp();
    let tail = large_time_tail(n, s, t_max);
    let t_min = y_lo.exp();
    let head = t_min * heat.at(r_min, t_min);
    let values = radii
        .par_iter()
        .map(|&r| {
            let r2 = r * r;
            terms.iter().map(|(a, b)| a * (-b * r2).exp()).sum::<f64>() + tail
        })
        .collect();
    let report = QuadratureReport {
        method: "time-quadrature".into(),
        time_nodes: ys.len(),
        mixture_nodes: heat.sub.nodes.len(),
        truncation_estimate: head + tail * 1e-6,
        ..Default::default()
    };
    (values, report)
}

/// `∫_T^∞ H(0,t) dt` with `H(0,t) ≈ (2π)^{-n}|S^{n-1}| Γ(n/2s)/(2s) t^{-n/2s}`.
fn large_time_tail(n: usize, s: f64, t_max: f64) -> f64 {
    let q = 0.5 * n as f64 / s;
    let c = (2.0 * PI).powi(-(n as i32)) * sphere_area(n) * gamma(q) / (2.0 * s);
    c * t_max.powf(1.0 - q) / (q - 1.0)
}

/// `∫_0^ε` of the leading `ρ^{-2s}` singularity against the small-argument
/// Bessel factor.
pub(super) fn origin_integral(n: usize, s: f64, r: f64, eps: f64) -> f64 {
    let nu = 0.5 * n as f64 - 1.0;
    (0.5 * r).powf(nu) / gamma(nu + 1.0) * eps.powf(n as f64 - 2.0 * s) / (n as f64 - 2.0 * s)
}

fn origin_remainder(n: usize, s: f64) -> f64 {
    ORIGIN_BALL.powf(n as f64 - 2.0 * s) * ORIGIN_BALL.powf(2.0 - 2.0 * s)
}

pub(super) fn radial_inverse(n: usize, r: f64, integral: f64) -> f64 {
    let nu = 0.5 * n as f64 - 1.0;
    (2.0 * PI).powf(-0.5 * n as f64) * r.powf(-nu) * integral
}

/// `Z(r)` by Hankel inversion of `M = 1/m`.
pub fn fundamental_at_direct(n: usize, s: f64, r: f64) -> f64 {
    let nu = 0.5 * n as f64 - 1.0;
    let half_n = 0.5 * n as f64;
    let layout = HankelLayout {
        eps: ORIGIN_BALL,
        ..Default::default()
    };
    let integral = hankel_integral(
        |rho: f64| rho.powf(half_n) / symbol_m(rho, s),
        nu,
        r,
        layout,
        Some(|eps: f64| origin_integral(n, s, r, eps)),
    );
    radial_inverse(n, r, integral)
}

/// `∫_1^2 w(ρ)/m(ρ) ρ^{n/2} J_ν(rρ) dρ` for the cutoff transition band.
fn transition_band<W: Fn(f64) -> f64>(n: usize, s: f64, r: f64, weight: W) -> f64 {
    let nu = 0.5 * n as f64 - 1.0;
    let half_n = 0.5 * n as f64;
    adaptive(
        |rho: f64| weight(rho) / symbol_m(rho, s) * rho.powf(half_n) * bessel_j(nu, r * rho),
        1.0,
        2.0,
        1e-16,
        1e-13,
    )
    .0
}

/// `Z₁(r)`, the inverse transform of `φ/m`.
pub fn z1_at(n: usize, s: f64, r: f64) -> f64 {
    let nu = 0.5 * n as f64 - 1.0;
    let half_n = 0.5 * n as f64;
    let layout = HankelLayout {
        hi: 1.0,
        eps: ORIGIN_BALL,
        ..Default::default()
    };
    let core = hankel_integral(
        |rho: f64| rho.powf(half_n) / symbol_m(rho, s),
        nu,
        r,
        layout,
        Some(|eps: f64| origin_integral(n, s, r, eps)),
    );
    radial_inverse(n, r, core + transition_band(n, s, r, cutoff_phi))
}

/// `Z₂(r)`, the inverse transform of `(1-φ)/m`.
pub fn z2_at(n: usize, s: f64, r: f64) -> f64 {
    let nu = 0.5 * n as f64 - 1.0;
    let half_n = 0.5 * n as f64;
    let layout = HankelLayout {
        lo: 2.0,
        knee: 2.0,
        ..Default::default()
    };
    let outer = hankel_integral(
        |rho: f64| rho.powf(half_n) / symbol_m(rho, s),
        nu,
        r,
        layout,
        None::<fn(f64) -> f64>,
    );
    radial_inverse(
        n,
        r,
        outer + transition_band(n, s, r, |rho| 1.0 - cutoff_phi(rho)),
    )
}

/// `(Z₁, Z₂)` sampled on a radial grid.
pub fn split_kernels(grid: &Grid, params: &Params) -> Result<(KernelProfile, KernelProfile)> {
    let radial = grid.as_radial()?.clone();
    let n = radial.n();
    if n < 3 {
        return Err(Error::DimensionOutOfRange(n, "split kernels need n >= 3"));
    }
    let s = params.s;
    let pairs: Vec<(f64, f64)> = radial
        .r
        .par_iter()
        .map(|&r| (z1_at(n, s, r), z2_at(n, s, r)))
        .collect();
    let (z1, z2): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    if z1.iter().chain(&z2).any(|v| !v.is_finite()) {
        return Err(Error::QuadratureFailure(
            "non-finite split kernel sample".into(),
        ));
    }
    let report = QuadratureReport {
        method: "direct-multiplier".into(),
        truncation_estimate: origin_remainder(n, s),
        ..Default::default()
    };
    let make = |values, kind| KernelProfile {
        grid: radial.clone(),
        values,
        kind,
        report: report.clone(),
    };
    Ok((make(z1, KernelKind::Z1), make(z2, KernelKind::Z2)))
}
