//! Verification suites behind `verify`, each returning a report with a
//! `pass` flag.

use serde::Serialize;

use mixlap_core::grid::{make_grid, CartesianSpec, Field, Grid, GridSpec, RadialSpec};
use mixlap_core::kernels::{
    distributional_identity, fundamental_cross_check, heat_kernel, heat_kernel_cartesian,
    heat_mass, schwartz_battery, verify_kernel_bounds, BoundReport, HeatKernel, IdentityCheck,
};
use mixlap_core::operators::{
    apply_operator, calibrated_constant, fractional_pointwise, solve_linear, OperatorKind,
};
use mixlap_core::special::fractional_constant;
use mixlap_core::symbols::symbol_m;
use mixlap_core::{Params, Result};

pub const RADIAL_MASS_TOL: f64 = 1e-4;
pub const CARTESIAN_MASS_TOL: f64 = 1e-6;
pub const SEMIGROUP_TOL: f64 = 1e-6;
pub const MONOTONE_TOL: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-4;

fn cartesian(n: usize, points: usize, half_length: f64) -> Result<Grid> {
    make_grid(&GridSpec::Cartesian(CartesianSpec {
        n,
        points,
        half_length,
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelBoundsReport {
    pub n: usize,
    pub s: f64,
    pub cross_check_worst: f64,
    pub far: BoundReport,
    pub near: BoundReport,
    pub min_value: f64,
    pub identities: Vec<IdentityCheck>,
    pub pass: bool,
}

/// Cross-checked fundamental solution, its far and near log-log slopes, its
/// sign, and the distributional identity on the Schwartz battery.
pub fn kernel_bounds(grid: &Grid, params: &Params, tol: f64) -> Result<KernelBoundsReport> {
    let (n, s) = (params.n as f64, params.s);
    let (z, worst) = fundamental_cross_check(grid, params)?;
    let far = verify_kernel_bounds(&z, [-(n + 2.0 * s), -(n - 2.0 * s)], [2.0, 20.0], tol)?;
    let near = verify_kernel_bounds(&z, [-(n - 2.0), -(n - 2.0)], [0.01, 0.3], tol)?;
    let identities = schwartz_battery()
        .iter()
        .map(|t| distributional_identity(&z, s, t))
        .collect::<Result<Vec<_>>>()?;
    let min_value = z.min();
    let pass = far.pass
        && near.pass
        && min_value > 0.0
        && identities.iter().all(|c| c.rel_error < IDENTITY_TOL);
    Ok(KernelBoundsReport {
        n: params.n,
        s,
        cross_check_worst: worst,
        far,
        near,
        min_value,
        identities,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HeatReport {
    pub n: usize,
    pub s: f64,
    /// `(t, |mass - 1|)` on the radial grid.
    pub radial_mass_errors: Vec<(f64, f64)>,
    /// `(t, |mass - 1|)` on a periodic grid, for `n <= 3`.
    pub cartesian_mass_errors: Vec<(f64, f64)>,
    /// `sup |H(t₁) ∗ H(t₂) - H(t₁+t₂)|` for `n = 2`.
    pub semigroup_error: Option<f64>,
    /// Largest increase between neighbouring radial nodes, relative to the peak.
    pub max_increase: f64,
    pub min_value: f64,
    pub pass: bool,
}

/// Sup-norm gap between the periodic lattice convolution `H(t₁) ∗ H(t₂)`,
/// summed directly, and `H(t₁ + t₂)`.
pub fn semigroup_error(grid: &Grid, s: f64, t1: f64, t2: f64) -> Result<f64> {
    let g = grid.as_cartesian()?;
    let a = heat_kernel_cartesian(grid, t1, s)?;
    let b = heat_kernel_cartesian(grid, t2, s)?;
    let c = heat_kernel_cartesian(grid, t1 + t2, s)?;
    let pts = g.spec.points;
    let cell = g.cell_volume();
    let (av, bv) = (a.values(), b.values());
    let mut worst: f64 = 0.0;
    for i in 0..g.len() {
        let mi = g.unravel(i);
        let mut sum = 0.0;
        for (j, aj) in av.iter().enumerate() {
            let mj = g.unravel(j);
            let k: Vec<usize> = (0..g.n())
                .map(|d| (mi[d] + pts - mj[d] + pts / 2) % pts)
                .collect();
            sum += aj * bv[g.ravel(&k)];
        }
        worst = worst.max((cell * sum - c.values()[i]).abs());
    }
    Ok(worst)
}

pub fn heat_properties(grid: &Grid, params: &Params, times: &[f64]) -> Result<HeatReport> {
    let kernel = HeatKernel::new(params.n, params.s);
    let mut radial_mass_errors = Vec::new();
    let mut max_increase: f64 = 0.0;
    let mut min_value = f64::INFINITY;
    for &t in times {
        let prof = heat_kernel(grid, t, params)?;
        radial_mass_errors.push((t, (heat_mass(&prof, &kernel)? - 1.0).abs()));
        let peak = prof.values[0];
        for w in prof.values.windows(2) {
            max_increase = max_increase.max((w[1] - w[0]) / peak);
        }
        min_value = min_value.min(prof.min());
    }
    let mut cartesian_mass_errors = Vec::new();
    let mut semigroup = None;
    if params.n <= 3 {
        let g = cartesian(params.n, if params.n == 2 { 64 } else { 32 }, 16.0)?;
        for &t in times {
            let h = heat_kernel_cartesian(&g, t, params.s)?;
            cartesian_mass_errors.push((t, (h.integral() - 1.0).abs()));
        }
        if params.n == 2 {
            semigroup = Some(semigroup_error(
                &cartesian(2, 32, 8.0)?,
                params.s,
                0.5,
                1.0,
            )?);
        }
    }
    let pass = radial_mass_errors.iter().all(|e| e.1 < RADIAL_MASS_TOL)
        && cartesian_mass_errors
            .iter()
            .all(|e| e.1 < CARTESIAN_MASS_TOL)
        && semigroup.is_none_or(|e| e < SEMIGROUP_TOL)
        && max_increase <= MONOTONE_TOL
        && min_value >= 0.0;
    Ok(HeatReport {
        n: params.n,
        s: params.s,
        radial_mass_errors,
        cartesian_mass_errors,
        semigroup_error: semigroup,
        max_increase,
        min_value,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorIdentityReport {
    pub s: f64,
    pub plane_wave_error: f64,
    pub roundtrip_cartesian: f64,
    pub roundtrip_radial: f64,
    /// `(profile, relative gap)` between the singular integral and the
    /// spectral fractional Laplacian at the origin.
    pub pointwise: Vec<(String, f64)>,
    pub calibrated: f64,
    pub closed_form: f64,
    pub pass: bool,
}

pub const PLANE_WAVE_TOL: f64 = 1e-12;
pub const ROUNDTRIP_CARTESIAN_TOL: f64 = 1e-10;
pub const ROUNDTRIP_RADIAL_TOL: f64 = 1e-6;
pub const POINTWISE_TOL: f64 = 1e-3;
pub const CALIBRATION_TOL: f64 = 1e-6;

fn sup_gap(a: &Field, b: &Field) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Plane-wave eigenrelation, solve/apply round trips, pointwise against
/// spectral `(-Δ)^s`, and the calibrated constant `c_{n,s}`.
pub fn operator_identities(s: f64) -> Result<OperatorIdentityReport> {
    let params = Params::kernel(2, s)?;
    let g = cartesian(2, 32, std::f64::consts::PI)?;
    let (k1, k2) = (3.0, 2.0);
    let wave = Field::from_points(&g, |x| (k1 * x[0] + k2 * x[1]).cos())?;
    let lambda = symbol_m((k1 * k1 + k2 * k2).sqrt(), s);
    let out = apply_operator(&wave, OperatorKind::Mixed { s })?;
    let plane_wave_error = sup_gap(&out, &wave.map(|v| lambda * v)) / lambda;

    let f = Field::from_points(&g, |x| {
        (x[0].cos() + 0.5 * (2.0 * x[1]).sin()) * (-0.2 * x[0].sin()).exp()
    })?;
    let mean = f.integral() / (2.0 * std::f64::consts::PI).powi(2);
    let back = apply_operator(&solve_linear(&f, &params)?, OperatorKind::Mixed { s })?;
    let roundtrip_cartesian = sup_gap(&back, &f.map(|v| v - mean)) / f.sup_norm();

    let rg = make_grid(&GridSpec::Radial(
        RadialSpec::new(4, 16.0, 256).with_spectrum(16.0, 256),
    ))?;
    let f = Field::radial(&rg, |r| (-r * r).exp());
    let back = apply_operator(
        &solve_linear(&f, &Params::kernel(4, s)?)?,
        OperatorKind::Mixed { s },
    )?;
    let roundtrip_radial = sup_gap(&back, &f);

    let big = cartesian(2, 512, 32.0)?;
    let cg = big.as_cartesian()?;
    let center = cg.ravel(&[256, 256]);
    let off = cg.ravel(&[260, 258]);
    let mut pointwise = Vec::new();
    for (name, sigma, omega) in [
        ("gaussian-0.7", 0.7, 0.0),
        ("gaussian-1", 1.0, 0.0),
        ("modulated", 1.0, 1.5),
    ] {
        let u = Field::from_points(&big, |x| {
            (-0.5 * (x[0] * x[0] + x[1] * x[1]) / (sigma * sigma)).exp() * (omega * x[0]).cos()
        })?;
        let spectral = apply_operator(&u, OperatorKind::Fractional { s })?;
        for (tag, idx) in [("origin", center), ("offset", off)] {
            let pw = fractional_pointwise(&u, idx, &params)?;
            let sv = spectral.values()[idx];
            pointwise.push((format!("{name}@{tag}"), ((pw - sv) / sv).abs()));
        }
    }
    let calibrated = calibrated_constant(4, s);
    let closed_form = fractional_constant(4, s);
    let pass = plane_wave_error < PLANE_WAVE_TOL
        && roundtrip_cartesian < ROUNDTRIP_CARTESIAN_TOL
        && roundtrip_radial < ROUNDTRIP_RADIAL_TOL
        && pointwise.iter().all(|p| p.1 < POINTWISE_TOL)
        && ((calibrated - closed_form) / closed_form).abs() < CALIBRATION_TOL;
    Ok(OperatorIdentityReport {
        s,
        plane_wave_error,
        roundtrip_cartesian,
        roundtrip_radial,
        pointwise,
        calibrated,
        closed_form,
        pass,
    })
}
