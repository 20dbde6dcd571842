//! Spectral application of `-Δ`, `(-Δ)^s`, `L = -Δ + (-Δ)^s` and Riesz
//! potentials, the linear solve `u = Z ∗ f`, and a pointwise
//! singular-integral evaluation of `(-Δ)^s`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::grid::{CartesianGrid, Field, Grid, Spectrum};
use crate::params::Params;
use crate::quad::{adaptive, composite_rule, gauss_legendre, hankel_integral, HankelLayout};
use crate::special::{bessel_j, sphere_area};
use crate::symbols::symbol_m;

/// Largest admissible top-octave energy fraction before applying a
/// second-order symbol.
pub const TAIL_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum OperatorKind {
    Laplacian,
    Fractional { s: f64 },
    Mixed { s: f64 },
    RieszPotential { alpha: f64 },
}

impl OperatorKind {
    pub fn symbol(&self, xi: f64) -> f64 {
        match *self {
            OperatorKind::Laplacian => xi * xi,
            OperatorKind::Fractional { s } => xi.powf(2.0 * s),
            OperatorKind::Mixed { s } => symbol_m(xi, s),
            OperatorKind::RieszPotential { alpha } => xi.powf(-alpha),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match *self {
            OperatorKind::Fractional { s } | OperatorKind::Mixed { s } if !(s > 0.0 && s < 1.0) => {
                Err(Error::InvalidParameter(format!("s = {s} outside (0,1)")))
            }
            OperatorKind::RieszPotential { alpha } if !(alpha > 0.0 && alpha < n as f64) => {
                Err(Error::AlphaOutOfRange { alpha, n })
            }
            _ => Ok(()),
        }
    }

    fn is_second_order(&self) -> bool {
        matches!(self, OperatorKind::Laplacian | OperatorKind::Mixed { .. })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OperatorReport {
    /// Energy fraction in the top spectral octave of the input.
    pub tail_fraction: f64,
    /// Zero-mode coefficient (`∫ f`) removed before a singular symbol.
    pub dropped_mass: f64,
}

/// Energy fraction of a spectrum above half the largest resolved frequency.
pub fn spectral_tail_fraction(spectrum: &Spectrum) -> f64 {
    let top = match &spectrum.grid {
        Grid::Radial(g) => g.spec.rho_max,
        Grid::Cartesian(g) => g.wave_spacing() * (g.spec.points / 2) as f64,
    };
    let total = spectrum.weighted_energy(|_| 1.0);
    if total == 0.0 {
        return 0.0;
    }
    spectrum.weighted_energy(|k| if k > 0.5 * top { 1.0 } else { 0.0 }) / total
}

pub(crate) fn drop_zero_mode(spectrum: &mut Spectrum) -> f64 {
    match spectrum.grid.zero_mode() {
        Some(i) => {
            let mass = spectrum.coeffs[i].re;
            spectrum.coeffs[i] = 0.0.into();
            mass
        }
        None => 0.0,
    }
}

pub fn apply_operator(field: &Field, kind: OperatorKind) -> Result<Field> {
    apply_operator_with_report(field, kind).map(|(f, _)| f)
}

pub fn apply_operator_with_report(
    field: &Field,
    kind: OperatorKind,
) -> Result<(Field, OperatorReport)> {
    kind.validate(field.grid().n())?;
    let mut spectrum = field.spectrum()?.clone();
    let mut report = OperatorReport {
        tail_fraction: spectral_tail_fraction(&spectrum),
        ..Default::default()
    };
    if kind.is_second_order() && report.tail_fraction > TAIL_THRESHOLD {
        return Err(Error::SpectralTailTooLarge(report.tail_fraction));
    }
    if let OperatorKind::RieszPotential { .. } = kind {
        report.dropped_mass = drop_zero_mode(&mut spectrum);
        if report.dropped_mass != 0.0 {
            log::info!(
                "riesz potential dropped zero-mode mass {:e}",
                report.dropped_mass
            );
        }
        let zero = spectrum.grid.zero_mode();
        for (i, (c, k)) in spectrum
            .coeffs
            .iter_mut()
            .zip(field.grid().spectral_norms())
            .enumerate()
        {
            if Some(i) != zero {
                *c *= kind.symbol(k);
            }
        }
    } else {
        spectrum.scale_by(|k| kind.symbol(k));
    }
    Ok((Field::from_spectrum(spectrum)?, report))
}

/// `u = F^{-1}[M f̂]` with the zero mode set to 0.
pub fn solve_linear(f: &Field, params: &Params) -> Result<Field> {
    solve_linear_with_report(f, params.s).map(|(u, _)| u)
}

pub fn solve_linear_with_report(f: &Field, s: f64) -> Result<(Field, OperatorReport)> {
    let mut spectrum = f.spectrum()?.clone();
    let dropped_mass = drop_zero_mode(&mut spectrum);
    let zero = spectrum.grid.zero_mode();
    for (i, (c, k)) in spectrum
        .coeffs
        .iter_mut()
        .zip(f.grid().spectral_norms())
        .enumerate()
    {
        if Some(i) != zero {
            *c /= symbol_m(k, s);
        }
    }
    let report = OperatorReport {
        tail_fraction: 0.0,
        dropped_mass,
    };
    Ok((Field::from_spectrum(spectrum)?, report))
}

/// `1 - Γ(n/2)(2/r)^ν J_ν(r)`, the spherical mean of `1 - cos(ω₁ r)`.
fn one_minus_sphere_mean(n: usize, r: f64) -> f64 {
    let nu = 0.5 * n as f64 - 1.0;
    if r < 1.0 {
        let x = 0.25 * r * r;
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..40 {
            term *= -x / (k as f64 * (nu + k as f64));
            sum -= term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    1.0 - gamma(nu + 1.0) * (2.0 / r).powf(nu) * bessel_j(nu, r)
}

/// Normalisation of the singular integral that makes its plane-wave
/// eigenvalues exactly `|k|^{2s}`, found by quadrature.
pub fn calibrated_constant(n: usize, s: f64) -> f64 {
    let nu = 0.5 * n as f64 - 1.0;
    let cut = 40.0;
    let (head, _) = adaptive(
        |r: f64| r.powf(-1.0 - 2.0 * s) * one_minus_sphere_mean(n, r),
        0.0,
        cut,
        1e-16,
        1e-13,
    );
    let oscillatory = hankel_integral(
        |r: f64| r.powf(-1.0 - 2.0 * s - nu),
        nu,
        1.0,
        HankelLayout {
            lo: cut,
            knee: cut,
            ..Default::default()
        },
        None::<fn(f64) -> f64>,
    );
    let tail = cut.powf(-2.0 * s) / (2.0 * s) - gamma(nu + 1.0) * 2f64.powf(nu) * oscillatory;
    1.0 / (sphere_area(n) * (head + tail))
}

/// Tensor Lagrange interpolation of a cartesian field extended by zero.
struct Interpolant<'a> {
    values: &'a [f64],
    n: usize,
    points: usize,
    half_length: f64,
    spacing: f64,
}

const STENCIL: usize = 8;

impl Interpolant<'_> {
    fn axis_weights(&self, x: f64) -> Option<(usize, [f64; STENCIL])> {
        let t = (x + self.half_length) / self.spacing;
        let j0 = t.floor() as i64 - (STENCIL as i64 / 2 - 1);
        if j0 < 0 || j0 as usize + STENCIL > self.points {
            return None;
        }
        let u = t - j0 as f64;
        let mut w = [0.0; STENCIL];
        for (i, wi) in w.iter_mut().enumerate() {
            let mut p = 1.0;
            for k in 0..STENCIL {
                if k != i {
                    p *= (u - k as f64) / (i as f64 - k as f64);
                }
            }
            *wi = p;
        }
        Some((j0 as usize, w))
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut axes = [(0usize, [0.0; STENCIL]); 3];
        for a in 0..self.n {
            match self.axis_weights(x[a]) {
                Some(aw) => axes[a] = aw,
                None => return 0.0,
            }
        }
        let p = self.points;
        match self.n {
            2 => {
                let mut acc = 0.0;
                for i in 0..STENCIL {
                    let row = (axes[0].0 + i) * p + axes[1].0;
                    let mut inner = 0.0;
                    for j in 0..STENCIL {
                        inner += axes[1].1[j] * self.values[row + j];
                    }
                    acc += axes[0].1[i] * inner;
                }
                acc
            }
            3 => {
                let mut acc = 0.0;
                for i in 0..STENCIL {
                    for j in 0..STENCIL {
                        let row = ((axes[0].0 + i) * p + axes[1].0 + j) * p + axes[2].0;
                        let mut inner = 0.0;
                        for k in 0..STENCIL {
                            inner += axes[2].1[k] * self.values[row + k];
                        }
                        acc += axes[0].1[i] * axes[1].1[j] * inner;
                    }
                }
                acc
            }
            _ => unreachable!(),
        }
    }
}

const D2: [f64; 9] = [
    -1.0 / 560.0,
    8.0 / 315.0,
    -1.0 / 5.0,
    8.0 / 5.0,
    -205.0 / 72.0,
    8.0 / 5.0,
    -1.0 / 5.0,
    8.0 / 315.0,
    -1.0 / 560.0,
];
const D4: [f64; 9] = [
    7.0 / 240.0,
    -2.0 / 5.0,
    169.0 / 60.0,
    -122.0 / 15.0,
    91.0 / 8.0,
    -122.0 / 15.0,
    169.0 / 60.0,
    -2.0 / 5.0,
    7.0 / 240.0,
];

/// `Δu` and `Δ²u` at a node by central differences, zero outside the box.
fn local_derivatives(values: &[f64], grid: &CartesianGrid, index: usize) -> (f64, f64) {
    let n = grid.n();
    let pts = grid.spec.points as i64;
    let m = grid.unravel(index);
    let at = |shift: &[(usize, i64)]| -> f64 {
        let mut k = m;
        for &(a, d) in shift {
            let j = k[a] as i64 + d;
            if j < 0 || j >= pts {
                return 0.0;
            }
            k[a] = j as usize;
        }
        values[grid.ravel(&k[..n])]
    };
    let h = grid.spacing;
    let mut lap = 0.0;
    let mut bilap = 0.0;
    for a in 0..n {
        for (i, (c2, c4)) in D2.iter().zip(&D4).enumerate() {
            let v = at(&[(a, i as i64 - 4)]);
            lap += c2 * v / (h * h);
            bilap += c4 * v / h.powi(4);
        }
        for b in a + 1..n {
            for (i, ci) in D2.iter().enumerate() {
                for (j, cj) in D2.iter().enumerate() {
                    bilap +=
                        2.0 * ci * cj * at(&[(a, i as i64 - 4), (b, j as i64 - 4)]) / h.powi(4);
                }
            }
        }
    }
    (lap, bilap)
}

/// `(-Δ)^s u` at one node by the second-difference singular integral
/// `(c/2) ∫ (2u(x) - u(x+y) - u(x-y)) |y|^{-n-2s} dy`, treating the field as
/// compactly supported inside the box.
pub fn fractional_pointwise(field: &Field, index: usize, params: &Params) -> Result<f64> {
    let grid = field.grid().as_cartesian()?;
    let (n, s) = (grid.n(), params.s);
    if !(2..=3).contains(&n) {
        return Err(Error::DimensionOutOfRange(
            n,
            "pointwise evaluation needs n in 2..=3",
        ));
    }
    if index >= grid.len() {
        return Err(Error::InvalidSize(format!("node {index} out of range")));
    }
    let values = field.values();
    let sup = field.sup_norm();
    let points = grid.spec.points;
    let h = grid.spacing;
    let margin = STENCIL;
    let mut reach: f64 = 0.0;
    let x0 = grid.position(index);
    for (i, v) in values.iter().enumerate() {
        let m = grid.unravel(i);
        let near_edge = m[..n].iter().any(|&j| j < margin || j + margin >= points);
        if v.abs() > 1e-12 * sup && near_edge {
            return Err(Error::InterpolationFailure(
                "field is not negligible near the box boundary".into(),
            ));
        }
        if v.abs() > 1e-16 * sup {
            let p = grid.position(i);
            let d: f64 = (0..n).map(|a| (p[a] - x0[a]).powi(2)).sum::<f64>().sqrt();
            reach = reach.max(d);
        }
    }
    if sup == 0.0 {
        return Ok(0.0);
    }
    let reach = reach + 2.0 * h;
    let interp = Interpolant {
        values,
        n,
        points,
        half_length: grid.spec.half_length,
        spacing: h,
    };
    let u0 = values[index];
    let center = &x0[..n];
    let second_difference = |r: f64| -> f64 {
        let mut plus = [0.0; 3];
        let mut minus = [0.0; 3];
        let mut at = |dir: &[f64]| {
            for a in 0..n {
                plus[a] = center[a] + r * dir[a];
                minus[a] = center[a] - r * dir[a];
            }
            2.0 * u0 - interp.eval(&plus[..n]) - interp.eval(&minus[..n])
        };
        if n == 2 {
            let m = ((4.0 * std::f64::consts::PI * r / h).ceil() as usize).max(16);
            let dtheta = std::f64::consts::PI / m as f64;
            (0..m)
                .map(|k| {
                    let th = k as f64 * dtheta;
                    at(&[th.cos(), th.sin()])
                })
                .sum::<f64>()
                * 2.0
                * dtheta
        } else {
            let m = ((4.0 * std::f64::consts::PI * r / h).ceil() as usize).max(16);
            let (zs, wz) = gauss_legendre(m / 2 + 1);
            let dphi = std::f64::consts::PI / m as f64;
            let mut acc = 0.0;
            for (z, w) in zs.iter().zip(&wz) {
                let rho = (1.0 - z * z).sqrt();
                for k in 0..m {
                    let ph = k as f64 * dphi;
                    acc += w * at(&[rho * ph.cos(), rho * ph.sin(), *z]);
                }
            }
            acc * dphi
        }
    };
    let mut breaks = vec![h];
    while breaks[breaks.len() - 1] < reach {
        let b = breaks[breaks.len() - 1] + h;
        breaks.push(b);
    }
    let (rs, ws) = composite_rule(&breaks);
    let (lap, bilap) = local_derivatives(values, grid, index);
    // 2u(x) - u(x+rθ) - u(x-rθ) = -r²(θ·∇)²u - r⁴(θ·∇)⁴u/12 - ..., averaged over the sphere
    let area = sphere_area(n);
    let nf = n as f64;
    let inner = -area / nf * lap * h.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s)
        - area / (4.0 * nf * (nf + 2.0)) * bilap * h.powf(4.0 - 2.0 * s) / (4.0 - 2.0 * s);
    let near: f64 = inner
        + rs.iter()
            .zip(&ws)
            .map(|(r, w)| w * r.powf(-1.0 - 2.0 * s) * second_difference(*r))
            .sum::<f64>();
    let outer = breaks[breaks.len() - 1];
    let far = 2.0 * u0 * sphere_area(n) * outer.powf(-2.0 * s) / (2.0 * s);
    Ok(0.5 * calibrated_constant(n, s) * (near + far))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, CartesianSpec, GridSpec, RadialSpec};
    use crate::special::fractional_constant;

    fn cart(n: usize, points: usize, l: f64) -> Grid {
        make_grid(&GridSpec::Cartesian(CartesianSpec {
            n,
            points,
            half_length: l,
        }))
        .unwrap()
    }

    #[test]
    fn plane_wave_eigenvalue() {
        let g = cart(2, 32, std::f64::consts::PI);
        let f = Field::from_points(&g, |x| (2.0 * x[1]).cos()).unwrap();
        let out = apply_operator(&f, OperatorKind::Mixed { s: 0.5 }).unwrap();
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - 6.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_of_gaussian() {
        let g = cart(2, 128, 12.0);
        let f = Field::from_points(&g, |x| (-0.5 * (x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        let out = apply_operator(&f, OperatorKind::Laplacian).unwrap();
        let cg = g.as_cartesian().unwrap();
        for (i, v) in out.values().iter().enumerate() {
            let p = cg.position(i);
            let r2 = p[0] * p[0] + p[1] * p[1];
            assert!((v - (2.0 - r2) * (-0.5 * r2).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn tail_diagnostic_rejects_rough_fields() {
        let g = cart(2, 16, 1.0);
        let f = Field::from_points(&g, |x| if x[0] > 0.0 { 1.0 } else { 0.0 }).unwrap();
        assert!(matches!(
            apply_operator(&f, OperatorKind::Laplacian),
            Err(Error::SpectralTailTooLarge(_))
        ));
    }

    #[test]
    fn riesz_inverts_fractional() {
        let g = cart(2, 32, std::f64::consts::PI);
        let f = Field::from_points(&g, |x| x[0].sin() + 0.3 * (2.0 * x[1]).cos() + 0.7).unwrap();
        let (v, rep) =
            apply_operator_with_report(&f, OperatorKind::RieszPotential { alpha: 1.0 }).unwrap();
        assert!((rep.dropped_mass - 0.7 * (2.0 * std::f64::consts::PI).powi(2)).abs() < 1e-10);
        let back = apply_operator(&v, OperatorKind::Fractional { s: 0.5 }).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - (b - 0.7)).abs() < 1e-8);
        }
    }

    #[test]
    fn solve_roundtrip_cartesian_and_radial() {
        let p = Params::kernel(2, 0.5).unwrap();
        let g = cart(2, 32, std::f64::consts::PI);
        let f = Field::from_points(&g, |x| x[0].cos()).unwrap();
        let u = solve_linear(&f, &p).unwrap();
        for (a, b) in u.values().iter().zip(f.values()) {
            assert!((a - 0.5 * b).abs() < 1e-12);
        }
        let g = make_grid(&GridSpec::Radial(
            RadialSpec::new(4, 16.0, 256).with_spectrum(16.0, 256),
        ))
        .unwrap();
        let f = Field::radial(&g, |r| (-r * r).exp());
        let u = solve_linear(&f, &p).unwrap();
        let back = apply_operator(&u, OperatorKind::Mixed { s: 0.5 }).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-6);
        }
        let zero = solve_linear(&Field::zeros(&g), &p).unwrap();
        assert!(zero.sup_norm() == 0.0);
    }

    #[test]
    fn calibration_matches_closed_form() {
        for n in 2..6 {
            for &s in &[0.1, 0.25, 0.5, 0.75, 0.9] {
                let c = calibrated_constant(n, s);
                let want = fractional_constant(n, s);
                assert!(
                    ((c - want) / want).abs() < 1e-8,
                    "n={n} s={s}: {c} vs {want}"
                );
            }
        }
    }

    #[test]
    fn pointwise_matches_spectral_gaussian() {
        let g = cart(2, 256, 16.0);
        let f = Field::from_points(&g, |x| (-0.5 * (x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        let cg = g.as_cartesian().unwrap();
        let center = cg.ravel(&[128, 128]);
        for s in [0.5, 0.75] {
            let p = Params::kernel(2, s).unwrap();
            let spectral = apply_operator(&f, OperatorKind::Fractional { s }).unwrap();
            let pw = fractional_pointwise(&f, center, &p).unwrap();
            let sv = spectral.values()[center];
            assert!(((pw - sv) / sv).abs() < 1e-3, "s={s}: {pw} vs {sv}");
        }
        let p = Params::kernel(2, 0.5).unwrap();
        let flat = Field::from_points(&g, |_| 0.0).unwrap();
        assert_eq!(fractional_pointwise(&flat, center, &p).unwrap(), 0.0);
    }
}
