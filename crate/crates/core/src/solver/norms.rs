use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::operators::spectral_tail_fraction;
use crate::special::fractional_constant;
use crate::symbols::symbol_m;

use super::assemble_rhs;
use crate::params::Params;

/// Largest top-octave energy fraction accepted by the seminorms.
pub const NORM_TAIL_THRESHOLD: f64 = 1e-6;

fn checked_energy<W: Fn(f64) -> f64>(u: &Field, weight: W) -> Result<f64> {
    let spectrum = u.spectrum()?;
    let tail = spectral_tail_fraction(spectrum);
    if tail > NORM_TAIL_THRESHOLD {
        return Err(Error::SpectralTailTooLarge(tail));
    }
    Ok(spectrum.weighted_energy(weight))
}

/// Constant in `[u]_s² = C(n,s) (2π)^{-n} ∫ |ξ|^{2s} |û|² dξ` for the plain
/// double integral `∬ |u(x)-u(y)|² / |x-y|^{n+2s}`.
pub fn plancherel_constant(n: usize, s: f64) -> f64 {
    2.0 / fractional_constant(n, s)
}

pub fn gagliardo_seminorm(u: &Field, s: f64) -> Result<f64> {
    let n = u.grid().n();
    let e = checked_energy(u, |k| k.powf(2.0 * s))?;
    Ok((plancherel_constant(n, s) * e).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct X12Norm {
    pub gradient_sq: f64,
    pub gagliardo_sq: f64,
    pub norm: f64,
}

/// `(‖∇u‖² + [u]_s²)^{1/2}` with both parts reported.
pub fn x12_norm(u: &Field, s: f64) -> Result<X12Norm> {
    let n = u.grid().n();
    let gradient_sq = checked_energy(u, |k| k * k)?;
    let gagliardo_sq =
        plancherel_constant(n, s) * u.spectrum()?.weighted_energy(|k| k.powf(2.0 * s));
    Ok(X12Norm {
        gradient_sq,
        gagliardo_sq,
        norm: (gradient_sq + gagliardo_sq).sqrt(),
    })
}

/// Whether `test` is negligible outside the trusted part of its grid.
fn supported_in_trust(test: &Field) -> bool {
    let sup = test.sup_norm();
    let v = test.values();
    match test.grid() {
        Grid::Radial(g) => {
            g.r.iter()
                .zip(v)
                .all(|(r, x)| *r <= 0.5 * g.spec.r_max || x.abs() <= 1e-12 * sup)
        }
        Grid::Cartesian(g) => (0..g.len()).all(|i| {
            let p = g.position(i);
            let inside = p[..g.n()]
                .iter()
                .all(|c| c.abs() <= 0.5 * g.spec.half_length);
            inside || v[i].abs() <= 1e-12 * sup
        }),
    }
}

/// Weak-form defect `⟨Lu, φ⟩ - ⟨λ h u^p + u^{2*-1}, φ⟩`, with the bilinear
/// part evaluated by Plancherel.
pub fn weak_residual(u: &Field, test: &Field, h: &Field, params: &Params) -> Result<f64> {
    if test.sup_norm() == 0.0 {
        return Ok(0.0);
    }
    if !supported_in_trust(test) {
        return Err(Error::TestSupportViolation);
    }
    let su = u.spectrum()?;
    let st = test.spectrum()?;
    let norms = u.grid().spectral_norms();
    let form: Vec<f64> = su
        .coeffs
        .iter()
        .zip(&st.coeffs)
        .zip(&norms)
        .map(|((a, b), k)| (a * b.conj()).re * symbol_m(*k, params.s))
        .collect();
    let bilinear = u.grid().integrate_spectral(&form);
    let rhs = assemble_rhs(u, h, params)?;
    Ok(bilinear - rhs.inner(test))
}

/// Brute-force `∬ |u(x)-u(y)|² / |x-y|^{2+2s}` on a two-dimensional
/// cartesian grid, with the field extended by zero. The double sum runs over
/// lattice shifts `y`, with the quadratic small-shift behaviour removed
/// before summing and added back in closed form.
pub fn gagliardo_double_sum(u: &Field, s: f64) -> Result<f64> {
    let g = u.grid().as_cartesian()?;
    if g.n() != 2 {
        return Err(Error::DimensionOutOfRange(
            g.n(),
            "double sum is two-dimensional",
        ));
    }
    let pts = g.spec.points as i64;
    let h = g.spacing;
    let v = u.values();
    let at = |i: i64, j: i64| -> f64 {
        if i < 0 || j < 0 || i >= pts || j >= pts {
            0.0
        } else {
            v[(i * pts + j) as usize]
        }
    };
    let cell = h * h;
    let norm_sq: f64 = v.iter().map(|x| x * x).sum::<f64>() * cell;
    // ‖∇u‖² by fourth-order central differences
    let mut grad_sq = 0.0;
    for i in 0..pts {
        for j in 0..pts {
            let dx = (-at(i + 2, j) + 8.0 * at(i + 1, j) - 8.0 * at(i - 1, j) + at(i - 2, j))
                / (12.0 * h);
            let dy = (-at(i, j + 2) + 8.0 * at(i, j + 1) - 8.0 * at(i, j - 1) + at(i, j - 2))
                / (12.0 * h);
            grad_sq += (dx * dx + dy * dy) * cell;
        }
    }
    let rho = (norm_sq / grad_sq).sqrt().max(4.0 * h);
    // D(y) ≈ ½‖∇u‖²|y|² for small shifts by lattice symmetry of the average
    let quad = |y2: f64| 0.5 * grad_sq * y2 * (-y2 / (rho * rho)).exp();
    let mut total = 0.0;
    for a in -(pts - 1)..pts {
        for b in -(pts - 1)..pts {
            if a == 0 && b == 0 {
                continue;
            }
            let mut d = 0.0;
            for i in (-a).min(0)..pts + (-a).max(0) {
                for j in (-b).min(0)..pts + (-b).max(0) {
                    let x = at(i + a, j + b) - at(i, j);
                    d += x * x;
                }
            }
            let d = d * cell;
            let y2 = ((a * a + b * b) as f64) * h * h;
            total += cell * (d - quad(y2)) * y2.powf(-1.0 - s);
        }
    }
    let far = 2.0 * norm_sq * lattice_tail(pts - 1, s) * h.powf(-2.0 * s);
    // ∫ ½‖∇u‖²|y|² e^{-|y|²/ρ²} |y|^{-2-2s} dy
    let near =
        0.5 * grad_sq * PI * rho.powf(2.0 - 2.0 * s) * statrs::function::gamma::gamma(1.0 - s);
    Ok(total + far + near)
}

/// `Σ |k|^{-2-2s}` over integer vectors outside the square `max|k_i| <= m`.
fn lattice_tail(m: i64, s: f64) -> f64 {
    let big = 8 * m;
    let mut sum = 0.0;
    for a in -big..=big {
        for b in -big..=big {
            if a.abs().max(b.abs()) > m {
                sum += ((a * a + b * b) as f64).powf(-1.0 - s);
            }
        }
    }
    // beyond the big square, by the continuum integral over its exterior
    sum + square_exterior_integral(big as f64 + 0.5, s)
}

/// `∫ |y|^{-2-2s}` over the exterior of the square `[-a,a]²`.
fn square_exterior_integral(a: f64, s: f64) -> f64 {
    // exterior of the square in polar form: r > a / max(|cos θ|, |sin θ|)
    let (v, _) = crate::quad::adaptive(
        |th: f64| (a / th.cos()).powf(-2.0 * s) / (2.0 * s),
        0.0,
        PI / 4.0,
        1e-16,
        1e-13,
    );
    8.0 * v
}
