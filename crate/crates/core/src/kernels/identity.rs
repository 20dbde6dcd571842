//! Checks of `F[Z] = 1/m` against radial Schwartz test functions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::KernelProfile;
use crate::error::{Error, Result};
use crate::quad::{adaptive, composite_rule};
use crate::special::{bessel_j, sphere_area};
use crate::symbols::symbol_m;

/// Radial Schwartz test functions used by the identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestProfile {
    /// `e^{-r²/(2σ²)}`
    Gaussian { sigma: f64 },
    /// `r² e^{-r²}`
    SecondMoment,
    /// `e^{-r⁴}`
    Quartic,
    /// `e^{-r²} cos(ωr)`
    ModulatedGaussian { omega: f64 },
}

impl TestProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            TestProfile::Gaussian { sigma } => (-0.5 * r * r / (sigma * sigma)).exp(),
            TestProfile::SecondMoment => r * r * (-r * r).exp(),
            TestProfile::Quartic => (-r.powi(4)).exp(),
            TestProfile::ModulatedGaussian { omega } => (-r * r).exp() * (omega * r).cos(),
        }
    }

    /// Radius beyond which the profile is below `1e-20`.
    pub fn support(&self) -> f64 {
        match *self {
            TestProfile::Gaussian { sigma } => sigma * (2.0 * 46.0f64).sqrt(),
            TestProfile::Quartic => 46.0f64.powf(0.25),
            _ => 7.5,
        }
    }

    pub fn name(&self) -> String {
        match self {
            TestProfile::Gaussian { sigma } => format!("gaussian(sigma={sigma})"),
            TestProfile::SecondMoment => "second-moment".into(),
            TestProfile::Quartic => "quartic".into(),
            TestProfile::ModulatedGaussian { omega } => format!("modulated(omega={omega})"),
        }
    }

    /// Radial Fourier transform by direct quadrature.
    pub fn transform(&self, n: usize, rho: f64) -> f64 {
        let h = 0.5 * n as f64;
        let nu = h - 1.0;
        let cut = self.support();
        let panels = (cut / 0.1).ceil() as usize;
        let breaks: Vec<f64> = (0..=panels)
            .map(|k| cut * k as f64 / panels as f64)
            .collect();
        let (rs, ws) = composite_rule(&breaks);
        if rho == 0.0 {
            let v: f64 = rs
                .iter()
                .zip(&ws)
                .map(|(r, w)| w * self.eval(*r) * r.powi(n as i32 - 1))
                .sum();
            return sphere_area(n) * v;
        }
        let v: f64 = rs
            .iter()
            .zip(&ws)
            .map(|(r, w)| w * self.eval(*r) * bessel_j(nu, rho * r) * r.powf(h))
            .sum();
        (2.0 * PI).powf(h) * rho.powf(-nu) * v
    }

    /// Frequency beyond which the transform is negligible.
    pub fn spectral_support(&self) -> f64 {
        match *self {
            TestProfile::Gaussian { sigma } => (2.0 * 46.0f64).sqrt() / sigma,
            TestProfile::Quartic => 40.0,
            TestProfile::SecondMoment => 20.0,
            TestProfile::ModulatedGaussian { omega } => 20.0 + omega,
        }
    }
}

pub fn schwartz_battery() -> Vec<TestProfile> {
    vec![
        TestProfile::Gaussian { sigma: 0.5 },
        TestProfile::Gaussian { sigma: 1.0 },
        TestProfile::Gaussian { sigma: 2.0 },
        TestProfile::SecondMoment,
        TestProfile::Quartic,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub profile: String,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
}

impl IdentityCheck {
    fn new(profile: String, lhs: f64, rhs: f64) -> Self {
        IdentityCheck {
            profile,
            lhs,
            rhs,
            rel_error: ((lhs - rhs) / rhs).abs(),
        }
    }
}

/// `(2π)^{-n} ∫ w(ρ) φ̂(ρ)/m(ρ) dξ` with an adaptive rule in `ρ`.
fn spectral_pairing<W: Fn(f64) -> f64>(n: usize, s: f64, test: &TestProfile, weight: W) -> f64 {
    let cut = test.spectral_support();
    let f = |rho: f64| weight(test.transform(n, rho)) * rho.powi(n as i32 - 1) / symbol_m(rho, s);
    let (head, _) = adaptive(f, 0.0, 1.0, 1e-15, 1e-12);
    let (tail, _) = adaptive(f, 1.0, cut, 1e-15, 1e-12);
    (2.0 * PI).powi(-(n as i32)) * sphere_area(n) * (head + tail)
}

/// Zeros of `φ̂` on `[a, b]`, where `|φ̂|` has kinks.
fn sign_changes(n: usize, test: &TestProfile, a: f64, b: f64) -> Vec<f64> {
    let steps = ((b - a) / 0.05).ceil() as usize;
    let xs: Vec<f64> = (0..=steps)
        .map(|k| a + (b - a) * k as f64 / steps as f64)
        .collect();
    let mut roots = Vec::new();
    for w in xs.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let mut flo = test.transform(n, lo);
        if flo * test.transform(n, hi) >= 0.0 {
            continue;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let fm = test.transform(n, mid);
            if fm * flo > 0.0 {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots
}

/// `∫ Z φ dx` on the grid against `(2π)^{-n} ∫ φ̂/m dξ`.
pub fn distributional_identity(
    z: &KernelProfile,
    s: f64,
    test: &TestProfile,
) -> Result<IdentityCheck> {
    let n = z.grid.n();
    let r_max = z.grid.spec.r_max;
    if test.support() > 0.5 * r_max {
        return Err(Error::TestSupportViolation);
    }
    let integrand: Vec<f64> = z
        .r()
        .iter()
        .zip(&z.values)
        .map(|(r, v)| v * test.eval(*r))
        .collect();
    let lhs = z.grid.integrate(&integrand);
    let rhs = spectral_pairing(n, s, test, |v| v);
    Ok(IdentityCheck::new(test.name(), lhs, rhs))
}

/// `∫_0^∞ ∫ e^{-t m} |φ̂| dξ dt` by a tensor rule against `∫ |φ̂|/m dξ`.
pub fn time_frequency_l1(n: usize, s: f64, test: &TestProfile) -> IdentityCheck {
    let cut = test.spectral_support();
    let mut breaks = vec![0.0];
    let mut b = 1e-8;
    while b < 1.0 {
        breaks.push(b);
        b *= 2.0;
    }
    let mut b = 1.0;
    while b < cut {
        breaks.push(b);
        b += 0.5;
    }
    breaks.push(cut);
    breaks.extend(sign_changes(n, test, 1.0, cut));
    breaks.sort_by(f64::total_cmp);
    let (rhos, wr) = composite_rule(&breaks);
    let amp: Vec<f64> = rhos
        .iter()
        .zip(&wr)
        .map(|(rho, w)| w * test.transform(n, *rho).abs() * rho.powi(n as i32 - 1))
        .collect();
    let ms: Vec<f64> = rhos.iter().map(|rho| symbol_m(*rho, s)).collect();
    let t_breaks: Vec<f64> = (-30..=40).map(f64::from).collect();
    let (ys, wy) = composite_rule(&t_breaks);
    let mut inner = 0.0;
    for (y, w) in ys.iter().zip(&wy) {
        let t = y.exp();
        let v: f64 = amp.iter().zip(&ms).map(|(a, m)| a * (-t * m).exp()).sum();
        inner += w * t * v;
    }
    // t < e^{-30}: e^{-tm} ≈ 1; t > e^{40}: only ρ^{2s} near 0 matters
    let t_lo = t_breaks[0].exp();
    let t_hi = t_breaks[t_breaks.len() - 1].exp();
    let q = 0.5 * n as f64 / s;
    let phi0 = test.transform(n, 0.0).abs();
    inner += t_lo * amp.iter().sum::<f64>();
    inner += phi0 * gamma(q) / (2.0 * s) * t_hi.powf(1.0 - q) / (q - 1.0);
    let c = (2.0 * PI).powi(-(n as i32)) * sphere_area(n);
    let lhs = c * inner;
    let rhs = spectral_pairing(n, s, test, f64::abs);
    IdentityCheck::new(test.name(), lhs, rhs)
}
