use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fundamental::{origin_integral, radial_inverse, ORIGIN_BALL};
use super::{clamp_noise, KernelKind, KernelProfile, QuadratureReport};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::Params;
use crate::quad::{hankel_integral, HankelLayout};
use crate::special::{ball_volume, bessel_j};
use crate::symbols::symbol_m;

/// Radius of the ball whose indicator is convolved with `Z`.
pub const BALL_RADIUS: f64 = 0.5;

/// Frequency up to which the oscillatory tail is summed.
const TAIL_END: f64 = 400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BarrierKind {
    /// Lower barrier, bounded below by `c/r^{n+2s}` when `n > 4s`.
    Omega,
    /// Upper barrier, bounded above by `c/r^{n-2s}` when `n > 4`.
    V,
}

/// Fourier transform of the indicator of the ball of radius `a`:
/// `(2πa/ρ)^{n/2} J_{n/2}(aρ)`.
pub fn ball_transform(n: usize, a: f64, rho: f64) -> f64 {
    if rho == 0.0 {
        return ball_volume(n, a);
    }
    let h = 0.5 * n as f64;
    (2.0 * PI * a / rho).powf(h) * bessel_j(h, a * rho)
}

fn barrier_at(n: usize, s: f64, r: f64) -> f64 {
    let nu = 0.5 * n as f64 - 1.0;
    let half_n = 0.5 * n as f64;
    let vol = ball_volume(n, BALL_RADIUS);
    let layout = HankelLayout {
        eps: ORIGIN_BALL,
        plain_tail: Some(TAIL_END),
        ..Default::default()
    };
    let integral = hankel_integral(
        |rho: f64| ball_transform(n, BALL_RADIUS, rho) * rho.powf(half_n) / symbol_m(rho, s),
        nu,
        r,
        layout,
        Some(|eps: f64| vol * origin_integral(n, s, r, eps)),
    );
    radial_inverse(n, r, integral)
}

/// `Z ∗ χ_{B_{1/2}}` on a radial grid. Outside the hypotheses of the
/// matching bound the profile is still computed and a warning recorded.
pub fn barrier_profile(grid: &Grid, params: &Params, kind: BarrierKind) -> Result<KernelProfile> {
    let radial = grid.as_radial()?.clone();
    let (n, s) = (radial.n(), params.s);
    let mut report = QuadratureReport {
        method: "fourier-ball-transform".into(),
        ..Default::default()
    };
    let nf = n as f64;
    let warning = match kind {
        BarrierKind::Omega if nf <= 4.0 * s => {
            Some(format!("n = {n} <= 4s: lower bound not guaranteed"))
        }
        BarrierKind::V if n <= 4 => Some(format!("n = {n} <= 4: upper bound not guaranteed")),
        _ => None,
    };
    if let Some(w) = warning {
        log::warn!("{w}");
        report.warnings.push(w);
    }
    let mut values: Vec<f64> = radial.r.par_iter().map(|&r| barrier_at(n, s, r)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::QuadratureFailure("non-finite barrier sample".into()));
    }
    clamp_noise(&mut values, &mut report)?;
    Ok(KernelProfile {
        grid: radial,
        values,
        kind: KernelKind::Barrier { which: kind },
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::fundamental_at_direct;
    use crate::quad::adaptive;

    #[test]
    fn ball_transform_small_argument() {
        for n in 2..6 {
            let v = ball_volume(n, 0.5);
            assert!((ball_transform(n, 0.5, 1e-6) - v).abs() < 1e-10 * v);
        }
    }

    #[test]
    fn ball_transform_matches_quadrature() {
        // n = 3: F[χ_B](ρ) = 4π ∫_0^a r sin(ρr)/ρ dr
        let (a, rho) = (0.5, 3.7);
        let want = 4.0 * PI * adaptive(|r: f64| r * (rho * r).sin() / rho, 0.0, a, 1e-16, 1e-14).0;
        assert!((ball_transform(3, a, rho) - want).abs() < 1e-12);
    }

    #[test]
    fn far_field_is_volume_times_z() {
        let (n, s) = (4, 0.5);
        let r = 15.0;
        let omega = barrier_at(n, s, r);
        let approx = ball_volume(n, BALL_RADIUS) * fundamental_at_direct(n, s, r);
        assert!(
            ((omega - approx) / approx).abs() < 5e-3,
            "{omega} vs {approx}"
        );
    }
}
