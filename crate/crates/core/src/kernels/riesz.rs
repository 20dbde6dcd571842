use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::{KernelKind, KernelProfile, QuadratureReport};
use crate::error::{Error, Result};
use crate::grid::Grid;

/// `γ(α) = π^{n/2} 2^α Γ(α/2) / Γ(n/2 - α/2)`.
pub fn gamma_alpha(n: usize, alpha: f64) -> Result<f64> {
    let nf = n as f64;
    if !(alpha > 0.0 && alpha < nf) {
        return Err(Error::AlphaOutOfRange { alpha, n });
    }
    Ok(PI.powf(0.5 * nf) * 2f64.powf(alpha) * gamma(0.5 * alpha) / gamma(0.5 * (nf - alpha)))
}

/// `R_α(r) = r^{-(n-α)} / γ(α)`.
pub fn riesz_kernel(grid: &Grid, alpha: f64, n: usize) -> Result<KernelProfile> {
    let radial = grid.as_radial()?.clone();
    if radial.n() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            got: radial.n(),
        });
    }
    let g = gamma_alpha(n, alpha)?;
    let values = radial
        .r
        .iter()
        .map(|r| r.powf(alpha - n as f64) / g)
        .collect();
    Ok(KernelProfile {
        grid: radial,
        values,
        kind: KernelKind::Riesz { alpha },
        report: QuadratureReport {
            method: "closed-form".into(),
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::power_inverse_transform;

    #[test]
    fn hand_values() {
        assert!((gamma_alpha(4, 2.0).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
        assert!((gamma_alpha(3, 1.0).unwrap() - 2.0 * PI * PI).abs() < 1e-12);
        assert!(matches!(
            gamma_alpha(4, 4.0),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(gamma_alpha(3, 0.0).is_err());
    }

    #[test]
    fn kernel_inverts_power_symbol() {
        for &(n, alpha) in &[(3usize, 1.0), (4, 2.0), (5, 0.7), (2, 1.3)] {
            let r = 1.7;
            let want = power_inverse_transform(n, -alpha, r);
            let got = r.powf(alpha - n as f64) / gamma_alpha(n, alpha).unwrap();
            assert!(((got - want) / want).abs() < 1e-12);
        }
    }
}
