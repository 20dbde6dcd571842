use serde::{Deserialize, Serialize};

use super::KernelProfile;
use crate::error::{Error, Result};

/// Least-squares line through `(ln r, ln v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points: usize,
}

pub fn fit_loglog(r: &[f64], v: &[f64]) -> Result<LogLogFit> {
    if r.len() != v.len() {
        return Err(Error::ShapeMismatch {
            expected: r.len(),
            got: v.len(),
        });
    }
    if r.len() < 2 {
        return Err(Error::RegionEmpty);
    }
    if let Some((r, v)) = r.iter().zip(v).find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NonpositiveValues { r: *r, value: *v });
    }
    let xs: Vec<f64> = r.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = v.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::RegionEmpty);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(LogLogFit {
        slope,
        intercept,
        residual,
        points: xs.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub fitted_slope: f64,
    pub slope_window: [f64; 2],
    pub slope_ci: f64,
    pub bound_exponents: [f64; 2],
    pub tol: f64,
    pub pass: bool,
}

/// Fit the log-log slope of `profile` on `window` and compare it with the
/// exponent interval `expected`, widened by `tol`.
pub fn verify_kernel_bounds(
    profile: &KernelProfile,
    expected: [f64; 2],
    window: [f64; 2],
    tol: f64,
) -> Result<BoundReport> {
    let r = profile.r();
    let (first, last) = (r[0], r[r.len() - 1]);
    if window[0] >= window[1] || window[0] < first || window[1] > last {
        return Err(Error::WindowOutsideTrust(window[0], window[1]));
    }
    let (rs, vs) = profile.window(window[0], window[1]);
    let fit = fit_loglog(&rs, &vs)?;
    let [lo, hi] = [expected[0].min(expected[1]), expected[0].max(expected[1])];
    Ok(BoundReport {
        fitted_slope: fit.slope,
        slope_window: window,
        slope_ci: fit.residual,
        bound_exponents: [lo, hi],
        tol,
        pass: fit.slope >= lo - tol && fit.slope <= hi + tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridSpec, RadialSpec};
    use crate::kernels::{KernelKind, QuadratureReport};

    fn power(p: f64) -> KernelProfile {
        let g = make_grid(&GridSpec::Radial(RadialSpec::new(3, 20.0, 64))).unwrap();
        let radial = g.as_radial().unwrap().clone();
        let values = radial.r.iter().map(|r| r.powf(p)).collect();
        KernelProfile {
            grid: radial,
            values,
            kind: KernelKind::Fundamental,
            report: QuadratureReport::default(),
        }
    }

    #[test]
    fn exact_powers() {
        let rep = verify_kernel_bounds(&power(-3.0), [-5.0, -3.0], [1.0, 10.0], 0.1).unwrap();
        assert!((rep.fitted_slope + 3.0).abs() < 1e-12);
        assert!(rep.pass);
        let rep = verify_kernel_bounds(&power(-6.0), [-5.0, -3.0], [1.0, 10.0], 0.1).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn rejects_bad_windows_and_values() {
        let p = power(-3.0);
        assert!(matches!(
            verify_kernel_bounds(&p, [-5.0, -3.0], [1.0, 100.0], 0.1),
            Err(Error::WindowOutsideTrust(..))
        ));
        let mut q = p.clone();
        let i = q.r().iter().position(|r| *r > 2.0).unwrap();
        q.values[i] = -1.0;
        assert!(matches!(
            verify_kernel_bounds(&q, [-5.0, -3.0], [1.0, 10.0], 0.1),
            Err(Error::NonpositiveValues { .. })
        ));
    }
}
