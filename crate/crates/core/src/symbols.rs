//! Fourier-side functions: the mixed symbol `m(ξ) = |ξ|² + |ξ|^{2s}`, its
//! inverse `M = 1/m`, the smooth cutoff `φ` and the low/high split
//! `M = M₁ + M₂` with `M₁ = A(ξ)|ξ|^{-2s}`.

use crate::error::{Error, Result};

/// `e^{-1/t}` for `t > 0`, zero otherwise.
fn bump_edge(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

pub fn symbol_m(xi: f64, s: f64) -> f64 {
    xi * xi + xi.powf(2.0 * s)
}

pub fn multiplier_m(xi: f64, s: f64) -> Result<f64> {
    if xi <= 0.0 {
        return Err(Error::ZeroFrequency);
    }
    Ok(1.0 / symbol_m(xi, s))
}

/// Cutoff equal to 1 on `[0,1]`, 0 on `[2,∞)` and
/// `g(2-r)/(g(2-r)+g(r-1))` with `g(t) = e^{-1/t}` in between.
pub fn cutoff_phi(xi: f64) -> f64 {
    if xi <= 1.0 {
        1.0
    } else if xi >= 2.0 {
        0.0
    } else {
        let a = bump_edge(2.0 - xi);
        let b = bump_edge(xi - 1.0);
        a / (a + b)
    }
}

/// `(M₁, M₂) = (φ/m, (1-φ)/m)`, sharing one evaluation of `m`.
pub fn split_multipliers(xi: f64, s: f64) -> Result<(f64, f64)> {
    if xi <= 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let m = symbol_m(xi, s);
    let phi = cutoff_phi(xi);
    Ok((phi / m, (1.0 - phi) / m))
}

/// `A(ξ) = φ(ξ)/(1 + |ξ|^{2-2s})`, so that `M₁ = A·|ξ|^{-2s}`.
pub fn low_symbol_a(xi: f64, s: f64) -> f64 {
    cutoff_phi(xi) / (1.0 + xi.powf(2.0 - 2.0 * s))
}
