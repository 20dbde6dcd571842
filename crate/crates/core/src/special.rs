//! Special functions: Bessel functions of integer and half-integer order,
//! Gamma-function helpers and a few closed-form constants.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

/// `J_ν(x)` for `ν >= 0` with `2ν` an integer and `x >= 0`.
///
/// Power series below `x = 4`, where the alternating terms stay below 4 in
/// magnitude. Above, half-integer orders use the Hankel expansion, which
/// terminates and is exact; integer orders use the trapezoidal rule on
/// Bessel's integral up to `x = 25` and the Hankel expansion beyond, where
/// its smallest term is below `1e-20`.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && (2.0 * nu).fract() == 0.0, "order {nu}");
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x < SERIES_LIMIT {
        return series(nu, x);
    }
    let half_integer = nu.fract() != 0.0;
    if half_integer || x >= 25.0 {
        hankel_asymptotic(nu, x)
    } else {
        bessel_integral(nu as i32, x)
    }
}

const SERIES_LIMIT: f64 = 4.0;

fn series(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = (0.5 * x).powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > x {
            break;
        }
        if k > 200.0 {
            break;
        }
    }
    sum
}

fn bessel_integral(order: i32, x: f64) -> f64 {
    const M: usize = 64;
    let h = PI / M as f64;
    let n = order as f64;
    let mut sum = 0.5 * (1.0 + (n * PI).cos());
    for j in 1..M {
        let tau = j as f64 * h;
        sum += (n * tau - x * tau.sin()).cos();
    }
    sum / M as f64
}

fn hankel_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term == 0.0 {
            break;
        }
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Surface area of the unit sphere in `ℝⁿ`, `2π^{n/2}/Γ(n/2)`.
pub fn sphere_area(n: usize) -> f64 {
    let h = 0.5 * n as f64;
    2.0 * PI.powf(h) / gamma(h)
}

/// Volume of the ball of radius `a` in `ℝⁿ`.
pub fn ball_volume(n: usize, a: f64) -> f64 {
    let h = 0.5 * n as f64;
    PI.powf(h) * a.powi(n as i32) / gamma(h + 1.0)
}

/// Classical normalisation of the singular-integral fractional Laplacian,
/// `4^s Γ(n/2+s) / (π^{n/2} |Γ(-s)|)`, for which the symbol is `|ξ|^{2s}`.
pub fn fractional_constant(n: usize, s: f64) -> f64 {
    let h = 0.5 * n as f64;
    4f64.powf(s) * gamma(h + s) / (PI.powf(h) * gamma(-s).abs())
}

/// Newtonian kernel `Γ(n/2-1) / (4π^{n/2} r^{n-2})`, the inverse transform
/// of `|ξ|^{-2}` for `n >= 3`.
pub fn newtonian_kernel(n: usize, r: f64) -> f64 {
    let h = 0.5 * n as f64;
    gamma(h - 1.0) / (4.0 * PI.powf(h) * r.powi(n as i32 - 2))
}

/// Inverse transform of the radial power `|ξ|^{β}` on `ℝⁿ` for `-n < β < 0`:
/// `2^β π^{-n/2} Γ((n+β)/2) / Γ(-β/2) · r^{-n-β}`.
pub fn power_inverse_transform(n: usize, beta: f64, r: f64) -> f64 {
    let h = 0.5 * n as f64;
    2f64.powf(beta) * PI.powf(-h) * gamma(h + 0.5 * beta) / gamma(-0.5 * beta)
        * r.powf(-(n as f64) - beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from scipy.special.jv (double precision).
    const TABLE: &[(f64, f64, f64)] = &[
        (0.0, 0.5, 0.938469807240813),
        (0.0, 11.9, 0.025049441699589774),
        (0.0, 12.1, 0.06966677360680723),
        (0.0, 24.9, 0.08324596835301551),
        (0.0, 40.0, 0.0073668905842372906),
        (1.0, 3.0, 0.33905895852593626),
        (1.0, 12.0, -0.22344710449062757),
        (1.0, 18.5, -0.16663364001001613),
        (1.0, 25.5, -0.06204853649148411),
        (1.0, 100.0, -0.07714535201411214),
        (2.0, 7.0, -0.3014172200859401),
        (2.0, 15.0, 0.041571677975250444),
        (0.5, 13.0, 0.0929801758537244),
        (1.5, 2.0, 0.49129377868716273),
        (1.5, 30.0, -0.027267945711177695),
        (2.5, 12.5, -0.03936307170800363),
        (3.0, 20.0, -0.09890139456044958),
        (1.0, 11.99, -0.22409937126624865),
        (2.0, 24.99, -0.10512084080970943),
    ];

    #[test]
    fn matches_reference_values() {
        for &(nu, x, want) in TABLE {
            let got = bessel_j(nu, x);
            assert!(
                (got - want).abs() < 2e-13,
                "J_{nu}({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn branches_agree_at_switch_points() {
        for nu in [0.0, 1.0, 2.0] {
            let x = SERIES_LIMIT;
            assert!((series(nu, x) - bessel_integral(nu as i32, x)).abs() < 1e-14);
            assert!((bessel_integral(nu as i32, 25.0) - hankel_asymptotic(nu, 25.0)).abs() < 1e-14);
        }
        for nu in [0.5, 1.5, 2.5] {
            let x = SERIES_LIMIT;
            assert!((series(nu, x) - hankel_asymptotic(nu, x)).abs() < 1e-14);
        }
    }

    #[test]
    fn half_integer_closed_form() {
        for x in [0.3, 5.0, 11.0, 14.0, 60.0] {
            let want = (2.0 / (PI * x)).sqrt() * x.sin();
            assert!((bessel_j(0.5, x) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn constants() {
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((ball_volume(3, 2.0) - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12);
        // s = 1/2, n = 1: the Cauchy kernel constant 1/π.
        assert!((fractional_constant(1, 0.5) - 1.0 / PI).abs() < 1e-14);
        // n = 3: 1/(4π r)
        assert!((newtonian_kernel(3, 2.0) - 1.0 / (8.0 * PI)).abs() < 1e-15);
        assert!((power_inverse_transform(3, -2.0, 2.0) - newtonian_kernel(3, 2.0)).abs() < 1e-15);
    }
}
