//! One-sided `s`-stable subordinator.
//!
//! Its density `f_s` has Laplace transform `∫ e^{-λx} f_s(x) dx = e^{-λ^s}`,
//! so `e^{-t|ξ|^{2s}} = ∫ e^{-t^{1/s} x |ξ|²} f_s(x) dx` and the heat kernel
//! of `-Δ + (-Δ)^s` is a positive mixture of Gaussians:
//! `H(r,t) = ∫ G(r, t + t^{1/s} x) f_s(x) dx`.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::quad::{adaptive, composite_rule};

/// Tabulated subordinator density on a logarithmic quadrature grid.
#[derive(Debug, Clone)]
pub struct Subordinator {
    pub s: f64,
    /// Quadrature nodes in `x`.
    pub nodes: Vec<f64>,
    /// Weights for `∫ · dx`, density already folded in.
    pub weights: Vec<f64>,
    /// Upper end of the tabulated range.
    pub x_hi: f64,
}

impl Subordinator {
    pub fn new(s: f64) -> Self {
        assert!(s > 0.0 && s < 1.0);
        let mut y_lo = 0.0f64;
        while y_lo > -200.0 {
            let x = (y_lo - 1.0).exp();
            if stable_density(s, x) * x < 1e-40 {
                break;
            }
            y_lo -= 1.0;
        }
        let y_hi = (37.0 / s).max(60.0);
        // the left edge rises like exp(-c e^{-ys/(1-s)}), so it gets finer panels
        let mut breaks = vec![y_lo];
        let mut y = y_lo;
        while y < y_hi {
            y = (y + if y < 4.0 { 0.5 } else { 2.0 }).min(y_hi);
            breaks.push(y);
        }
        let (ys, ws) = composite_rule(&breaks);
        let mut nodes = Vec::with_capacity(ys.len());
        let mut weights = Vec::with_capacity(ys.len());
        for (y, w) in ys.into_iter().zip(ws) {
            let x = y.exp();
            nodes.push(x);
            weights.push(w * x * stable_density(s, x));
        }
        Subordinator {
            s,
            nodes,
            weights,
            x_hi: y_hi.exp(),
        }
    }

    /// `P(X > x)` from the convergent large-`x` series.
    pub fn tail_mass(&self, x: f64) -> f64 {
        survival_series(self.s, x)
    }

    /// Quadrature of the Laplace transform; should equal `e^{-λ^s}`.
    pub fn laplace(&self, lambda: f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * (-lambda * x).exp())
            .sum()
    }

    /// Total tabulated mass plus the analytic tail beyond `x_hi`.
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum::<f64>() + self.tail_mass(self.x_hi)
    }
}

/// Density of the one-sided stable law with `E e^{-λX} = e^{-λ^s}`.
///
/// Zolotarev's integral representation for moderate `x`, the convergent
/// power series in `x^{-s}` for large `x`.
pub fn stable_density(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = x.powf(-s);
    if z < 0.1 {
        return density_series(s, x);
    }
    let k = 1.0 / (1.0 - s);
    let c = x.powf(-s * k);
    let ln_a = |phi: f64| {
        k * (s * (s * phi).sin().ln() + (1.0 - s) * ((1.0 - s) * phi).sin().ln() - phi.sin().ln())
    };
    let integrand = |phi: f64| {
        let la = ln_a(phi);
        let a = la.exp();
        (la - c * a).exp()
    };
    let (v, _) = adaptive(integrand, 0.0, PI, 0.0, 1e-13);
    s * k / PI * x.powf(-k) * v
}

fn density_series(s: f64, x: f64) -> f64 {
    let z = x.powf(-s);
    let mut sum = 0.0;
    let mut zk = 1.0;
    let mut fact = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        zk *= z;
        fact *= kf;
        let bound = gamma(kf * s + 1.0) / fact * zk;
        let term = bound * (kf * PI * s).sin();
        sum += if k % 2 == 1 { term } else { -term };
        if bound < 1e-18 * sum.abs() {
            break;
        }
    }
    sum / (PI * x)
}

fn survival_series(s: f64, x: f64) -> f64 {
    let z = x.powf(-s);
    let mut sum = 0.0;
    let mut zk = 1.0;
    let mut fact = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        zk *= z;
        fact *= kf;
        let bound = gamma(kf * s) / fact * zk;
        let term = bound * (kf * PI * s).sin();
        sum += if k % 2 == 1 { term } else { -term };
        if bound < 1e-18 * sum.abs() {
            break;
        }
    }
    sum / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levy_closed_form_at_half() {
        for x in [0.01f64, 0.1, 1.0, 10.0, 500.0, 1e6] {
            let want = x.powf(-1.5) * (-0.25 / x).exp() / (2.0 * PI.sqrt());
            let got = stable_density(0.5, x);
            assert!(
                ((got - want) / want).abs() < 1e-10,
                "x={x}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn laplace_transform_oracle() {
        for s in [0.25, 0.5, 0.75] {
            let sub = Subordinator::new(s);
            assert!(
                (sub.total_mass() - 1.0).abs() < 1e-10,
                "s={s} mass {}",
                sub.total_mass()
            );
            for lambda in [0.01, 0.3, 1.0, 4.0, 50.0] {
                let want = (-f64::powf(lambda, s)).exp();
                let got = sub.laplace(lambda);
                assert!(
                    (got - want).abs() < 1e-10,
                    "s={s} λ={lambda}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn series_and_integral_agree_at_switch() {
        for s in [0.25, 0.6, 0.75] {
            let x = 10f64.powf(1.0 / s);
            let a = density_series(s, x);
            let k = 1.0 / (1.0 - s);
            let c = x.powf(-s * k);
            let (v, _) = adaptive(
                |phi: f64| {
                    let la = k
                        * (s * (s * phi).sin().ln() + (1.0 - s) * ((1.0 - s) * phi).sin().ln()
                            - phi.sin().ln());
                    (la - c * la.exp()).exp()
                },
                0.0,
                PI,
                0.0,
                1e-13,
            );
            let b = s * k / PI * x.powf(-k) * v;
            assert!(((a - b) / b).abs() < 1e-9, "s={s}: {a} vs {b}");
        }
    }
}
