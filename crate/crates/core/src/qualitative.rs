//! Measured versions of the qualitative conclusions for computed
//! solutions: tail decay, positivity, radial symmetry, reflection
//! monotonicity and Hölder seminorms.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::kernels::fit_loglog;

/// Above this many nodes the Hölder estimate samples random pairs.
pub const ALL_PAIRS_LIMIT: usize = 4096;
pub const HOLDER_DRAWS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub residual: f64,
    pub window: [f64; 2],
    /// Accepted exponent interval `[-(n+2s) - tol, -(n-2s) + tol]`.
    pub accepted: [f64; 2],
    pub pass: bool,
    /// Set when the slope falls below the accepted interval.
    pub steep: bool,
}

/// Distances from `center` and values of every node.
fn radial_samples(u: &Field, center: &[f64]) -> Vec<(f64, f64)> {
    match u.grid() {
        Grid::Radial(g) => {
            g.r.iter()
                .copied()
                .zip(u.values().iter().copied())
                .collect()
        }
        Grid::Cartesian(g) => (0..g.len())
            .map(|i| {
                let p = g.position(i);
                let d = (0..g.n())
                    .map(|a| (p[a] - center[a]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                (d, u.values()[i])
            })
            .collect(),
    }
}

/// Largest radius at which a fit is trusted.
fn trusted_radius(grid: &Grid) -> f64 {
    match grid {
        Grid::Radial(g) => 0.5 * g.spec.r_max,
        Grid::Cartesian(g) => 0.5 * g.spec.half_length,
    }
}

/// Log-log tail slope of `u` about `center` (ignored on radial grids).
pub fn decay_slope(
    u: &Field,
    center: &[f64],
    window: [f64; 2],
    s: f64,
    tol: f64,
) -> Result<DecayFit> {
    if window[0] <= 0.0 || window[0] >= window[1] || window[1] > trusted_radius(u.grid()) {
        return Err(Error::WindowOutsideTrust(window[0], window[1]));
    }
    let (r, v): (Vec<f64>, Vec<f64>) = radial_samples(u, center)
        .into_iter()
        .filter(|(r, _)| *r >= window[0] && *r <= window[1])
        .unzip();
    if r.is_empty() {
        return Err(Error::RegionEmpty);
    }
    let fit = fit_loglog(&r, &v)?;
    let n = u.grid().n() as f64;
    let accepted = [-(n + 2.0 * s) - tol, -(n - 2.0 * s) + tol];
    Ok(DecayFit {
        slope: fit.slope,
        residual: fit.residual,
        window,
        accepted,
        pass: fit.slope >= accepted[0] && fit.slope <= accepted[1],
        steep: fit.slope < accepted[0],
    })
}

/// `min u / sup u`.
pub fn positivity_check(u: &Field) -> f64 {
    u.min() / u.max().max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub center: Vec<f64>,
    /// Largest spread of `u` over nodes at exactly equal distance from the
    /// lattice point nearest the center, relative to `sup |u|`.
    pub deviation: f64,
}

/// Detect the maximum and measure the departure from radial symmetry about
/// it. Radial grids are symmetric by construction.
pub fn symmetry_deviation(u: &Field) -> Result<SymmetryReport> {
    let g = match u.grid() {
        Grid::Radial(g) => {
            return Ok(SymmetryReport {
                center: vec![0.0; g.n()],
                deviation: 0.0,
            })
        }
        Grid::Cartesian(g) => g.clone(),
    };
    let n = g.n();
    let vals = u.values();
    let (lo, hi) = (u.min(), u.max());
    let scale = hi.abs().max(lo.abs());
    if !(hi - lo > 1e-14 * scale) {
        return Err(Error::FlatField);
    }
    let ties: Vec<usize> = (0..vals.len())
        .filter(|&i| vals[i] >= hi - 1e-14 * scale)
        .collect();
    let h = g.spacing;
    let mut center = vec![0.0; n];
    for &i in &ties {
        let p = g.position(i);
        for a in 0..n {
            center[a] += p[a] / ties.len() as f64;
        }
    }
    if ties.len() == 1 {
        let m = g.unravel(ties[0]);
        let pts = g.spec.points;
        for a in 0..n {
            if m[a] == 0 || m[a] + 1 == pts {
                continue;
            }
            let mut lo_idx = m;
            lo_idx[a] -= 1;
            let mut hi_idx = m;
            hi_idx[a] += 1;
            let (um, u0, up) = (
                vals[g.ravel(&lo_idx[..n])],
                vals[ties[0]],
                vals[g.ravel(&hi_idx[..n])],
            );
            let curv = um - 2.0 * u0 + up;
            if curv < 0.0 {
                center[a] += 0.5 * (um - up) / curv * h;
            }
        }
    }
    // doubled lattice coordinates of the nearest node or half-node
    let c2: Vec<i64> = center
        .iter()
        .map(|c| (2.0 * (c + g.spec.half_length) / h).round() as i64)
        .collect();
    // classes inside the trusted ball only; periodic images dominate beyond
    let trusted = 2.0 * (0.5 * g.spec.half_length) / h;
    let mut classes: HashMap<i64, (f64, f64)> = HashMap::new();
    for (i, &v) in vals.iter().enumerate() {
        let m = g.unravel(i);
        let key: i64 = (0..n).map(|a| (2 * m[a] as i64 - c2[a]).pow(2)).sum();
        if key as f64 > trusted * trusted {
            continue;
        }
        let e = classes.entry(key).or_insert((v, v));
        e.0 = e.0.min(v);
        e.1 = e.1.max(v);
    }
    let spread = classes.values().map(|(a, b)| b - a).fold(0.0, f64::max);
    Ok(SymmetryReport {
        center,
        deviation: spread / scale,
    })
}

/// `w_λ = u(x^λ) - u(x)` on `Σ_λ = {x_axis > λ}`, zero elsewhere, and its
/// minimum over the nodes whose reflection stays inside the box.
pub fn reflection_difference(u: &Field, plane: f64, axis: usize) -> Result<(Field, f64)> {
    let g = u.grid().as_cartesian()?;
    let n = g.n();
    if axis >= n {
        return Err(Error::DimensionOutOfRange(axis, "axis must be below n"));
    }
    let h = g.spacing;
    let twice = 2.0 * (plane + g.spec.half_length) / h;
    if (twice - twice.round()).abs() > 1e-9
        || twice < 0.0
        || twice > 2.0 * (g.spec.points - 1) as f64
    {
        return Err(Error::OffLatticePlane(plane));
    }
    let sum = twice.round() as i64;
    let vals = u.values();
    let mut w = vec![0.0; vals.len()];
    let mut min = f64::INFINITY;
    for i in 0..vals.len() {
        let m = g.unravel(i);
        if g.coord(m[axis]) <= plane {
            continue;
        }
        let j = sum - m[axis] as i64;
        if j < 0 || j >= g.spec.points as i64 {
            continue;
        }
        let mut r = m;
        r[axis] = j as usize;
        let d = vals[g.ravel(&r[..n])] - vals[i];
        w[i] = d;
        min = min.min(d);
    }
    if !min.is_finite() {
        return Err(Error::RegionEmpty);
    }
    Ok((Field::new(u.grid(), w)?, min))
}

/// Linear interpolation of a radial profile onto a cartesian grid, constant
/// inside the first node and zero beyond the last.
pub fn embed_radial(u: &Field, target: &Grid) -> Result<Field> {
    let g = u.grid().as_radial()?;
    let r = &g.r;
    let v = u.values();
    let at = |d: f64| -> f64 {
        if d <= r[0] {
            return v[0];
        }
        if d >= r[r.len() - 1] {
            return 0.0;
        }
        let k = r.partition_point(|x| *x <= d);
        let t = (d - r[k - 1]) / (r[k] - r[k - 1]);
        v[k - 1] + t * (v[k] - v[k - 1])
    };
    Field::from_points(target, |x| at(x.iter().map(|c| c * c).sum::<f64>().sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    All,
    Ball { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    pub value: f64,
    pub pairs: usize,
    /// True when pairs were subsampled, so `value` is a lower bound.
    pub lower_bound: bool,
}

/// `sup |u(x) - u(y)| / |x - y|^α` over node pairs in `region` (a ball
/// about the origin).
pub fn holder_seminorm(u: &Field, alpha: f64, region: Region, seed: u64) -> Result<HolderEstimate> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside (0,1]"
        )));
    }
    let n = u.grid().n();
    let pts: Vec<([f64; 3], f64)> = match u.grid() {
        Grid::Radial(g) => {
            g.r.iter()
                .map(|&r| [r, 0.0, 0.0])
                .zip(u.values().iter().copied())
                .collect()
        }
        Grid::Cartesian(g) => (0..g.len())
            .map(|i| (g.position(i), u.values()[i]))
            .collect(),
    };
    let dims = if matches!(u.grid(), Grid::Radial(_)) {
        1
    } else {
        n
    };
    let inside: Vec<([f64; 3], f64)> = pts
        .into_iter()
        .filter(|(p, _)| match region {
            Region::All => true,
            Region::Ball { radius } => {
                p[..dims].iter().map(|c| c * c).sum::<f64>() <= radius * radius
            }
        })
        .collect();
    if inside.len() < 2 {
        return Err(Error::RegionEmpty);
    }
    let quotient = |a: &([f64; 3], f64), b: &([f64; 3], f64)| -> f64 {
        let d = (0..dims)
            .map(|k| (a.0[k] - b.0[k]).powi(2))
            .sum::<f64>()
            .sqrt();
        if d == 0.0 {
            0.0
        } else {
            (a.1 - b.1).abs() / d.powf(alpha)
        }
    };
    let k = inside.len();
    if k <= ALL_PAIRS_LIMIT {
        let mut best = 0.0f64;
        for i in 0..k {
            for j in i + 1..k {
                best = best.max(quotient(&inside[i], &inside[j]));
            }
        }
        return Ok(HolderEstimate {
            alpha,
            value: best,
            pairs: k * (k - 1) / 2,
            lower_bound: false,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..HOLDER_DRAWS {
        let i = rng.random_range(0..k);
        let j = rng.random_range(0..k);
        best = best.max(quotient(&inside[i], &inside[j]));
    }
    Ok(HolderEstimate {
        alpha,
        value: best,
        pairs: HOLDER_DRAWS,
        lower_bound: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualReport {
    pub decay: Option<DecayFit>,
    pub symmetry_center: Vec<f64>,
    pub symmetry_deviation: f64,
    pub positivity_margin: f64,
    pub holder: Vec<HolderEstimate>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, CartesianSpec, GridSpec, RadialSpec};

    fn cart(n: usize, points: usize, l: f64) -> Grid {
        make_grid(&GridSpec::Cartesian(CartesianSpec {
            n,
            points,
            half_length: l,
        }))
        .unwrap()
    }

    #[test]
    fn decay_of_exact_power() {
        let g = make_grid(&GridSpec::Radial(RadialSpec::new(4, 40.0, 128))).unwrap();
        let u = Field::radial(&g, |r| r.powi(-4));
        let fit = decay_slope(&u, &[], [2.0, 15.0], 0.5, 0.0).unwrap();
        assert!((fit.slope + 4.0).abs() < 1e-12 && fit.pass);
        let e = Field::radial(&g, |r| (-r).exp());
        let fit = decay_slope(&e, &[], [2.0, 15.0], 0.5, 0.3).unwrap();
        assert!(!fit.pass && fit.steep);
        assert!(matches!(
            decay_slope(&u, &[], [2.0, 30.0], 0.5, 0.3),
            Err(Error::WindowOutsideTrust(..))
        ));
    }

    #[test]
    fn symmetry_of_shifted_gaussian() {
        let g = cart(2, 64, 4.0);
        let u = Field::from_points(&g, |x| {
            (-((x[0] - 1.0).powi(2) + (x[1] + 0.5).powi(2))).exp()
        })
        .unwrap();
        let rep = symmetry_deviation(&u).unwrap();
        assert!(rep.deviation < 1e-12);
        assert!((rep.center[0] - 1.0).abs() < 0.125 && (rep.center[1] + 0.5).abs() < 0.125);
        let scaled = u.map(|v| 3.0 * v);
        assert!(symmetry_deviation(&scaled).unwrap().deviation < 1e-12);
        let odd = Field::from_points(&g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            (-r2).exp() * (1.0 + 0.01 * x[0])
        })
        .unwrap();
        assert!(symmetry_deviation(&odd).unwrap().deviation >= 5e-3);
        let flat = Field::from_points(&g, |_| 2.0).unwrap();
        assert!(matches!(symmetry_deviation(&flat), Err(Error::FlatField)));
    }

    #[test]
    fn reflection_monotone_for_radial_decrease() {
        let g = cart(2, 64, 4.0);
        let u = Field::from_points(&g, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        let (_, min) = reflection_difference(&u, 1.0, 0).unwrap();
        assert!(min >= -1e-12);
        let (w, _) = reflection_difference(&u, 0.0, 0).unwrap();
        assert!(w.sup_norm() == 0.0);
        assert!(matches!(
            reflection_difference(&u, 0.03, 0),
            Err(Error::OffLatticePlane(_))
        ));
        let bumpy = Field::from_points(&g, |x| {
            (-(x[0] * x[0] + x[1] * x[1])).exp() + 0.5 * (-(x[0] - 2.0).powi(2) * 4.0).exp()
        })
        .unwrap();
        let (_, min) = reflection_difference(&bumpy, 1.0, 0).unwrap();
        assert!(min < 0.0);
    }

    #[test]
    fn holder_cases() {
        let g = cart(2, 32, 1.0);
        let c = Field::from_points(&g, |_| 1.0).unwrap();
        assert_eq!(holder_seminorm(&c, 0.5, Region::All, 1).unwrap().value, 0.0);
        let lip = Field::from_points(&g, |x| x[0].abs()).unwrap();
        let est = holder_seminorm(&lip, 1.0, Region::All, 1).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12 && !est.lower_bound);
        let big = cart(2, 128, 1.0);
        let lip = Field::from_points(&big, |x| x[0].abs()).unwrap();
        let a = holder_seminorm(&lip, 1.0, Region::All, 7).unwrap();
        let b = holder_seminorm(&lip, 1.0, Region::All, 7).unwrap();
        assert!(a.lower_bound && a == b && a.value <= 1.0 + 1e-12);
    }

    #[test]
    fn holder_detects_square_root() {
        let est = |points: usize, alpha: f64| {
            let g = make_grid(&GridSpec::Radial(RadialSpec::new(3, 1.0, points))).unwrap();
            let u = Field::radial(&g, f64::sqrt);
            holder_seminorm(&u, alpha, Region::All, 0).unwrap().value
        };
        let (h1, h2) = (est(64, 0.5), est(256, 0.5));
        assert!(h1 <= 1.0 + 1e-12 && h2 <= 1.0 + 1e-12);
        assert!(est(256, 1.0) > 1.5 * est(64, 1.0));
    }

    #[test]
    fn positivity_margins() {
        let g = cart(2, 16, 2.0);
        let gauss = Field::from_points(&g, |x| (-x[0] * x[0]).exp()).unwrap();
        assert!(positivity_check(&gauss) > 0.0);
        let mut z = gauss.clone();
        z.values_mut()[3] = 0.0;
        assert_eq!(positivity_check(&z), 0.0);
        let sc = Field::from_points(&g, |x| x[0]).unwrap();
        assert!(positivity_check(&sc) < 0.0);
    }

    #[test]
    fn embedding_preserves_reflection_sign() {
        let g = make_grid(&GridSpec::Radial(RadialSpec::new(4, 20.0, 64))).unwrap();
        let u = Field::radial(&g, |r| (1.0 + r * r).powf(-1.5));
        let slice = cart(2, 32, 5.0);
        let e = embed_radial(&u, &slice).unwrap();
        let cg = slice.as_cartesian().unwrap();
        let (_, min) = reflection_difference(&e, cg.coord(20), 0).unwrap();
        assert!(min >= -1e-14);
    }
}
