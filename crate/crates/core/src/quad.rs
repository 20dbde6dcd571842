//! Quadrature building blocks: Gauss–Legendre panels, adaptive
//! Gauss–Kronrod, Wynn's epsilon algorithm and an oscillatory Hankel-type
//! integrator for `∫ f(ρ) J_ν(rρ) dρ` over half-lines.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::special::bessel_j;

/// Points per panel in every composite rule of the crate.
pub const PANEL_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..(order + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(order, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub(crate) fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// `∫_a^b f` with one Gauss–Legendre panel of [`PANEL_ORDER`] points.
#[inline]
pub fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (x, w) = panel_rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut sum = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        sum += wi * f(c + h * xi);
    }
    sum * h
}

/// Nodes and weights of a composite rule over the given breakpoints.
pub fn composite_rule(breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = panel_rule();
    let mut nodes = Vec::with_capacity(PANEL_ORDER * breaks.len());
    let mut weights = Vec::with_capacity(PANEL_ORDER * breaks.len());
    for pair in breaks.windows(2) {
        let c = 0.5 * (pair[0] + pair[1]);
        let h = 0.5 * (pair[1] - pair[0]);
        for (xi, wi) in x.iter().zip(w) {
            nodes.push(c + h * xi);
            weights.push(h * wi);
        }
    }
    (nodes, weights)
}

const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * GK_WK[7];
    let mut gauss = fc * GK_WG[3];
    for j in 0..7 {
        let dx = h * GK_X[j];
        let s = f(c - dx) + f(c + dx);
        kron += GK_WK[j] * s;
        if j % 2 == 1 {
            gauss += GK_WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
/// Returns the estimate and its error bound.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> (f64, f64) {
    let mut intervals = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..2000 {
        let total: f64 = intervals.iter().map(|i| i.2).sum();
        let err: f64 = intervals.iter().map(|i| i.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return (total, err);
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            intervals.push((lo, hi, 0.0, 0.0));
            continue;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    let total: f64 = intervals.iter().map(|i| i.2).sum();
    let err: f64 = intervals.iter().map(|i| i.3).sum();
    (total, err)
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
/// Returns the accelerated limit and the change between the last two
/// even-column estimates.
pub fn wynn_epsilon(partial_sums: &[f64]) -> (f64, f64) {
    let n = partial_sums.len();
    if n < 3 {
        let last = *partial_sums.last().unwrap_or(&0.0);
        return (last, f64::INFINITY);
    }
    // eps[k] holds column k of the epsilon table for the current diagonal.
    let mut prev: Vec<f64> = partial_sums.to_vec();
    let mut prev_prev = vec![0.0; n + 1];
    let mut best = partial_sums[n - 1];
    let mut best_err = (partial_sums[n - 1] - partial_sums[n - 2]).abs();
    let mut col = 1;
    while prev.len() > 1 {
        let mut next = Vec::with_capacity(prev.len() - 1);
        for i in 0..prev.len() - 1 {
            let diff = prev[i + 1] - prev[i];
            let value = if diff == 0.0 {
                f64::INFINITY
            } else {
                prev_prev[i + 1] + 1.0 / diff
            };
            next.push(value);
        }
        if col % 2 == 0 && next.len() >= 2 {
            let a = next[next.len() - 1];
            let b = next[next.len() - 2];
            if a.is_finite() && b.is_finite() {
                let err = (a - b).abs();
                if err < best_err {
                    best = a;
                    best_err = err;
                }
            }
        }
        if next.iter().any(|v| !v.is_finite()) {
            break;
        }
        prev_prev = prev;
        prev = next;
        col += 1;
    }
    (best, best_err)
}

/// Layout hints for [`hankel_integral`].
#[derive(Debug, Clone, Copy)]
pub struct HankelLayout {
    /// Lower end of the integration range.
    pub lo: f64,
    /// Upper end (`f64::INFINITY` for a half-line).
    pub hi: f64,
    /// Frequency scale where the integrand changes character; geometric
    /// panels cluster toward `lo` below it.
    pub knee: f64,
    /// Smallest panel edge when `lo == 0`; `[0, eps]` is integrated by
    /// `origin` if given, otherwise by a plain panel.
    pub eps: f64,
    /// Sum the tail plainly up to this frequency instead of extrapolating.
    /// Meant for absolutely integrable products of Bessel functions whose
    /// partial sums beat rather than alternate.
    pub plain_tail: Option<f64>,
}

impl Default for HankelLayout {
    fn default() -> Self {
        HankelLayout {
            lo: 0.0,
            hi: f64::INFINITY,
            knee: 1.0,
            eps: 1e-12,
            plain_tail: None,
        }
    }
}

/// `∫_lo^hi f(ρ) J_ν(rρ) dρ` for a non-oscillatory `f`.
///
/// Geometric panels below `knee`, uniform panels that resolve the Bessel
/// oscillation up to a point where the asymptotic regime holds, then
/// half-period intervals aligned with the asymptotic zeros of `J_ν`, whose
/// partial sums are accelerated with Wynn's epsilon algorithm.
/// `origin(eps)` may supply `∫_0^eps` analytically.
pub fn hankel_integral<F, O>(f: F, nu: f64, r: f64, layout: HankelLayout, origin: Option<O>) -> f64
where
    F: Fn(f64) -> f64,
    O: Fn(f64) -> f64,
{
    let g = |rho: f64| f(rho) * bessel_j(nu, r * rho);
    let max_width = (4.0 / r).min(0.5 * layout.knee);
    let mut total = 0.0;
    let mut a = layout.lo;
    if a == 0.0 {
        let eps = layout.eps.min(layout.knee);
        total += match &origin {
            Some(o) => o(eps),
            None => gl_panel(&g, 0.0, eps),
        };
        a = eps;
    }
    // Geometric panels up to the knee.
    while a < layout.knee.min(layout.hi) {
        let width = a.min(max_width);
        let b = (a + width).min(layout.knee).min(layout.hi);
        total += gl_panel(&g, a, b);
        a = b;
    }
    if a >= layout.hi {
        return total;
    }
    // Uniform panels until the Bessel asymptotic regime.
    let head_end = (4.0 * layout.knee).max(a).max(30.0 / r);
    let head_end = if layout.hi.is_finite() {
        head_end.min(layout.hi)
    } else {
        // align with an asymptotic zero of J_ν(rρ)
        let phase0 = (0.5 * nu + 0.75) * PI;
        let k = ((r * head_end - phase0) / PI).ceil().max(0.0);
        (phase0 + k * PI) / r
    };
    while a < head_end {
        let width = (4.0 / r).min((0.5 * layout.knee).max(0.25 * a));
        let b = (a + width).min(head_end);
        total += gl_panel(&g, a, b);
        a = b;
    }
    if let (Some(end), false) = (layout.plain_tail, layout.hi.is_finite()) {
        let step = PI / r;
        let mut last = 0.0;
        while a < end {
            last = gl_panel(&g, a, a + step);
            total += last;
            a += step;
        }
        // midpoint of the last two partial sums
        total -= 0.5 * last;
    } else if !layout.hi.is_finite() {
        let step = PI / r;
        let mut partial = Vec::with_capacity(80);
        let mut acc = 0.0;
        let mut scale = 0.0f64;
        for k in 0..80 {
            let lo = a + k as f64 * step;
            let v = gl_panel(&g, lo, lo + step);
            scale = scale.max(v.abs());
            acc += v;
            partial.push(acc);
            if k >= 12 && k % 4 == 0 {
                let (_, err) = wynn_epsilon(&partial);
                if err < 1e-15 * scale.max(total.abs()) {
                    break;
                }
            }
        }
        let (limit, _) = wynn_epsilon(&partial);
        total += limit;
    } else {
        while a < layout.hi {
            let b = (a + max_width).min(layout.hi);
            total += gl_panel(&g, a, b);
            a = b;
        }
    }
    total
}
