//! The critical equation `-Δu + (-Δ)^s u = λ h u^p + u^{2*-1}`: right-hand
//! side, fixed-point iterations on `u = Z ∗ f`, residuals and the energy
//! norms.

mod norms;
mod problems;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::operators::{drop_zero_mode, solve_linear_with_report};
use crate::params::Params;
use crate::qualitative::{
    decay_slope, holder_seminorm, positivity_check, symmetry_deviation, DecayFit, QualReport,
    Region,
};
use crate::symbols::symbol_m;

pub use norms::{
    gagliardo_double_sum, gagliardo_seminorm, plancherel_constant, weak_residual, x12_norm,
    X12Norm, NORM_TAIL_THRESHOLD,
};
use problems::{combine, scale_field};
pub use problems::{manufactured_problem, HProfile, Manufactured};

/// Below this sup-norm a solution counts as trivial.
pub const TRIVIAL_THRESHOLD: f64 = 1e-10;

/// Iterations without a new best residual before the run is abandoned.
pub const STALL_WINDOW: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `u ← S^γ A^{-1} N(u)` with `S = ⟨u,u⟩/⟨u,A^{-1}N(u)⟩`; for `p = 1`
    /// the term `λh` moves into `A = L - λh`, otherwise `A = L`.
    #[default]
    Normalized,
    /// `u ← Z ∗ (λ h u^p + u^{2*-1})`.
    Picard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Init {
    /// `Z ∗ χ_{B_{1/2}}` scaled to unit maximum.
    Barrier,
    Gaussian {
        width: f64,
    },
    Zero,
    Provided {
        values: Vec<f64>,
    },
}

impl Default for Init {
    fn default() -> Self {
        Init::Barrier
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub init: Init,
    pub positivity_projection: bool,
    pub scheme: Scheme,
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            damping: 1.0,
            tol: 1e-8,
            max_iter: 500,
            init: Init::Barrier,
            positivity_projection: true,
            scheme: Scheme::Normalized,
            seed: 0,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping {} outside (0,1]",
                self.damping
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tol {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    /// `converged`, `trivial`, `stalled` or `max-iter`.
    pub stop_reason: String,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    pub trivial_solution: bool,
    pub regime: String,
    pub qualitative: QualReport,
}

/// `u^e`, defined for negative `u` only at integer `e`.
pub(crate) fn power(u: f64, e: f64) -> f64 {
    if e == 1.0 {
        u
    } else if e.fract() == 0.0 && e.abs() < 64.0 {
        u.powi(e as i32)
    } else {
        u.powf(e)
    }
}

/// `λ h u^p + u^{2*-1}` pointwise.
pub fn assemble_rhs(u: &Field, h: &Field, params: &Params) -> Result<Field> {
    let q = params.critical_power().ok_or(Error::DimensionOutOfRange(
        params.n,
        "the critical power needs n >= 3",
    ))?;
    if h.values().len() != u.values().len() {
        return Err(Error::ShapeMismatch {
            expected: u.values().len(),
            got: h.values().len(),
        });
    }
    let integral_exponents = params.p.fract() == 0.0 && q.fract() == 0.0;
    if !integral_exponents {
        if let Some((index, value)) = u.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeBaseNonIntegerPower {
                index,
                value: *value,
            });
        }
    }
    u.zip_with(h, |u, h| {
        params.lambda * h * power(u, params.p) + power(u, q)
    })
}

fn project(u: Field) -> Field {
    if u.min() >= 0.0 {
        u
    } else {
        u.map(|v| v.max(0.0))
    }
}

/// `(1-θ) u + θ Z ∗ rhs(u)`, optionally projected onto `u >= 0`.
pub fn picard_step(u: &Field, h: &Field, params: &Params, config: &SolveConfig) -> Result<Field> {
    let rhs = assemble_rhs(u, h, params)?;
    let (next, _) = solve_linear_with_report(&rhs, params.s)?;
    let mixed = combine(1.0 - config.damping, u, config.damping, &next);
    Ok(if config.positivity_projection {
        project(mixed)
    } else {
        mixed
    })
}

/// `(L - λh)^{-1} f` by the fixed point `v ← Z ∗ (f + λ h v)` from `guess`.
fn shifted_inverse(f: &Field, h: &Field, params: &Params, guess: &Field) -> Result<Field> {
    let mut v = guess.clone();
    let mut last = f64::INFINITY;
    for k in 0..2000 {
        let forced = f.zip_with(&v.zip_with(h, |v, h| params.lambda * h * v)?, |a, b| a + b)?;
        let (next, _) = solve_linear_with_report(&forced, params.s)?;
        let change = next.zip_with(&v, |a, b| a - b)?.sup_norm();
        v = next;
        let scale = v.sup_norm().max(f64::MIN_POSITIVE);
        if change <= 1e-14 * scale {
            return Ok(v);
        }
        if k > 50 && change > 0.999 * last {
            if change <= 1e-11 * scale {
                return Ok(v);
            }
            return Err(Error::Divergence(k));
        }
        last = change;
    }
    Ok(v)
}

fn normalized_step(u: &Field, h: &Field, params: &Params, config: &SolveConfig) -> Result<Field> {
    let q = params.critical_power().unwrap_or(1.0);
    let gamma = q / (q - 1.0);
    let v = if params.p == 1.0 {
        let nonlinear = u.map(|x| power(x, q));
        shifted_inverse(&nonlinear, h, params, u)?
    } else {
        let rhs = assemble_rhs(u, h, params)?;
        solve_linear_with_report(&rhs, params.s)?.0
    };
    let denom = u.inner(&v);
    if !(denom > 0.0) {
        return Err(Error::Divergence(0));
    }
    let stabilizer = (u.inner(u) / denom).powf(gamma);
    let next = scale_field(&v, stabilizer);
    let mixed = combine(1.0 - config.damping, u, config.damping, &next);
    Ok(if config.positivity_projection {
        project(mixed)
    } else {
        mixed
    })
}

/// `sup |Lu - rhs(u)| / max(1, sup |rhs(u)|)` with `L` applied spectrally;
/// on periodic grids the zero mode of `rhs(u)` is left out.
pub fn residual(u: &Field, h: &Field, params: &Params) -> Result<f64> {
    let mut rhs = assemble_rhs(u, h, params)?;
    if u.grid().zero_mode().is_some() {
        let mut forced = rhs.spectrum()?.clone();
        drop_zero_mode(&mut forced);
        rhs = Field::from_spectrum(forced)?;
    }
    let mut spectrum = u.spectrum()?.clone();
    spectrum.scale_by(|k| symbol_m(k, params.s));
    let lu = crate::grid::inverse_transform(&spectrum, u.grid())?;
    let defect = lu.zip_with(&rhs, |a, b| a - b)?.sup_norm();
    Ok(defect / rhs.sup_norm().max(1.0))
}

/// Principal eigenvalue of `L φ = λ h φ` with positive eigenfunction,
/// by power iteration on `φ ← Z ∗ (h φ)`.
pub fn principal_eigenvalue(h: &Field, s: f64, tol: f64, max_iter: usize) -> Result<(f64, Field)> {
    let mut phi = h.map(|v| v.max(0.0));
    let mut mu = 0.0;
    for k in 0..max_iter {
        let (next, _) = solve_linear_with_report(&h.zip_with(&phi, |a, b| a * b)?, s)?;
        let weighted = h.zip_with(&phi, |a, b| a * b)?;
        let ratio = next.inner(&weighted) / phi.inner(&weighted);
        let peak = next.sup_norm();
        if !(peak > 0.0) || !ratio.is_finite() {
            return Err(Error::Divergence(k));
        }
        phi = scale_field(&next, 1.0 / peak);
        if (ratio - mu).abs() <= tol * ratio {
            return Ok((1.0 / ratio, phi));
        }
        mu = ratio;
    }
    Err(Error::Divergence(max_iter))
}

pub fn initial_guess(grid: &Grid, params: &Params, init: &Init) -> Result<Field> {
    match init {
        Init::Zero => Ok(Field::zeros(grid)),
        Init::Gaussian { width } => Ok(Field::radial(grid, |r| {
            (-0.5 * r * r / (width * width)).exp()
        })),
        Init::Provided { values } => Field::new(grid, values.clone()),
        Init::Barrier => {
            let ball = Field::radial(grid, |r| if r <= 0.5 { 1.0 } else { 0.0 });
            let (omega, _) = solve_linear_with_report(&ball, params.s)?;
            let peak = omega.max();
            if !(peak > 0.0) {
                return Err(Error::FlatField);
            }
            Ok(scale_field(&omega, 1.0 / peak))
        }
    }
}

/// Default fit window for the tail slope: from `2` to the trusted radius.
fn default_window(grid: &Grid) -> [f64; 2] {
    match grid {
        Grid::Radial(g) => [2.0, 0.5 * g.spec.r_max],
        Grid::Cartesian(g) => [2.0, 0.5 * g.spec.half_length],
    }
}

pub fn qualitative_report(u: &Field, params: &Params, seed: u64) -> QualReport {
    let n = u.grid().n();
    let center = vec![0.0; n];
    let decay: Option<DecayFit> =
        decay_slope(u, &center, default_window(u.grid()), params.s, 0.5).ok();
    let (symmetry_center, symmetry_deviation) = match symmetry_deviation(u) {
        Ok(r) => (r.center, r.deviation),
        Err(_) => (center, f64::NAN),
    };
    let holder = [0.5, 1.0]
        .iter()
        .filter_map(|&a| holder_seminorm(u, a, Region::Ball { radius: 1.0 }, seed).ok())
        .collect();
    QualReport {
        decay,
        symmetry_center,
        symmetry_deviation,
        positivity_margin: positivity_check(u),
        holder,
    }
}

fn regime(params: &Params) -> String {
    if params.in_theorem_regime() {
        "theorem".into()
    } else if params.is_extended() {
        "extended-sublinear".into()
    } else {
        "outside-theorem".into()
    }
}

/// Iterate from `config.init` until the residual drops below `config.tol`.
pub fn solve_nonlinear(
    h: &Field,
    params: &Params,
    config: &SolveConfig,
) -> Result<(Field, SolveReport)> {
    let u0 = initial_guess(h.grid(), params, &config.init)?;
    solve_from(u0, h, params, config)
}

pub fn solve_from(
    u0: Field,
    h: &Field,
    params: &Params,
    config: &SolveConfig,
) -> Result<(Field, SolveReport)> {
    params.validate()?;
    config.validate()?;
    if h.min() < 0.0 || h.max() <= 0.0 {
        return Err(Error::InvalidParameter("h must be positive".into()));
    }
    if params.critical_power().is_none() {
        return Err(Error::DimensionOutOfRange(
            params.n,
            "the critical power needs n >= 3",
        ));
    }
    let regime = regime(params);
    if regime != "theorem" {
        log::warn!("parameters outside the theorem regime: {regime}");
    }
    let mut config = config.clone();
    if params.is_extended() && !config.positivity_projection {
        log::warn!("positivity projection forced on for p < 1");
        config.positivity_projection = true;
    }
    let mut u = u0;
    let mut history = Vec::new();
    let finish =
        |u: Field, converged: bool, reason: &str, final_residual: f64, history: Vec<f64>| {
            let trivial = u.sup_norm() < TRIVIAL_THRESHOLD;
            let report = SolveReport {
                converged,
                stop_reason: reason.into(),
                iterations: history.len().saturating_sub(1),
                final_residual,
                residual_history: history,
                trivial_solution: trivial,
                regime: regime.clone(),
                qualitative: qualitative_report(&u, params, config.seed),
            };
            (u, report)
        };
    let mut best: Option<(f64, Field)> = None;
    let mut best_at = 0;
    let mut reason = "max-iter";
    for k in 0..=config.max_iter {
        if u.sup_norm() < TRIVIAL_THRESHOLD {
            history.push(0.0);
            return Ok(finish(u, true, "trivial", 0.0, history));
        }
        let r = residual(&u, h, params)?;
        if !r.is_finite() {
            return Err(Error::Divergence(k));
        }
        history.push(r);
        log::debug!("iteration {k}: residual {r:e}");
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            best = Some((r, u.clone()));
            best_at = k;
        }
        if r <= config.tol {
            return Ok(finish(u, true, "converged", r, history));
        }
        if k - best_at >= STALL_WINDOW {
            reason = "stalled";
            break;
        }
        if k >= 20 && r > 10.0 * history[k - 20] {
            return Err(Error::Divergence(k));
        }
        if k == config.max_iter {
            break;
        }
        u = match config.scheme {
            Scheme::Picard => picard_step(&u, h, params, &config)?,
            Scheme::Normalized => normalized_step(&u, h, params, &config)?,
        };
    }
    let (r, best) = best.expect("at least one iterate");
    Ok(finish(best, false, reason, r, history))
}
