use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::operators::solve_linear_with_report;
use crate::params::Params;

use super::power;

/// Built-in weights `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HProfile {
    /// `A (1 + |x|²)^{-q}` with `q > n/2`.
    Algebraic { amplitude: f64, q: f64 },
    /// Gaussian of unit mass and standard deviation `width`.
    Gaussian { width: f64 },
}

impl Default for HProfile {
    fn default() -> Self {
        HProfile::Gaussian { width: 1.0 }
    }
}

impl HProfile {
    pub fn eval(&self, n: usize, r: f64) -> f64 {
        match *self {
            HProfile::Algebraic { amplitude, q } => amplitude * (1.0 + r * r).powf(-q),
            HProfile::Gaussian { width } => {
                (2.0 * PI * width * width).powf(-0.5 * n as f64)
                    * (-0.5 * r * r / (width * width)).exp()
            }
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            HProfile::Algebraic { amplitude, q } if !(amplitude > 0.0 && q > 0.5 * n as f64) => {
                Err(Error::InvalidParameter(format!(
                    "algebraic h needs amplitude > 0 and q > n/2, got {amplitude}, {q}"
                )))
            }
            HProfile::Gaussian { width } if !(width > 0.0) => Err(Error::InvalidParameter(
                format!("gaussian h needs width > 0, got {width}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<Field> {
        self.validate(grid.n())?;
        Ok(Field::radial(grid, |r| self.eval(grid.n(), r)))
    }
}

/// A problem with known solution: `L u* = g` and
/// `h* = (g - u*^{2*-1}) / (λ u*^p)`, so `u*` solves the equation with
/// weight `h*`.
#[derive(Debug, Clone)]
pub struct Manufactured {
    pub u_star: Field,
    pub h_star: Field,
    pub source: Field,
    pub amplitude: f64,
}

/// Manufactured problem built from `g = a (1 + |x|²)^{-4}`; the amplitude
/// `a` is half the largest value keeping `h*` positive.
pub fn manufactured_problem(grid: &Grid, params: &Params) -> Result<Manufactured> {
    let q = params.critical_power().ok_or(Error::DimensionOutOfRange(
        params.n,
        "the critical power needs n >= 3",
    ))?;
    let base = Field::radial(grid, |r| (1.0 + r * r).powi(-4));
    let (shape, _) = solve_linear_with_report(&base, params.s)?;
    if shape.min() <= 0.0 {
        return Err(Error::NonpositiveValues {
            r: f64::NAN,
            value: shape.min(),
        });
    }
    // h* > 0  ⇔  a^{q-1} < g₁ / U^q at every node
    let bound = base
        .values()
        .iter()
        .zip(shape.values())
        .map(|(g, u)| g / u.powf(q))
        .fold(f64::INFINITY, f64::min);
    let amplitude = (0.5 * bound).powf(1.0 / (q - 1.0));
    let source = base.map(|v| amplitude * v);
    let u_star = scale_field(&shape, amplitude);
    let h_values = source
        .values()
        .iter()
        .zip(u_star.values())
        .map(|(g, u)| (g - power(*u, q)) / (params.lambda * power(*u, params.p)))
        .collect();
    let h_star = Field::new(grid, h_values)?;
    Ok(Manufactured {
        u_star,
        h_star,
        source,
        amplitude,
    })
}

/// `c u`, carrying over a cached spectrum.
pub(crate) fn scale_field(u: &Field, c: f64) -> Field {
    combine(c, u, 0.0, u)
}

/// `a u + b v`; the spectrum is carried over when both inputs have one.
pub(crate) fn combine(a: f64, u: &Field, b: f64, v: &Field) -> Field {
    if u.spectrum_is_cached() && v.spectrum_is_cached() {
        let (su, sv) = (u.spectrum().unwrap(), v.spectrum().unwrap());
        let mut spec = su.clone();
        for (c, d) in spec.coeffs.iter_mut().zip(&sv.coeffs) {
            *c = *c * a + *d * b;
        }
        let values = u
            .values()
            .iter()
            .zip(v.values())
            .map(|(x, y)| a * x + b * y)
            .collect();
        return Field::with_spectrum(values, spec);
    }
    u.zip_with(v, |x, y| a * x + b * y)
        .expect("fields share a grid")
}
