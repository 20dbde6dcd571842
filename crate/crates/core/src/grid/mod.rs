//! Discretisations of `ℝⁿ` and the transforms between physical and
//! spectral samples.
//!
//! Fourier convention: `F[u](ξ) = ∫ u(x) e^{-i x·ξ} dx`, so `-Δ` has symbol
//! `|ξ|²` and the inverse carries `(2π)^{-n}`.

mod cartesian;
mod radial;

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cartesian::{CartesianGrid, CartesianSpec};
pub use radial::{RadialGrid, RadialSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GridSpec {
    Radial(RadialSpec),
    Cartesian(CartesianSpec),
}

#[derive(Debug, Clone)]
pub enum Grid {
    Radial(Arc<RadialGrid>),
    Cartesian(Arc<CartesianGrid>),
}

pub fn make_grid(spec: &GridSpec) -> Result<Grid> {
    Ok(match spec {
        GridSpec::Radial(s) => Grid::Radial(Arc::new(RadialGrid::new(*s)?)),
        GridSpec::Cartesian(s) => {
            if s.n < 2 {
                return Err(Error::DimensionOutOfRange(s.n, "n >= 2 required"));
            }
            Grid::Cartesian(Arc::new(CartesianGrid::new(*s)?))
        }
    })
}

impl Grid {
    pub fn spec(&self) -> GridSpec {
        match self {
            Grid::Radial(g) => GridSpec::Radial(g.spec),
            Grid::Cartesian(g) => GridSpec::Cartesian(g.spec),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Grid::Radial(g) => g.n(),
            Grid::Cartesian(g) => g.n(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Radial(g) => g.len(),
            Grid::Cartesian(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spectral_len(&self) -> usize {
        match self {
            Grid::Radial(g) => g.rho.len(),
            Grid::Cartesian(g) => g.len(),
        }
    }

    /// `|ξ|` at every spectral sample.
    pub fn spectral_norms(&self) -> Vec<f64> {
        match self {
            Grid::Radial(g) => g.rho.clone(),
            Grid::Cartesian(g) => g.wave_norms(),
        }
    }

    /// Index of the zero mode, if the spectral grid has one.
    pub fn zero_mode(&self) -> Option<usize> {
        match self {
            Grid::Radial(_) => None,
            Grid::Cartesian(_) => Some(0),
        }
    }

    /// Distance of every node from the origin.
    pub fn radii(&self) -> Vec<f64> {
        match self {
            Grid::Radial(g) => g.r.clone(),
            Grid::Cartesian(g) => (0..g.len())
                .map(|i| {
                    let x = g.position(i);
                    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
                })
                .collect(),
        }
    }

    /// `∫ u dx` over the discretised region.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        match self {
            Grid::Radial(g) => g.integrate(values),
            Grid::Cartesian(g) => g.cell_volume() * values.iter().sum::<f64>(),
        }
    }

    /// `(2π)^{-n} ∫ c(ξ) dξ` over the spectral samples.
    pub fn integrate_spectral(&self, values: &[f64]) -> f64 {
        match self {
            Grid::Radial(g) => g.integrate_spectral(values),
            Grid::Cartesian(g) => {
                values.iter().sum::<f64>() / (2.0 * g.spec.half_length).powi(g.n() as i32)
            }
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        match (self, other) {
            (Grid::Radial(a), Grid::Radial(b)) => Arc::ptr_eq(a, b) || a.spec == b.spec,
            (Grid::Cartesian(a), Grid::Cartesian(b)) => Arc::ptr_eq(a, b) || a.spec == b.spec,
            _ => false,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Grid::Radial(_) => "radial",
            Grid::Cartesian(_) => "cartesian",
        }
    }

    pub fn as_radial(&self) -> Result<&Arc<RadialGrid>> {
        match self {
            Grid::Radial(g) => Ok(g),
            Grid::Cartesian(_) => Err(Error::UnsupportedGrid("radial grid required")),
        }
    }

    pub fn as_cartesian(&self) -> Result<&Arc<CartesianGrid>> {
        match self {
            Grid::Cartesian(g) => Ok(g),
            Grid::Radial(_) => Err(Error::UnsupportedGrid("cartesian grid required")),
        }
    }
}

/// Spectral samples on a grid. Radial spectra are real and stored with a
/// zero imaginary part.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub grid: Grid,
    pub coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: &Grid) -> Self {
        Spectrum {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.spectral_len()],
        }
    }

    /// Multiply every coefficient by a radial symbol of `|ξ|`.
    pub fn scale_by<F: Fn(f64) -> f64>(&mut self, symbol: F) {
        for (c, k) in self.coeffs.iter_mut().zip(self.grid.spectral_norms()) {
            *c *= symbol(k);
        }
    }

    /// `(2π)^{-n} ∫ |û|² dξ` weighted by `weight(|ξ|)`.
    pub fn weighted_energy<F: Fn(f64) -> f64>(&self, weight: F) -> f64 {
        let vals: Vec<f64> = self
            .coeffs
            .iter()
            .zip(self.grid.spectral_norms())
            .map(|(c, k)| c.norm_sqr() * weight(k))
            .collect();
        self.grid.integrate_spectral(&vals)
    }
}

/// Real samples on a grid, with a lazily computed spectrum.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
    cache: OnceLock<Spectrum>,
}

impl Field {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Field {
            grid: grid.clone(),
            values,
            cache: OnceLock::new(),
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Field {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
            cache: OnceLock::new(),
        }
    }

    /// Samples `f(|x|)`.
    pub fn radial<F: Fn(f64) -> f64>(grid: &Grid, f: F) -> Self {
        let values = grid.radii().into_iter().map(f).collect();
        Field {
            grid: grid.clone(),
            values,
            cache: OnceLock::new(),
        }
    }

    /// Samples `f(x)` on a cartesian grid.
    pub fn from_points<F: Fn(&[f64]) -> f64>(grid: &Grid, f: F) -> Result<Self> {
        let g = grid.as_cartesian()?;
        let n = g.n();
        let values = (0..g.len()).map(|i| f(&g.position(i)[..n])).collect();
        Field::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable samples; invalidates the cached spectrum.
    pub fn values_mut(&mut self) -> &mut [f64] {
        self.cache = OnceLock::new();
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            cache: OnceLock::new(),
        }
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Field, f: F) -> Result<Field> {
        if other.values.len() != self.values.len() {
            return Err(Error::ShapeMismatch {
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        Ok(Field {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            cache: OnceLock::new(),
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    /// `∫ u v dx`.
    pub fn inner(&self, other: &Field) -> f64 {
        let prod: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        self.grid.integrate(&prod)
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Cached forward transform.
    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.cache.get() {
            return Ok(s);
        }
        let s = forward_transform(self)?;
        Ok(self.cache.get_or_init(|| s))
    }

    /// Synthesise a field from spectral data and keep that data as its
    /// spectrum, so spectral operators compose without a round trip.
    pub fn from_spectrum(spectrum: Spectrum) -> Result<Field> {
        let grid = spectrum.grid.clone();
        let field = inverse_transform(&spectrum, &grid)?;
        let _ = field.cache.set(spectrum);
        Ok(field)
    }

    /// Field with values and spectrum supplied together; the caller
    /// guarantees they describe the same function.
    pub fn with_spectrum(values: Vec<f64>, spectrum: Spectrum) -> Field {
        let field = Field {
            grid: spectrum.grid.clone(),
            values,
            cache: OnceLock::new(),
        };
        let _ = field.cache.set(spectrum);
        field
    }

    pub fn spectrum_is_cached(&self) -> bool {
        self.cache.get().is_some()
    }
}

pub fn forward_transform(field: &Field) -> Result<Spectrum> {
    if let Some(i) = field.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput(i));
    }
    let coeffs = match &field.grid {
        Grid::Radial(g) => g
            .forward(&field.values)
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect(),
        Grid::Cartesian(g) => g.forward(&field.values),
    };
    Ok(Spectrum {
        grid: field.grid.clone(),
        coeffs,
    })
}

pub fn inverse_transform(spectrum: &Spectrum, grid: &Grid) -> Result<Field> {
    if spectrum.coeffs.len() != grid.spectral_len() || !spectrum.grid.same_as(grid) {
        return Err(Error::ShapeMismatch {
            expected: grid.spectral_len(),
            got: spectrum.coeffs.len(),
        });
    }
    let values = match grid {
        Grid::Radial(g) => {
            let re: Vec<f64> = spectrum.coeffs.iter().map(|c| c.re).collect();
            g.inverse(&re)
        }
        Grid::Cartesian(g) => g.inverse(&spectrum.coeffs),
    };
    Field::new(grid, values)
}
