//! Problem parameters for `-Δu + (-Δ)^s u = λ h u^p + u^(2*-1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension, fractional order, subcritical power and coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub s: f64,
    pub p: f64,
    pub lambda: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n: 4,
            s: 0.5,
            p: 1.0,
            lambda: 0.05,
        }
    }
}

impl Params {
    pub fn new(n: usize, s: f64, p: f64, lambda: f64) -> Result<Self> {
        let params = Params { n, s, p, lambda };
        params.validate()?;
        Ok(params)
    }

    /// Parameters sufficient for kernel computations only (`p = 1`, `λ = 1`
    /// are placeholders that never enter a kernel formula).
    pub fn kernel(n: usize, s: f64) -> Result<Self> {
        check_dim_order(n, s)?;
        Ok(Params {
            n,
            s,
            p: 1.0,
            lambda: 1.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        check_dim_order(self.n, self.s)?;
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda = {} must be positive",
                self.lambda
            )));
        }
        if !(self.p > 0.0) || !self.p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "p = {} must be positive",
                self.p
            )));
        }
        if let Some(q) = self.critical_power() {
            if self.p >= q {
                return Err(Error::InvalidParameter(format!(
                    "p = {} must be below 2*-1 = {}",
                    self.p, q
                )));
            }
        }
        Ok(())
    }

    /// `2* = 2n/(n-2)`, defined for `n >= 3`.
    pub fn two_star(&self) -> Option<f64> {
        two_star(self.n)
    }

    /// The critical power `2* - 1`.
    pub fn critical_power(&self) -> Option<f64> {
        self.two_star().map(|t| t - 1.0)
    }

    /// `n >= 4` and `1 <= p < 2*-1`: the regime covered by the existence,
    /// decay and symmetry results.
    pub fn in_theorem_regime(&self) -> bool {
        self.n >= 4 && self.p >= 1.0
    }

    /// `0 < p < 1`: the iteration still runs but positivity projection is
    /// mandatory.
    pub fn is_extended(&self) -> bool {
        self.p < 1.0
    }
}

pub fn two_star(n: usize) -> Option<f64> {
    (n >= 3).then(|| 2.0 * n as f64 / (n as f64 - 2.0))
}

fn check_dim_order(n: usize, s: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::DimensionOutOfRange(n, "n >= 2 required"));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!("s = {s} out of (0,1)")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_exponent() {
        assert_eq!(two_star(4), Some(4.0));
        assert_eq!(two_star(3), Some(6.0));
        assert_eq!(two_star(2), None);
        assert_eq!(Params::default().critical_power(), Some(3.0));
    }

    #[test]
    fn rejects_supercritical_p() {
        let err = Params::new(4, 0.5, 5.0, 0.05).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
        assert!(Params::new(4, 0.5, 2.99, 0.05).is_ok());
    }

    #[test]
    fn rejects_bad_order_and_dimension() {
        assert!(Params::new(4, 1.2, 1.0, 0.05).is_err());
        assert!(Params::new(4, 0.0, 1.0, 0.05).is_err());
        assert!(matches!(
            Params::kernel(1, 0.5),
            Err(Error::DimensionOutOfRange(1, _))
        ));
    }

    #[test]
    fn extended_mode_flag() {
        let p = Params::new(4, 0.5, 0.5, 0.05).unwrap();
        assert!(p.is_extended());
        assert!(!p.in_theorem_regime());
    }
}
