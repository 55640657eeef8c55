//! Material parameters of the superconductor/normal-metal pair.

use crate::error::{Error, Result};

/// The pair `(a, m)`: normal-material coupling and conductivity ratio.
///
/// `a > 0` is a characteristic of the normal material (its sign encodes that
/// the temperature is above the normal material's critical temperature);
/// `m > 0` is the conductivity ratio of the superconducting and normal
/// materials. The kinetic weight is `1` in the superconductor and `1/m`
/// in the normal region; the quadratic potential is `-1` inside, `+a`
/// outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    a: f64,
    m: f64,
}

impl Material {
    pub fn new(a: f64, m: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidParameter(format!("m must be positive, got {m}")));
        }
        Ok(Material { a, m })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Kinetic weight `w̃(τ)`: 1 on the superconductor side (τ > 0),
    /// 1/m on the normal side (τ < 0). The interface value is the
    /// cell average used by the flux-form discretization.
    #[inline]
    pub fn weight_1d(&self, tau: f64) -> f64 {
        if tau > 0.0 {
            1.0
        } else if tau < 0.0 {
            1.0 / self.m
        } else {
            0.5 * (1.0 + 1.0 / self.m)
        }
    }

    /// Potential sign `Ṽ_a(τ)`: -1 for τ > 0, +a for τ < 0, cell average at 0.
    #[inline]
    pub fn potential_1d(&self, tau: f64) -> f64 {
        if tau > 0.0 {
            -1.0
        } else if tau < 0.0 {
            self.a
        } else {
            0.5 * (self.a - 1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(Material::new(0.0, 1.0).is_err());
        assert!(Material::new(1.0, -2.0).is_err());
        assert!(Material::new(f64::NAN, 1.0).is_err());
        assert!(Material::new(1.0, 2.0).is_ok());
    }

    #[test]
    fn weights_match_sides() {
        let mat = Material::new(1.0, 4.0).unwrap();
        assert_eq!(mat.weight_1d(0.5), 1.0);
        assert_eq!(mat.weight_1d(-0.5), 0.25);
        assert_eq!(mat.weight_1d(0.0), 0.625);
        assert_eq!(mat.potential_1d(1.0), -1.0);
        assert_eq!(mat.potential_1d(-1.0), 1.0);
    }
}
