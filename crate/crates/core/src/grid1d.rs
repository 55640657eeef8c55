//! Uniform 1D grids with the material interface pinned to a node.

use crate::error::{Error, Result};

/// Uniform grid on `[lo, hi]` with `n` cells (`n + 1` nodes).
///
/// The interface τ = 0 must coincide with a grid node so the flux-form
/// discretization can place the weight jump exactly on the faces adjacent
/// to it. `lo < 0 < hi` for the full-line model; `lo = 0` is the half-line
/// variant used by the Neumann reference problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidGrid(format!("need lo < hi, got [{lo}, {hi}]")));
        }
        if n < 16 {
            return Err(Error::InvalidGrid(format!("need n >= 16 cells, got {n}")));
        }
        if lo > 0.0 || hi <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "interface 0 must lie in [lo, hi) = [{lo}, {hi})"
            )));
        }
        let h = (hi - lo) / n as f64;
        let k = -lo / h;
        if (k - k.round()).abs() > 1e-9 * (1.0 + k.abs()) {
            return Err(Error::InvalidGrid(format!(
                "interface 0 not on a node: lo/h = {} is not an integer",
                -k
            )));
        }
        Ok(Grid1D { lo, hi, n })
    }

    /// Half-line grid `[0, hi]`; node 0 carries the Neumann condition.
    pub fn half_line(hi: f64, n: usize) -> Result<Self> {
        if !(hi > 0.0) || !hi.is_finite() {
            return Err(Error::InvalidGrid(format!("need hi > 0, got {hi}")));
        }
        if n < 16 {
            return Err(Error::InvalidGrid(format!("need n >= 16 cells, got {n}")));
        }
        Ok(Grid1D { lo: 0.0, hi, n })
    }

    /// Default full-line grid: `[-12, 12]` with spacing `h = 0.0025`.
    ///
    /// The truncation is justified by the Gaussian-type decay of the
    /// eigenfunctions; its adequacy is an automated test, not an assumption.
    /// The spacing is chosen so the second-order eigenvalue error (h²/16 on
    /// the oscillator) stays below 1e-6.
    pub fn default_line() -> Self {
        Grid1D { lo: -12.0, hi: 12.0, n: 9600 }
    }

    /// Default half-line grid: `[0, 12]` with spacing `h = 0.0025`.
    pub fn default_half_line() -> Self {
        Grid1D { lo: 0.0, hi: 12.0, n: 4800 }
    }

    /// Same span, target spacing `h` (rounded to keep 0 on a node).
    pub fn with_spacing(lo: f64, hi: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("need h > 0, got {h}")));
        }
        let n_left = (-lo / h).round() as i64;
        let n_right = (hi / h).round() as i64;
        if n_left < 0 || n_right <= 0 {
            return Err(Error::InvalidGrid(format!("bad span [{lo}, {hi}] for spacing {h}")));
        }
        Grid1D::new(-(n_left as f64) * h, n_right as f64 * h, (n_left + n_right) as usize)
    }

    /// Grid with halved spacing over the same span.
    pub fn refined(&self) -> Grid1D {
        Grid1D { lo: self.lo, hi: self.hi, n: 2 * self.n }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Number of cells; there are `n + 1` nodes.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.spacing()
    }

    /// Index of the node sitting on the interface τ = 0.
    #[inline]
    pub fn interface_index(&self) -> usize {
        (-self.lo / self.spacing()).round() as usize
    }

    /// Trapezoid quadrature of a nodal function over the whole grid.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n + 1);
        let h = self.spacing();
        let mut s = 0.5 * (values[0] + values[self.n]);
        for v in &values[1..self.n] {
            s += v;
        }
        s * h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interface_must_sit_on_node() {
        assert!(Grid1D::new(-1.0, 1.0, 40).is_ok());
        // lo/h = -12.3: no node at zero
        assert!(Grid1D::new(-1.23, 0.77, 20).is_err());
        assert!(Grid1D::new(1.0, 2.0, 20).is_err());
        assert!(Grid1D::new(-1.0, 1.0, 4).is_err());
    }

    #[test]
    fn interface_index_is_exact() {
        let g = Grid1D::new(-12.0, 12.0, 2400).unwrap();
        let k = g.interface_index();
        assert_eq!(k, 1200);
        assert!(g.node(k).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let g = Grid1D::new(-2.0, 2.0, 64).unwrap();
        let vals: Vec<f64> = (0..=64).map(|i| 3.0 * g.node(i) + 1.0).collect();
        let q = g.trapezoid(&vals);
        assert!((q - 4.0).abs() < 1e-12, "got {q}");
    }

    #[test]
    fn with_spacing_snaps_to_node() {
        let g = Grid1D::with_spacing(-12.0, 12.0, 0.01).unwrap();
        assert_eq!(g.n(), 2400);
        assert!((g.spacing() - 0.01).abs() < 1e-12);
    }
}
