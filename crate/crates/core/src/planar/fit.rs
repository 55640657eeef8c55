//! Disc eigenvalue expansion fit: over a B range, the residual
//! μ₁(B) - βB - C₁√B should track C₂(Δ_B² + C₀) with Δ_B the distance of
//! the angular-mode ladder to its optimal fractional position.

use crate::constants::ModelConstants;
use crate::error::Result;
use crate::geometry::Geometry;
use crate::material::Material;

use super::fourier::{mu1_disc_fourier, FourierOptions};

/// Fit report of the disc expansion experiment.
#[derive(Debug, Clone)]
pub struct ExpansionFit {
    pub b_values: Vec<f64>,
    pub mu_values: Vec<f64>,
    pub winning_modes: Vec<i64>,
    /// μ₁ - βB - C₁√B per point.
    pub residuals: Vec<f64>,
    /// Δ_B² per point.
    pub delta_b_sq: Vec<f64>,
    /// Least-squares slope of residual against Δ_B² (should approximate C₂).
    pub slope: f64,
    /// Fit offset (should approximate C₂·C₀).
    pub offset: f64,
    /// Pearson correlation of residual with Δ_B².
    pub correlation: f64,
    /// √B coefficient fitted from μ₁ - βB (sign convention check).
    pub sqrt_coeff_fitted: f64,
    /// "plus_C1" when the fitted √B term carries the sign of C₁ itself.
    pub sign_observed: String,
    pub c2_reference: f64,
    pub c2c0_reference: f64,
    pub max_abs_residual: f64,
    /// Mean |residual| over the top B quartile minus the bottom quartile
    /// (boundedness indicator; no growth in B expected).
    pub residual_drift: f64,
}

/// Run the expansion experiment over `n_points` B values in `[b_lo, b_hi]`
/// at the constants' α.
pub fn disc_expansion_fit(
    geometry: &Geometry,
    material: Material,
    constants: &ModelConstants,
    b_lo: f64,
    b_hi: f64,
    n_points: usize,
    opts: FourierOptions,
) -> Result<ExpansionFit> {
    let alpha = constants.alpha;
    let mut b_values = Vec::with_capacity(n_points);
    let mut mu_values = Vec::with_capacity(n_points);
    let mut winning_modes = Vec::with_capacity(n_points);
    let mut residuals = Vec::with_capacity(n_points);
    let mut delta_b_sq = Vec::with_capacity(n_points);

    for k in 0..n_points {
        let b = b_lo + (b_hi - b_lo) * k as f64 / (n_points as f64 - 1.0);
        let eig = mu1_disc_fourier(geometry, material, b, alpha, opts)?;
        let res = eig.mu1 - constants.beta * b - constants.c1 * b.sqrt();
        // Δ_B = distance of B/2 + ξ*√B + δ₀ to the nearest integer
        let frac = 0.5 * b + constants.xi_star * b.sqrt() + constants.delta0;
        let delta_b = (frac - frac.round()).abs();
        b_values.push(b);
        mu_values.push(eig.mu1);
        winning_modes.push(eig.winning_mode.unwrap_or(0));
        residuals.push(res);
        delta_b_sq.push(delta_b * delta_b);
    }

    let (slope, offset) = linear_fit(&delta_b_sq, &residuals);
    let correlation = pearson(&delta_b_sq, &residuals);

    // sign of the √B term: fit mu - βB against √B with intercept
    let xs: Vec<f64> = b_values.iter().map(|b| b.sqrt()).collect();
    let ys: Vec<f64> = b_values
        .iter()
        .zip(mu_values.iter())
        .map(|(b, mu)| mu - constants.beta * b)
        .collect();
    let (sqrt_coeff_fitted, _) = linear_fit(&xs, &ys);
    let sign_observed = if sqrt_coeff_fitted.signum() == constants.c1.signum() {
        "plus_C1".to_string()
    } else {
        "minus_C1".to_string()
    };

    let max_abs_residual = residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let quartile = residuals.len() / 4;
    let head: f64 =
        residuals[..quartile.max(1)].iter().map(|r| r.abs()).sum::<f64>() / quartile.max(1) as f64;
    let tail: f64 = residuals[residuals.len() - quartile.max(1)..]
        .iter()
        .map(|r| r.abs())
        .sum::<f64>()
        / quartile.max(1) as f64;

    Ok(ExpansionFit {
        b_values,
        mu_values,
        winning_modes,
        residuals,
        delta_b_sq,
        slope,
        offset,
        correlation,
        sqrt_coeff_fitted,
        sign_observed,
        c2_reference: constants.c2,
        c2c0_reference: constants.c2 * constants.c0,
        max_abs_residual,
        residual_drift: tail - head,
    })
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys.iter()).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    (slope, (sy - slope * sx) / n)
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_fit_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (s, o) = linear_fit(&xs, &ys);
        assert!((s - 2.0).abs() < 1e-12 && (o - 1.0).abs() < 1e-12);
        assert!((pearson(&xs, &ys) - 1.0).abs() < 1e-12);
    }
}
