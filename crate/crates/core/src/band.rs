//! Band function analysis: ξ ↦ μ₁(a,m,α;ξ), its infimum β(a,m,α), the
//! minimizer ξ(a,m,α) with curvature, and the threshold α₀(a,m) at which
//! the band infimum vanishes.
//!
//! For m > 1 the threshold sits strictly between Θ₀ and 1 and is found by
//! bisection on α ↦ β(a,m,α); for m ≤ 1 the band infimum at α = 1 is
//! approached only as ξ → ∞, so α₀ = 1 is returned directly (with a
//! verification pass) rather than chasing an escaping minimizer.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::grid1d::Grid1D;
use crate::material::Material;
use crate::model1d::{self, golden_min};

/// ξ-scan specification: inclusive range with uniform step.
#[derive(Debug, Clone, Copy)]
pub struct ScanSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ScanSpec {
    /// Default scan [-2, 6] with step 0.05; band minima for the parameter
    /// ranges of interest lie well inside.
    pub fn default_xi() -> Self {
        ScanSpec { start: -2.0, stop: 6.0, step: 0.05 }
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step).round() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Sampled band function with refined global minimum.
#[derive(Debug, Clone)]
pub struct BandProfile {
    pub material: Material,
    pub alpha: f64,
    /// (ξ, μ₁) over the scan.
    pub samples: Vec<(f64, f64)>,
    pub xi_star: f64,
    pub mu_star: f64,
    /// Centered second derivative μ''(ξ*); NaN when the minimum sits on the
    /// scan edge.
    pub mu_second_deriv: f64,
    /// False when a second local minimum lies within 1e-6 of the global one
    /// (degenerate profile, allowed outside the 𝒫 regime) or when the
    /// minimum is not interior to the scan.
    pub minimizer_unique: bool,
}

/// Tolerance on the value gap below which two local minima are treated as
/// one degenerate global minimum.
const UNIQUENESS_GAP: f64 = 1e-6;

/// Sample μ₁ over the scan and refine every local minimum by golden section
/// (to 1e-8 in ξ); report the global minimizer, its value, curvature and a
/// uniqueness flag.
pub fn band_profile(
    material: Material,
    alpha: f64,
    scan: ScanSpec,
    grid: &Grid1D,
) -> Result<BandProfile> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let f = |xi: f64| model1d::mu1_xi(material, alpha, xi, grid);
    let xs = scan.points();
    if xs.len() < 3 {
        return Err(Error::InvalidParameter("scan needs at least 3 points".into()));
    }
    let mut samples = Vec::with_capacity(xs.len());
    for &xi in &xs {
        samples.push((xi, f(xi)?));
    }

    // refine interior local minima: golden section, then a secant polish on
    // the Feynman-Hellmann derivative (golden alone stalls at the eigenvalue
    // quantization width, ~1e-6 in ξ)
    let mut minima: Vec<(f64, f64)> = Vec::new();
    for i in 1..samples.len() - 1 {
        if samples[i].1 <= samples[i - 1].1 && samples[i].1 <= samples[i + 1].1 {
            let (xi0, _) = golden_min(&f, samples[i - 1].0, samples[i + 1].0, 1e-8)?;
            let xi = polish_minimizer(material, alpha, xi0, grid)?;
            let mu = f(xi)?;
            if !minima.iter().any(|&(x, _)| (x - xi).abs() < 1e-6) {
                minima.push((xi, mu));
            }
        }
    }

    let edge_min = {
        let first = samples.first().unwrap();
        let last = samples.last().unwrap();
        if first.1 < last.1 { *first } else { *last }
    };
    let interior_best = minima
        .iter()
        .cloned()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());

    let (xi_star, mu_star, at_edge) = match interior_best {
        Some((xi, mu)) if mu <= edge_min.1 => (xi, mu, false),
        _ => (edge_min.0, edge_min.1, true),
    };

    let mut minimizer_unique = !at_edge;
    if !at_edge {
        // another refined local minimum within the value gap → degenerate
        let close = minima
            .iter()
            .filter(|&&(x, v)| (x - xi_star).abs() > 1e-6 && v - mu_star < UNIQUENESS_GAP)
            .count();
        if close > 0 {
            minimizer_unique = false;
        }
        // the edge competing within the gap also flags degeneracy
        if edge_min.1 - mu_star < UNIQUENESS_GAP {
            minimizer_unique = false;
        }
    }

    let mu_second_deriv = if at_edge {
        f64::NAN
    } else {
        second_derivative(&f, xi_star)?
    };
    if minimizer_unique && !(mu_second_deriv > 0.0) {
        minimizer_unique = false;
    }

    Ok(BandProfile { material, alpha, samples, xi_star, mu_star, mu_second_deriv, minimizer_unique })
}

/// Secant iteration on dμ₁/dξ to pin the minimizer beyond the resolution of
/// value comparisons. Falls back to the input point if the iteration leaves
/// a small neighbourhood.
fn polish_minimizer(material: Material, alpha: f64, xi0: f64, grid: &Grid1D) -> Result<f64> {
    let fh = |xi: f64| band_derivative_fh(material, alpha, xi, grid);
    let mut x0 = xi0;
    let mut f0 = fh(x0)?;
    let mut x1 = xi0 + 1e-5;
    let mut f1 = fh(x1)?;
    for _ in 0..8 {
        if (f1 - f0).abs() < 1e-300 || f1.abs() < 1e-11 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() || (x2 - xi0).abs() > 0.05 {
            return Ok(xi0);
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = fh(x1)?;
    }
    Ok(x1)
}

/// 5-point centered second derivative with step 0.05. Eigenvalues are smooth
/// in ξ on a fixed grid, so the stencil error O(d⁴) dominates the noise.
fn second_derivative<F>(f: &F, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let d = 0.05;
    let fm2 = f(x - 2.0 * d)?;
    let fm1 = f(x - d)?;
    let f0 = f(x)?;
    let fp1 = f(x + d)?;
    let fp2 = f(x + 2.0 * d)?;
    Ok((-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * d * d))
}

/// β(a,m,α) = inf over ξ of μ₁, over the given scan with golden refinement.
pub fn band_minimum(material: Material, alpha: f64, scan: ScanSpec, grid: &Grid1D) -> Result<(f64, f64)> {
    let f = |xi: f64| model1d::mu1_xi(material, alpha, xi, grid);
    let xs = scan.points();
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for (i, &xi) in xs.iter().enumerate() {
        let v = f(xi)?;
        if v < best {
            best = v;
            best_i = i;
        }
    }
    if best_i == 0 || best_i == xs.len() - 1 {
        // minimum at scan edge: return the edge sample (callers that need an
        // interior minimum use band_profile and check the flag)
        return Ok((xs[best_i], best));
    }
    golden_min(&f, xs[best_i - 1], xs[best_i + 1], 1e-8)
}

/// Feynman–Hellmann derivative dμ₁/dξ = -2 ∫ w̃(τ)(τ-ξ) |f|² dτ, evaluated
/// by trapezoid quadrature on the ground state at (α, ξ).
pub fn band_derivative_fh(material: Material, alpha: f64, xi: f64, grid: &Grid1D) -> Result<f64> {
    let gs = model1d::ground_state(material, alpha, xi, grid)?;
    Ok(-2.0 * weighted_moment(&gs.vector, material, xi, 1, grid))
}

/// Trapezoid quadrature of `∫ w̃(τ)(τ-ξ)^p f² dτ` with the cell-averaged
/// weight at the interface node.
pub fn weighted_moment(f: &[f64], material: Material, xi: f64, power: i32, grid: &Grid1D) -> f64 {
    let n = grid.n();
    debug_assert_eq!(f.len(), n + 1);
    let h = grid.spacing();
    let mut s = 0.0;
    for i in 0..=n {
        let tau = grid.node(i);
        let w = material.weight_1d(tau);
        let trap = if i == 0 || i == n { 0.5 } else { 1.0 };
        s += trap * w * (tau - xi).powi(power) * f[i] * f[i];
    }
    s * h
}

/// Plain trapezoid masses on each side of the interface: `(∫₊ f², ∫₋ f²)`.
/// The interface node contributes half its trapezoid weight to each side.
pub fn side_masses(f: &[f64], grid: &Grid1D) -> (f64, f64) {
    let n = grid.n();
    let h = grid.spacing();
    let k = grid.interface_index();
    let mut plus = 0.0;
    let mut minus = 0.0;
    for i in 0..=n {
        let trap = if i == 0 || i == n { 0.5 } else { 1.0 };
        let v = trap * f[i] * f[i];
        if i > k {
            plus += v;
        } else if i < k {
            minus += v;
        } else {
            plus += 0.5 * v;
            minus += 0.5 * v;
        }
    }
    (plus * h, minus * h)
}

/// The threshold α₀(a,m).
///
/// m > 1: unique root of α ↦ β(a,m,α) on (Θ₀, 1), located by bisection to
/// 1e-8 (β is strictly decreasing near the root). m ≤ 1: returns exactly 1
/// after verifying that the ξ-scan minimum of μ₁ at α = 1 is ≥ -1e-4.
pub fn alpha0(material: Material, grid: &Grid1D, half_grid: &Grid1D) -> Result<f64> {
    let scan = ScanSpec::default_xi();
    if material.m() <= 1.0 {
        let (_, mu_min) = band_minimum(material, 1.0, scan, grid)?;
        if mu_min < -1e-4 {
            return Err(Error::Eigensolver(format!(
                "m <= 1 verification failed: scan minimum of mu1 at alpha=1 is {mu_min}"
            )));
        }
        return Ok(1.0);
    }
    let theta0 = model1d::theta0_cached(half_grid)?;
    let beta = |alpha: f64| -> Result<f64> { Ok(band_minimum(material, alpha, scan, grid)?.1) };
    let mut lo = theta0 + 1e-4;
    let mut hi = 1.0 - 1e-6;
    let beta_lo = beta(lo)?;
    let beta_hi = beta(hi)?;
    if !(beta_lo > 0.0 && beta_hi < 0.0) {
        return Err(Error::NotBracketed(format!(
            "alpha0 not bracketed on ({lo:.6}, {hi:.6}): beta = ({beta_lo:.3e}, {beta_hi:.3e})"
        )));
    }
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if beta(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Memoized α₀ on the default grids (synchronized cache).
pub fn alpha0_cached(material: Material) -> Result<f64> {
    static CACHE: Mutex<Option<HashMap<(u64, u64), f64>>> = Mutex::new(None);
    let key = (material.a().to_bits(), material.m().to_bits());
    {
        let mut guard = CACHE.lock().unwrap();
        if let Some(&v) = guard.get_or_insert_with(HashMap::new).get(&key) {
            return Ok(v);
        }
    }
    let v = alpha0(material, &Grid1D::default_line(), &Grid1D::default_half_line())?;
    CACHE.lock().unwrap().get_or_insert_with(HashMap::new).insert(key, v);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(a: f64, m: f64) -> Material {
        Material::new(a, m).unwrap()
    }

    #[test]
    fn fh_derivative_vanishes_for_translation_invariant_operator() {
        // m = 1, α = 0: full-line oscillator, μ₁(ξ) ≡ 1
        let grid = Grid1D::new(-10.0, 10.0, 1000).unwrap();
        for &xi in &[0.0, 0.5, 1.0] {
            let d = band_derivative_fh(mat(1.0, 1.0), 0.0, xi, &grid).unwrap();
            assert!(d.abs() < 1e-8, "xi = {xi}: dμ/dξ = {d}");
        }
    }

    #[test]
    fn fh_matches_centered_difference() {
        let grid = Grid1D::default_line();
        let m = mat(1.0, 2.0);
        let alpha = 0.7;
        let dxi = 1e-4;
        for &xi in &[0.0, 0.5, 1.0] {
            let fh = band_derivative_fh(m, alpha, xi, &grid).unwrap();
            let fp = model1d::mu1_xi(m, alpha, xi + dxi, &grid).unwrap();
            let fm = model1d::mu1_xi(m, alpha, xi - dxi, &grid).unwrap();
            let fd = (fp - fm) / (2.0 * dxi);
            assert!((fh - fd).abs() < 1e-6, "xi = {xi}: FH {fh} vs FD {fd}");
        }
    }

    #[test]
    fn fh_vanishes_at_band_minimizer() {
        let grid = Grid1D::default_line();
        let m = mat(1.0, 2.0);
        let profile = band_profile(m, 0.7, ScanSpec::default_xi(), &grid).unwrap();
        let d = band_derivative_fh(m, 0.7, profile.xi_star, &grid).unwrap();
        assert!(d.abs() < 1e-6, "dμ/dξ(ξ*) = {d}");
    }

    #[test]
    fn alpha0_for_small_m_is_one() {
        let grid = Grid1D::default_line();
        let half = Grid1D::default_half_line();
        let a0 = alpha0(mat(1.0, 0.5), &grid, &half).unwrap();
        assert_eq!(a0, 1.0);
        let a0b = alpha0(mat(2.5, 1.0), &grid, &half).unwrap();
        assert_eq!(a0b, 1.0);
    }

    #[test]
    fn alpha0_bracket_for_m_two() {
        let grid = Grid1D::default_line();
        let half = Grid1D::default_half_line();
        let th0 = model1d::theta0_cached(&half).unwrap();
        let a0 = alpha0(mat(1.0, 2.0), &grid, &half).unwrap();
        assert!(a0 > th0 && a0 < 1.0, "alpha0 = {a0}, theta0 = {th0}");
        // band minimum vanishes at alpha0 and crosses strictly
        let scan = ScanSpec::default_xi();
        let (_, b0) = band_minimum(mat(1.0, 2.0), a0, scan, &grid).unwrap();
        assert!(b0.abs() < 1e-6, "beta(alpha0) = {b0}");
        let (_, bm) = band_minimum(mat(1.0, 2.0), a0 - 0.05, scan, &grid).unwrap();
        let (_, bp) = band_minimum(mat(1.0, 2.0), a0 + 0.05, scan, &grid).unwrap();
        assert!(bm > 0.0 && bp < 0.0, "no strict crossing: {bm}, {bp}");
    }

    #[test]
    fn alpha0_approaches_theta0_for_large_m() {
        // The gap follows ≈ 0.583/√m; the value at m = 100 is frozen from a
        // QL-oracle-verified run (see the acceptance notes: it exceeds the
        // 0.05 desk estimate).
        let grid = Grid1D::default_line();
        let half = Grid1D::default_half_line();
        let th0 = model1d::theta0_cached(&half).unwrap();
        let a0 = alpha0(mat(1.0, 100.0), &grid, &half).unwrap();
        let gap = a0 - th0;
        assert!(gap > 0.0 && gap < 0.1, "gap = {gap}");
        assert!((gap - 0.058314).abs() < 2e-4, "gap = {gap} drifted from golden");
    }

    #[test]
    fn profile_unique_nondegenerate_in_p_regime() {
        let grid = Grid1D::default_line();
        let m = mat(1.0, 10.0);
        let a0 = alpha0_cached(m).unwrap();
        for &da in &[-0.02, 0.0, 0.02] {
            let p = band_profile(m, a0 + da, ScanSpec::default_xi(), &grid).unwrap();
            assert!(p.minimizer_unique, "degenerate at offset {da}");
            assert!(p.xi_star > 0.0, "xi* = {}", p.xi_star);
            assert!(p.mu_second_deriv > 0.0, "μ'' = {}", p.mu_second_deriv);
            assert!(p.mu_star <= p.samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min) + 1e-12);
        }
    }
}
