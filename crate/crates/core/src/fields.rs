//! Critical-field computations: μ⁽¹⁾(κ, H) through the planar paths, the
//! one-sided B-derivatives of λ₁ = μ₁ + αB, the root H*(κ), the disc
//! monotonicity bound, and classification of the phase sets N and N^loc
//! over an H grid.
//!
//! The linear eigenvalue connects to the field variables through B = κH and
//! α = κ/H (so αB = κ² always); N^loc is the set of H with μ⁽¹⁾ < 0 and N
//! the set where the full Ginzburg-Landau energy admits a nontrivial
//! minimizer.

use num_complex::Complex64;


use crate::constants::ModelConstants;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::glflow::{self, GlInit, GlOptions};
use crate::material::Material;
use crate::planar::{self, FdOptions, FourierOptions, PlanarEig};

/// One evaluation of μ⁽¹⁾(κ, H) = μ₁(κH, κ/H).
#[derive(Debug, Clone, Copy)]
pub struct FieldPoint {
    pub kappa: f64,
    pub h_field: f64,
    pub b: f64,
    pub alpha: f64,
    pub mu: f64,
}

/// Which planar route evaluates μ₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathChoice {
    /// Fourier on discs in the surface regime, finite differences otherwise.
    Auto,
    Fourier,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy)]
pub struct PathOptions {
    pub choice: PathChoice,
    pub fourier: FourierOptions,
    pub fd: FdOptions,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            choice: PathChoice::Auto,
            fourier: FourierOptions::default(),
            fd: FdOptions::default(),
        }
    }
}

impl PathOptions {
    /// The annulus Fourier reduction is trustworthy for surface-localized
    /// states: moderate α and B large enough that the inner Dirichlet
    /// truncation sits many decay lengths from the interface.
    fn resolve(&self, geometry: &Geometry, b: f64, alpha: f64) -> PathChoice {
        match self.choice {
            PathChoice::Auto => {
                if geometry.is_disc_pair() && alpha <= 3.0 && b >= 16.0 {
                    PathChoice::Fourier
                } else {
                    PathChoice::FiniteDifference
                }
            }
            c => c,
        }
    }
}

/// μ₁(B, α) by the resolved path.
pub fn mu1_planar(
    geometry: &Geometry,
    material: Material,
    b: f64,
    alpha: f64,
    opts: &PathOptions,
) -> Result<PlanarEig> {
    match opts.resolve(geometry, b, alpha) {
        PathChoice::Fourier => planar::mu1_disc_fourier(geometry, material, b, alpha, opts.fourier),
        _ => planar::mu1_2d_fd(geometry, material, b, alpha, opts.fd),
    }
}

/// μ⁽¹⁾(κ, H), evaluated as μ₁(κH, κ/H).
pub fn mu_linear(
    kappa: f64,
    h_field: f64,
    geometry: &Geometry,
    material: Material,
    opts: &PathOptions,
) -> Result<FieldPoint> {
    if !(kappa > 0.0 && h_field > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need kappa, H > 0, got ({kappa}, {h_field})"
        )));
    }
    let b = kappa * h_field;
    let alpha = kappa / h_field;
    let eig = mu1_planar(geometry, material, b, alpha, opts)?;
    Ok(FieldPoint { kappa, h_field, b, alpha, mu: eig.mu1 })
}

/// One-sided derivatives of λ₁(B, α) = μ₁(B, α) + αB in B at fixed α.
#[derive(Debug, Clone, Copy)]
pub struct OneSidedDerivatives {
    pub left: f64,
    pub right: f64,
    /// Number of angular modes active at B (disc path; 1 away from kinks).
    pub active_modes: usize,
}

/// Disc route: per-mode derivatives with mode tracking, so kinks (mode
/// crossings) yield genuine one-sided values — the right derivative is the
/// smallest active branch slope, the left the largest.
pub fn db_lambda1_pm_disc(
    geometry: &Geometry,
    material: Material,
    b: f64,
    alpha: f64,
    opts: &FourierOptions,
) -> Result<OneSidedDerivatives> {
    let xi = planar::xi_star_cached(material, alpha)?;
    let center = 0.5 * b + xi * b.sqrt();
    let lo = (center - opts.window).floor() as i64;
    let hi = (center + opts.window).ceil() as i64;
    let mut evals = Vec::with_capacity((hi - lo + 1) as usize);
    for n in lo..=hi {
        evals.push((n, planar::disc_mode_eigenvalue(geometry, material, b, alpha, n, *opts)?));
    }
    let min = evals.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let tol_active = 1e-8 * (1.0 + min.abs());
    let active: Vec<i64> =
        evals.iter().filter(|e| e.1 - min <= tol_active).map(|e| e.0).collect();

    let mut slopes = Vec::with_capacity(active.len());
    for &n in &active {
        slopes.push(mode_slope(geometry, material, b, alpha, n, opts)?);
    }
    let dmin = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let dmax = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(OneSidedDerivatives { left: dmax + alpha, right: dmin + alpha, active_modes: active.len() })
}

/// Centered difference of one angular branch in B, halved until stable to
/// 1e-3 relative.
fn mode_slope(
    geometry: &Geometry,
    material: Material,
    b: f64,
    alpha: f64,
    n: i64,
    opts: &FourierOptions,
) -> Result<f64> {
    let mut d = (1e-4 * b).max(0.01);
    let quot = |d: f64| -> Result<f64> {
        let ep = planar::disc_mode_eigenvalue(geometry, material, b + d, alpha, n, *opts)?;
        let em = planar::disc_mode_eigenvalue(geometry, material, b - d, alpha, n, *opts)?;
        Ok((ep - em) / (2.0 * d))
    };
    let mut prev = quot(d)?;
    for _ in 0..4 {
        d *= 0.5;
        let cur = quot(d)?;
        if (cur - prev).abs() <= 1e-3 * cur.abs().max(1e-12) {
            return Ok(cur);
        }
        prev = cur;
    }
    Ok(prev)
}

/// FD route: adaptive one-sided difference quotients with warm-started
/// eigensolves. A failed convergence of the quotient is reported per point.
pub fn db_lambda1_pm_fd(
    geometry: &Geometry,
    material: Material,
    b: f64,
    alpha: f64,
    opts: &FdOptions,
) -> Result<OneSidedDerivatives> {
    let (base, vec0) = planar::mu1_2d_fd_with_start(geometry, material, b, alpha, *opts, None)?;
    let lambda0 = base.mu1 + alpha * b;
    let side = |sign: f64| -> Result<f64> {
        let mut d = (1e-4 * b).max(0.01);
        let mut warm: Option<Vec<Complex64>> = Some(vec0.clone());
        let mut prev = f64::NAN;
        for k in 0..5 {
            let (eig, v) = planar::mu1_2d_fd_with_start(
                geometry,
                material,
                b + sign * d,
                alpha,
                *opts,
                warm.as_deref(),
            )?;
            warm = Some(v);
            let quot = (eig.mu1 + alpha * (b + sign * d) - lambda0) / (sign * d);
            if k > 0 && (quot - prev).abs() <= 1e-3 * quot.abs().max(1e-12) {
                return Ok(quot);
            }
            prev = quot;
            d *= 0.5;
        }
        Err(Error::NonConvergence(format!(
            "one-sided quotient did not settle at B = {b} (last {prev:.6e})"
        )))
    };
    let right = side(1.0)?;
    let left = side(-1.0)?;
    Ok(OneSidedDerivatives { left, right, active_modes: 1 })
}

/// A detected angular-mode crossing of the disc eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct KinkRecord {
    pub b: f64,
    pub left: f64,
    pub right: f64,
    pub mode_before: i64,
    pub mode_after: i64,
}

/// Scan [b_lo, b_hi] for winning-mode changes; locate each crossing by
/// bisection and evaluate genuine one-sided derivatives there.
pub fn disc_kink_scan(
    geometry: &Geometry,
    material: Material,
    alpha: f64,
    b_lo: f64,
    b_hi: f64,
    step: f64,
    opts: &FourierOptions,
) -> Result<Vec<KinkRecord>> {
    let winning = |b: f64| -> Result<i64> {
        let eig = planar::mu1_disc_fourier(geometry, material, b, alpha, *opts)?;
        Ok(eig.winning_mode.unwrap())
    };
    let mut kinks = Vec::new();
    let mut b_prev = b_lo;
    let mut n_prev = winning(b_prev)?;
    let mut b = b_lo + step;
    while b <= b_hi + 1e-9 {
        let n_cur = winning(b)?;
        if n_cur != n_prev {
            // bisect e_{n_prev}(B) = e_{n_cur}(B)
            let gap = |bb: f64| -> Result<f64> {
                let e1 = planar::disc_mode_eigenvalue(geometry, material, bb, alpha, n_prev, *opts)?;
                let e2 = planar::disc_mode_eigenvalue(geometry, material, bb, alpha, n_cur, *opts)?;
                Ok(e1 - e2)
            };
            let mut lo = b_prev;
            let mut hi = b;
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if gap(mid)? < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let bc = 0.5 * (lo + hi);
            let s_before = mode_slope(geometry, material, bc, alpha, n_prev, opts)?;
            let s_after = mode_slope(geometry, material, bc, alpha, n_cur, opts)?;
            kinks.push(KinkRecord {
                b: bc,
                left: s_before.max(s_after) + alpha,
                right: s_before.min(s_after) + alpha,
                mode_before: n_prev,
                mode_after: n_cur,
            });
            n_prev = n_cur;
        }
        b_prev = b;
        b += step;
    }
    Ok(kinks)
}

/// Root and asymptotics of the critical field at one κ.
#[derive(Debug, Clone)]
pub struct Hc3Result {
    pub kappa: f64,
    pub h_star: f64,
    /// κ/α₀ + 𝒞₁·α₀^{-3/2}·(κ_r)_max.
    pub h_asym: f64,
    /// μ⁽¹⁾ stayed positive on the sampled interval above H*.
    pub positive_above: bool,
    /// (H, μ) scan records (including the uniqueness samples).
    pub scan: Vec<(f64, f64)>,
}

/// Bracket and bisect the smallest root H* of H ↦ μ⁽¹⁾(κ, H), then sample
/// above it (up to the normal-regime ceiling 10κ) to report whether μ⁽¹⁾
/// stays positive.
pub fn hc3_star(
    kappa: f64,
    geometry: &Geometry,
    material: Material,
    constants: &ModelConstants,
    opts: &PathOptions,
) -> Result<Hc3Result> {
    let mu_at = |h: f64| -> Result<f64> {
        Ok(mu_linear(kappa, h, geometry, material, opts)?.mu)
    };
    // scan from the strongly superconducting side (α = 2) to the ceiling
    let h_lo = 0.5 * kappa;
    let h_hi = 10.0 * kappa;
    let n_scan = 40;
    let mut scan = Vec::new();
    let mut bracket = None;
    let mut prev = (h_lo, mu_at(h_lo)?);
    scan.push(prev);
    for k in 1..=n_scan {
        let h = h_lo + (3.0 * kappa - h_lo) * k as f64 / n_scan as f64;
        let mu = mu_at(h)?;
        scan.push((h, mu));
        if prev.1 < 0.0 && mu >= 0.0 {
            bracket = Some((prev.0, h));
            break;
        }
        prev = (h, mu);
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        Error::NotBracketed(format!(
            "no sign change of mu(kappa = {kappa}) on [{h_lo}, {}]: scan = {scan:?}",
            3.0 * kappa
        ))
    })?;
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if mu_at(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h_star = 0.5 * (lo + hi);

    // uniqueness sampling above the root
    let mut positive_above = true;
    for k in 1..=12 {
        let h = h_star + (h_hi - h_star) * k as f64 / 12.0;
        let mu = mu_at(h)?;
        scan.push((h, mu));
        if mu <= 0.0 {
            positive_above = false;
        }
    }

    let h_asym = kappa / constants.alpha0
        + constants.cal_c1 * constants.alpha0.powf(-1.5) * geometry.curvature_max();
    Ok(Hc3Result { kappa, h_star, h_asym, positive_above, scan })
}

/// The disc uniqueness condition on m at α = α₀:
/// (1/a)(aα₀ + C₂/2)(1 - Θ₀/α₀) < α₀ - C₂/2.
#[derive(Debug, Clone, Copy)]
pub struct ConditionM {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// Both sides agree within tolerance: flagged, not decided.
    pub indeterminate: bool,
}

pub fn condition_m_check(constants: &ModelConstants) -> ConditionM {
    let a = constants.material.a();
    let a0 = constants.alpha0;
    let c2 = constants.c2;
    let lhs = (a * a0 + 0.5 * c2) * (1.0 - constants.theta0 / a0) / a;
    let rhs = a0 - 0.5 * c2;
    let indeterminate = (lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0);
    ConditionM { holds: !indeterminate && lhs < rhs, lhs, rhs, indeterminate }
}

/// Per-H record of the classification experiment.
#[derive(Debug, Clone, Copy)]
pub struct HPoint {
    pub h_field: f64,
    pub mu: f64,
    /// Nontrivial GL minimizer found; None when the flow did not converge.
    pub nontrivial: Option<bool>,
    pub energy: f64,
    pub psi_norm: f64,
}

/// Classification of N^loc (sign of μ⁽¹⁾) and N (nonlinear minimization)
/// over the H grid, with the empirical set boundaries.
#[derive(Debug, Clone)]
pub struct TransitionReport {
    pub kappa: f64,
    pub h_star: Option<f64>,
    pub h_asym: Option<f64>,
    pub n_loc_sup: Option<f64>,
    pub n_loc_inf_complement: Option<f64>,
    pub n_sup: Option<f64>,
    pub n_inf_complement: Option<f64>,
    /// Smallest grid H after which μ⁽¹⁾ increases monotonically to the end.
    pub monotone_after: Option<f64>,
    pub points: Vec<HPoint>,
    pub unknown_count: usize,
}

/// Run the transition experiment at fixed κ over the given H values.
#[allow(clippy::too_many_arguments)]
pub fn classify_sets(
    kappa: f64,
    geometry: &Geometry,
    material: Material,
    h_values: &[f64],
    path: &PathOptions,
    gl: &GlOptions,
    seed: u64,
) -> Result<TransitionReport> {
    let mut points = Vec::with_capacity(h_values.len());
    let mut unknown_count = 0;
    for &h in h_values {
        let mu = mu_linear(kappa, h, geometry, material, path)?.mu;
        let state = glflow::minimize(
            geometry,
            material,
            kappa,
            h,
            GlInit::NormalPerturbed,
            gl,
            seed,
        )?;
        let nontrivial = if state.converged {
            Some(state.energy < -1e-8 && state.psi_l2() > 1e-4)
        } else {
            unknown_count += 1;
            None
        };
        points.push(HPoint {
            h_field: h,
            mu,
            nontrivial,
            energy: state.energy,
            psi_norm: state.psi_l2(),
        });
    }

    let n_loc_sup = points.iter().filter(|p| p.mu < 0.0).map(|p| p.h_field).fold(None, fmax);
    let n_loc_inf_complement =
        points.iter().filter(|p| p.mu >= 0.0).map(|p| p.h_field).fold(None, fmin);
    let n_sup = points
        .iter()
        .filter(|p| p.nontrivial == Some(true))
        .map(|p| p.h_field)
        .fold(None, fmax);
    let n_inf_complement = points
        .iter()
        .filter(|p| p.nontrivial == Some(false))
        .map(|p| p.h_field)
        .fold(None, fmin);

    // monotone_after: smallest grid H from which μ increases to the end
    let mut monotone_after = None;
    'outer: for k in 0..points.len() {
        for j in k..points.len().saturating_sub(1) {
            if points[j + 1].mu <= points[j].mu {
                continue 'outer;
            }
        }
        monotone_after = Some(points[k].h_field);
        break;
    }

    Ok(TransitionReport {
        kappa,
        h_star: None,
        h_asym: None,
        n_loc_sup,
        n_loc_inf_complement,
        n_sup,
        n_inf_complement,
        monotone_after,
        points,
        unknown_count,
    })
}

fn fmax(acc: Option<f64>, x: f64) -> Option<f64> {
    Some(acc.map_or(x, |a: f64| a.max(x)))
}

fn fmin(acc: Option<f64>, x: f64) -> Option<f64> {
    Some(acc.map_or(x, |a: f64| a.min(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band;

    fn mat(a: f64, m: f64) -> Material {
        Material::new(a, m).unwrap()
    }

    #[test]
    fn field_point_identities_exact() {
        let g = Geometry::default_discs();
        let m = mat(1.0, 10.0);
        let p = mu_linear(10.0, 15.0, &g, m, &PathOptions::default()).unwrap();
        assert_eq!(p.b, 10.0 * 15.0);
        assert_eq!(p.alpha, 10.0 / 15.0);
        // bit-for-bit consistency with the planar path it delegates to
        let eig = mu1_planar(&g, m, p.b, p.alpha, &PathOptions::default()).unwrap();
        assert_eq!(p.mu, eig.mu1);
    }

    #[test]
    fn low_field_negative_high_field_positive() {
        let g = Geometry::default_discs();
        let m = mat(1.0, 10.0);
        let opts = PathOptions::default();
        let kappa = 20.0;
        let low = mu_linear(kappa, 0.5 * kappa, &g, m, &opts).unwrap();
        assert!(low.mu < 0.0, "mu = {} at H = κ/2", low.mu);
        let high = mu_linear(kappa, 10.0 * kappa, &g, m, &opts).unwrap();
        assert!(high.mu > 0.0, "mu = {} at H = 10κ", high.mu);
    }

    #[test]
    fn condition_m_true_for_large_m() {
        let c = ModelConstants::at_alpha0(mat(1.0, 50.0)).unwrap();
        let cm = condition_m_check(&c);
        assert!(cm.holds, "lhs = {}, rhs = {}", cm.lhs, cm.rhs);
    }

    #[test]
    fn kink_derivatives_ordered() {
        let g = Geometry::default_discs();
        let m = mat(1.0, 10.0);
        let alpha = band::alpha0_cached(m).unwrap();
        let kinks =
            disc_kink_scan(&g, m, alpha, 600.0, 612.0, 0.4, &FourierOptions::default()).unwrap();
        assert!(!kinks.is_empty(), "no mode crossing detected on a 12-unit B window");
        for k in &kinks {
            assert!(
                k.right <= k.left + 1e-9,
                "right {} > left {} at B = {}",
                k.right,
                k.left,
                k.b
            );
        }
    }

    #[test]
    fn disc_derivative_bound_holds_midrange() {
        let g = Geometry::default_discs();
        let m = mat(1.0, 10.0);
        let c = ModelConstants::at_alpha0(m).unwrap();
        let d = db_lambda1_pm_disc(&g, m, 1000.0, c.alpha, &FourierOptions::default()).unwrap();
        let bound = c.alpha - 0.5 * c.c2 - 0.05;
        assert!(d.right >= bound, "right derivative {} below bound {bound}", d.right);
    }
}
