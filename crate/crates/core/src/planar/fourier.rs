//! Angular-Fourier path for concentric discs: μ₁(B, α) = min over n of the
//! lowest eigenvalue of the radial operator
//!
//!   -(1/ρ)(d/dρ)(w ρ d/dρ) + w(n/ρ - Bρ/2)² + αB·V(ρ)
//!
//! on (ρ_min, r_out) with Dirichlet ends. The winning modes concentrate in
//! a window around n ≈ B/2 + ξ*√B; the window is widened automatically
//! until the minimizer is interior to it. The inner Dirichlet truncation at
//! ρ_min = 1/2 is exponentially benign (the ground state lives in a
//! B^{-1/2} collar of ρ = 1).

use std::collections::HashMap;
use std::sync::Mutex;

use crate::band::{self, ScanSpec};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::grid1d::Grid1D;
use crate::material::Material;
use crate::tridiag::SymTridiag;

use super::PlanarEig;

#[derive(Debug, Clone, Copy)]
pub struct FourierOptions {
    /// Inner Dirichlet truncation radius.
    pub rho_min: f64,
    /// Mode window half-width in δ units.
    pub window: f64,
    /// Target spacing in the boundary-layer variable τ = √B(ρ-1); the
    /// radial spacing is this divided by √B.
    pub h_tau: f64,
    /// Cap on automatic window widenings.
    pub max_widenings: usize,
}

impl Default for FourierOptions {
    fn default() -> Self {
        FourierOptions { rho_min: 0.5, window: 12.0, h_tau: 0.005, max_widenings: 4 }
    }
}

/// Band minimizer ξ*(a, m, α) on the default 1D grid, memoized.
pub fn xi_star_cached(material: Material, alpha: f64) -> Result<f64> {
    static CACHE: Mutex<Option<HashMap<(u64, u64, u64), f64>>> = Mutex::new(None);
    let key = (material.a().to_bits(), material.m().to_bits(), alpha.to_bits());
    {
        let mut guard = CACHE.lock().unwrap();
        if let Some(&v) = guard.get_or_insert_with(HashMap::new).get(&key) {
            return Ok(v);
        }
    }
    let grid = Grid1D::default_line();
    let profile = band::band_profile(material, alpha, ScanSpec::default_xi(), &grid)?;
    let v = profile.xi_star;
    CACHE.lock().unwrap().get_or_insert_with(HashMap::new).insert(key, v);
    Ok(v)
}

/// Radial grid snapped so the interface ρ = 1 is a node.
struct RadialGrid {
    rho_min: f64,
    h: f64,
    /// total number of cells; nodes are rho_min + i·h for i = 0..=n
    n: usize,
}

fn radial_grid(b: f64, r_out: f64, opts: &FourierOptions) -> RadialGrid {
    let h_target = (opts.h_tau / b.max(25.0).sqrt()).min(2e-3);
    let k_in = ((1.0 - opts.rho_min) / h_target).round().max(8.0);
    let h = (1.0 - opts.rho_min) / k_in;
    let n_out = ((r_out - 1.0) / h).round().max(8.0);
    RadialGrid { rho_min: opts.rho_min, h, n: (k_in + n_out) as usize }
}

/// Lowest eigenvalue of the radial operator for angular mode `n_mode`.
/// Returns the eigenvalue; with `want_vector` also the nodal eigenfunction
/// (L²(ρdρ)-normalized) and nodal radii.
fn radial_lowest(
    material: Material,
    b: f64,
    alpha: f64,
    n_mode: i64,
    rg: &RadialGrid,
    want_vector: bool,
) -> Result<(f64, Option<(Vec<f64>, Vec<f64>)>)> {
    let n = rg.n;
    let h = rg.h;
    let rho = |i: usize| rg.rho_min + i as f64 * h;
    // interior nodes 1..n-1, Dirichlet at both ends; similarity transform
    // by diag(√ρ) keeps the matrix symmetric
    let dim = n - 1;
    let mut diag = vec![0.0; dim];
    let mut off = vec![0.0; dim - 1];
    let nm = n_mode as f64;
    for j in 0..dim {
        let i = j + 1;
        let r = rho(i);
        // material coordinate: t > 0 inside the superconductor (ρ < 1)
        let t = 1.0 - r;
        let w_node = material.weight_1d(t);
        let v_node = material.potential_1d(t);
        let rl = r - 0.5 * h;
        let rr = r + 0.5 * h;
        let wl = material.weight_1d(1.0 - rl);
        let wr = material.weight_1d(1.0 - rr);
        let kin = (wl * rl + wr * rr) / (h * h * r);
        let pot = w_node * (nm / r - 0.5 * b * r).powi(2) + alpha * b * v_node;
        diag[j] = kin + pot;
        if j + 1 < dim {
            off[j] = -(wr * rr) / (h * h * (r * rr).sqrt());
        }
    }
    let t = SymTridiag::new(diag, off);
    if !want_vector {
        return Ok((t.lowest_eigenvalue(1e-11), None));
    }
    let (value, v, _res) = t.lowest_eigenpair(1e-11)?;
    // map back through the similarity: f_i = v_i / √ρ_i, then L²(ρdρ) norm
    let mut f = vec![0.0; n + 1];
    let mut radii = vec![0.0; n + 1];
    for i in 0..=n {
        radii[i] = rho(i);
    }
    for j in 0..dim {
        f[j + 1] = v[j] / radii[j + 1].sqrt();
    }
    let mut nrm = 0.0;
    for i in 0..=n {
        let trap = if i == 0 || i == n { 0.5 } else { 1.0 };
        nrm += trap * f[i] * f[i] * radii[i];
    }
    nrm = (nrm * h).sqrt();
    for x in f.iter_mut() {
        *x /= nrm;
    }
    Ok((value, Some((f, radii))))
}

/// Lowest eigenvalue of the radial operator for one angular mode on the
/// disc geometry (exposed for per-mode derivative tracking).
pub fn disc_mode_eigenvalue(
    geometry: &Geometry,
    material: Material,
    b: f64,
    alpha: f64,
    n_mode: i64,
    opts: FourierOptions,
) -> Result<f64> {
    let r_out = disc_outer(geometry)?;
    let rg = radial_grid(b, r_out, &opts);
    radial_lowest(material, b, alpha, n_mode, &rg, false).map(|(v, _)| v)
}

fn disc_outer(geometry: &Geometry) -> Result<f64> {
    match geometry {
        Geometry::ConcentricDiscs { r_in, r_out } => {
            if (r_in - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "Fourier path expects inner radius 1, got {r_in}"
                )));
            }
            Ok(*r_out)
        }
        _ => Err(Error::InvalidParameter("Fourier path needs concentric discs".into())),
    }
}

/// μ₁(B, α) on concentric discs by minimization over angular modes.
pub fn mu1_disc_fourier(
    geometry: &Geometry,
    material: Material,
    b: f64,
    alpha: f64,
    opts: FourierOptions,
) -> Result<PlanarEig> {
    let r_out = disc_outer(geometry)?;
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(format!("Fourier path needs B > 0, got {b}")));
    }
    let xi = xi_star_cached(material, alpha)?;
    let center = 0.5 * b + xi * b.sqrt();
    let rg = radial_grid(b, r_out, &opts);

    let mut window = opts.window;
    let mut widenings = 0;
    let (n_star, mu) = loop {
        let lo = (center - window).floor() as i64;
        let hi = (center + window).ceil() as i64;
        let mut best = (lo, f64::INFINITY);
        for n_mode in lo..=hi {
            let (v, _) = radial_lowest(material, b, alpha, n_mode, &rg, false)?;
            if v < best.1 {
                best = (n_mode, v);
            }
        }
        if best.0 > lo && best.0 < hi {
            break best;
        }
        widenings += 1;
        if widenings > opts.max_widenings {
            return Err(Error::ScanEdge(format!(
                "mode minimizer pinned to window edge after {widenings} widenings (B = {b}, window = {window})"
            )));
        }
        window *= 1.6;
    };

    // boundary-layer mass of the winning mode
    let (_, vecdata) = radial_lowest(material, b, alpha, n_star, &rg, true)?;
    let (f, radii) = vecdata.unwrap();
    let layer = 5.0 / b.sqrt();
    let mut inside = 0.0;
    let mut total = 0.0;
    for i in 0..f.len() {
        let trap = if i == 0 || i + 1 == f.len() { 0.5 } else { 1.0 };
        let m = trap * f[i] * f[i] * radii[i];
        total += m;
        if (radii[i] - 1.0).abs() <= layer {
            inside += m;
        }
    }

    Ok(PlanarEig {
        b,
        alpha,
        mu1: mu,
        winning_mode: Some(n_star),
        delta: Some(n_star as f64 - 0.5 * b - xi * b.sqrt()),
        boundary_mass_fraction: inside / total,
    })
}
