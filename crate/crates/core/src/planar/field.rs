//! The reference magnetic potential F with curl F = 1, div F = 0 in Ω̃ and
//! tangential trace on ∂Ω̃.
//!
//! For a disc F = ½(-x₂, x₁) in closed form. For general domains F = ∇⊥φ
//! with Δφ = 1 in Ω̃ and φ = 0 on ∂Ω̃, solved by conjugate gradients on the
//! masked 5-point Laplacian.

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::grid2d::MaskedGrid2d;

/// Reference vector field, either closed form (disc) or a discrete stream
/// function on a masked grid.
pub enum FField {
    Disc,
    Stream { grid: MaskedGrid2d, phi: Vec<f64> },
}

impl FField {
    /// Field value at a point (closed form, or centered differences of φ).
    pub fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        match self {
            FField::Disc => [-0.5 * p[1], 0.5 * p[0]],
            FField::Stream { grid, phi } => {
                let ix = ((p[0] - grid.x0) / grid.h).round() as i64;
                let iy = ((p[1] - grid.y0) / grid.h).round() as i64;
                let at = |ix: i64, iy: i64| -> f64 {
                    if ix < 0 || iy < 0 || ix >= grid.nx as i64 || iy >= grid.ny as i64 {
                        return 0.0;
                    }
                    let id = grid.node_id[iy as usize * grid.nx + ix as usize];
                    if id < 0 {
                        0.0
                    } else {
                        phi[id as usize]
                    }
                };
                let dpx = (at(ix + 1, iy) - at(ix - 1, iy)) / (2.0 * grid.h);
                let dpy = (at(ix, iy + 1) - at(ix, iy - 1)) / (2.0 * grid.h);
                [-dpy, dpx]
            }
        }
    }

    /// Discrete curl at the interior nodes of the stream grid (5-point Δφ);
    /// identically 1 for the closed form.
    pub fn interior_curl_error(&self) -> f64 {
        match self {
            FField::Disc => 0.0,
            FField::Stream { grid, phi } => {
                let mut worst = 0.0_f64;
                let h2 = grid.h * grid.h;
                for (id, &(ix, iy)) in grid.nodes.iter().enumerate() {
                    let (ix, iy) = (ix as usize, iy as usize);
                    if ix == 0 || iy == 0 || ix + 1 >= grid.nx || iy + 1 >= grid.ny {
                        continue;
                    }
                    let nid = |ix: usize, iy: usize| grid.node_id[iy * grid.nx + ix];
                    let (l, r, d, u) = (nid(ix - 1, iy), nid(ix + 1, iy), nid(ix, iy - 1), nid(ix, iy + 1));
                    if l < 0 || r < 0 || d < 0 || u < 0 {
                        continue;
                    }
                    let lap = (phi[l as usize] + phi[r as usize] + phi[d as usize] + phi[u as usize]
                        - 4.0 * phi[id])
                        / h2;
                    worst = worst.max((lap - 1.0).abs());
                }
                worst
            }
        }
    }
}

/// Compute the reference field for a geometry. Discs use the closed form;
/// other domains get the stream-function Poisson solve at the given
/// resolution.
pub fn reference_field(geometry: &Geometry, points_per_unit: f64) -> Result<FField> {
    geometry.validate()?;
    if geometry.is_disc_pair() {
        return Ok(FField::Disc);
    }
    let grid = MaskedGrid2d::from_resolution(geometry.clone(), points_per_unit)?;
    // sanity floor: the boundary must be resolved against its curvature
    let kappa_max = geometry.curvature_max();
    if kappa_max.is_finite() && kappa_max > 0.0 && grid.h > 0.2 / kappa_max {
        return Err(Error::Resolution(format!(
            "spacing {:.4} too coarse for curvature {kappa_max:.3}; need at least {:.1} points per unit",
            grid.h,
            5.0 * kappa_max
        )));
    }
    let phi = poisson_dirichlet(&grid, 1.0, 1e-12)?;
    Ok(FField::Stream { grid, phi })
}

/// CG solve of -Δφ = -rhs (i.e. Δφ = rhs) with φ = 0 outside the mask.
fn poisson_dirichlet(grid: &MaskedGrid2d, rhs: f64, tol: f64) -> Result<Vec<f64>> {
    let n = grid.n_nodes();
    let h2 = grid.h * grid.h;
    // apply -Δ (SPD) on the masked grid with zero Dirichlet outside
    let apply = |x: &[f64], y: &mut [f64]| {
        for id in 0..n {
            y[id] = 4.0 * x[id] / h2;
        }
        for e in &grid.edges {
            let (u, v) = (e.u as usize, e.v as usize);
            y[u] -= x[v] / h2;
            y[v] -= x[u] / h2;
        }
    };
    let b = vec![-rhs; n];
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs: f64 = r.iter().map(|v| v * v).sum();
    let b_norm = rs.sqrt();
    let mut ap = vec![0.0; n];
    for _ in 0..20 * (grid.nx + grid.ny) {
        if rs.sqrt() <= tol * b_norm {
            break;
        }
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(ap.iter()).map(|(a, b)| a * b).sum();
        let alpha = rs / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rs_new / rs;
        rs = rs_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    if !(rs.sqrt() <= 10.0 * tol * b_norm) {
        return Err(Error::NonConvergence(format!(
            "Poisson CG residual {:.3e} of {:.3e}",
            rs.sqrt(),
            b_norm
        )));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_closed_form_properties() {
        let f = reference_field(&Geometry::default_discs(), 16.0).unwrap();
        // curl = 1 and div = 0 exactly, tangential on the outer circle
        let p = [0.7, -0.4];
        let eps = 1e-6;
        let fx = |q: [f64; 2]| f.eval(q)[0];
        let fy = |q: [f64; 2]| f.eval(q)[1];
        let curl = (fy([p[0] + eps, p[1]]) - fy([p[0] - eps, p[1]])) / (2.0 * eps)
            - (fx([p[0], p[1] + eps]) - fx([p[0], p[1] - eps])) / (2.0 * eps);
        assert!((curl - 1.0).abs() < 1e-9);
        let div = (fx([p[0] + eps, p[1]]) - fx([p[0] - eps, p[1]])) / (2.0 * eps)
            + (fy([p[0], p[1] + eps]) - fy([p[0], p[1] - eps])) / (2.0 * eps);
        assert!(div.abs() < 1e-9);
        let r = 1.5;
        let q = [r * 0.6, r * 0.8];
        let val = f.eval(q);
        let radial = val[0] * 0.6 + val[1] * 0.8;
        assert!(radial.abs() < 1e-12, "nu · F = {radial}");
    }

    #[test]
    fn ellipse_stream_curl_is_one() {
        let g = Geometry::EllipsePair { inner: (0.8, 0.5), outer: (1.3, 1.0) };
        let f = reference_field(&g, 32.0).unwrap();
        let err = f.interior_curl_error();
        assert!(err < 1e-8, "interior curl error {err}");
    }

    #[test]
    fn too_coarse_mesh_is_rejected() {
        let g = Geometry::EllipsePair { inner: (0.8, 0.1), outer: (1.3, 1.0) };
        // curvature at (±0.8, 0): 0.8/0.01 = 80 → needs ~400 points per unit
        let r = reference_field(&g, 16.0);
        assert!(r.is_err());
    }
}
