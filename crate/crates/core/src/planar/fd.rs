//! Finite-difference path: complex Hermitian flux-form discretization with
//! Peierls link phases on a masked Cartesian grid, natural boundary on ∂Ω̃.

use num_complex::Complex64;

use crate::error::Result;
use crate::geometry::Geometry;
use crate::grid2d::MaskedGrid2d;
use crate::hermband::{self, SparseHerm};
use crate::material::Material;

use super::PlanarEig;

#[derive(Debug, Clone, Copy)]
pub struct FdOptions {
    /// Grid points per unit length (48 default; the boundary layer B^{-1/2}
    /// should be resolved by several cells, which caps B near 200 at the
    /// default).
    pub points_per_unit: f64,
    /// Relative eigensolver tolerance.
    pub tol: f64,
    /// Run the band-inertia certificate after convergence.
    pub certify: bool,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions { points_per_unit: 48.0, tol: 1e-9, certify: true }
    }
}

/// Assemble the Hermitian operator matrix for (geometry grid, material, B, α):
/// kinetic link terms -w_e·exp(±iBθ_e)/h² and the nodal potential αB·V_a.
///
/// An optional per-node gauge χ shifts every link phase by the exact
/// difference B(χ_v - χ_u); the spectrum must not change (used by the
/// gauge-invariance tests).
pub fn assemble_operator(
    grid: &MaskedGrid2d,
    material: Material,
    b: f64,
    alpha: f64,
    gauge_chi: Option<&dyn Fn([f64; 2]) -> f64>,
) -> SparseHerm {
    let n = grid.n_nodes();
    let h2 = grid.h * grid.h;
    let weights = grid.edge_weights(material);
    let vcoef = grid.potential_coeff(material);
    let mut diag: Vec<f64> = (0..n).map(|u| alpha * b * vcoef[u]).collect();
    let mut lower = Vec::with_capacity(grid.edges.len());
    for (k, e) in grid.edges.iter().enumerate() {
        let w = weights[k];
        let mut theta = b * e.theta_coeff;
        if let Some(chi) = gauge_chi {
            let pu = grid.position(e.u as usize);
            let pv = grid.position(e.v as usize);
            theta += b * (chi(pv) - chi(pu));
        }
        diag[e.u as usize] += w / h2;
        diag[e.v as usize] += w / h2;
        // entry A[v][u] pairing conj(phi_v) phi_u
        let val = -(w / h2) * Complex64::from_polar(1.0, theta);
        lower.push((e.v, e.u, val));
    }
    SparseHerm { n, diag, lower }
}

/// Lowest eigenvalue of the 2D operator by shift-invert Lanczos with a
/// banded LDLᴴ inner factorization.
pub fn mu1_2d_fd(
    geometry: &Geometry,
    material: Material,
    b: f64,
    alpha: f64,
    opts: FdOptions,
) -> Result<PlanarEig> {
    mu1_2d_fd_with_start(geometry, material, b, alpha, opts, None).map(|(eig, _)| eig)
}

/// Same as [`mu1_2d_fd`] but accepts a warm-start eigenvector and returns
/// the converged one, for derivative sweeps over B.
pub fn mu1_2d_fd_with_start(
    geometry: &Geometry,
    material: Material,
    b: f64,
    alpha: f64,
    opts: FdOptions,
    start: Option<&[Complex64]>,
) -> Result<(PlanarEig, Vec<Complex64>)> {
    if b < 0.0 {
        return Err(crate::error::Error::InvalidParameter(format!("need B >= 0, got {b}")));
    }
    let grid = MaskedGrid2d::from_resolution(geometry.clone(), opts.points_per_unit)?;
    let op = assemble_operator(&grid, material, b, alpha, None);
    let out = hermband::lowest_eigenpair(&op, None, start, opts.tol, opts.certify)?;

    let layer = if b > 0.0 { 5.0 / b.sqrt() } else { f64::INFINITY };
    let mut inside = 0.0;
    let mut total = 0.0;
    for (id, z) in out.vector.iter().enumerate() {
        let m = z.norm_sqr();
        total += m;
        if grid.dist_inner[id] <= layer {
            inside += m;
        }
    }
    Ok((
        PlanarEig {
            b,
            alpha,
            mu1: out.value,
            winning_mode: None,
            delta: None,
            boundary_mass_fraction: inside / total,
        },
        out.vector,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::fourier::{mu1_disc_fourier, FourierOptions};

    fn mat(a: f64, m: f64) -> Material {
        Material::new(a, m).unwrap()
    }

    #[test]
    fn zero_field_gives_zero_with_constant_mode() {
        let g = Geometry::default_discs();
        let opts = FdOptions { points_per_unit: 24.0, tol: 1e-10, certify: false };
        let (eig, vec) = mu1_2d_fd_with_start(&g, mat(1.0, 10.0), 0.0, 0.6, opts, None).unwrap();
        assert!(eig.mu1.abs() < 1e-9, "mu1 = {}", eig.mu1);
        // eigenvector is constant up to a global phase
        let z0 = vec[0];
        for z in &vec {
            assert!((z - z0).norm() < 1e-5, "non-constant mode");
        }
    }

    #[test]
    fn hermiticity_is_structural() {
        // the assembled operator stores the lower triangle once; verify the
        // quadratic form is real on a seeded complex vector
        let g = Geometry::default_discs();
        let grid = MaskedGrid2d::from_resolution(g, 16.0).unwrap();
        let op = assemble_operator(&grid, mat(1.0, 5.0), 17.0, 0.6, None);
        let n = op.n;
        let mut state = 42_u64;
        let mut rnd = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let x: Vec<Complex64> = (0..n).map(|_| Complex64::new(rnd(), rnd())).collect();
        let mut ax = vec![Complex64::new(0.0, 0.0); n];
        op.apply(&x, &mut ax);
        let q: Complex64 = x.iter().zip(ax.iter()).map(|(a, b)| a.conj() * b).sum();
        assert!(q.im.abs() < 1e-10 * q.re.abs().max(1.0), "imaginary quadratic form {q}");
    }

    #[test]
    fn gauge_invariance_of_spectrum() {
        let g = Geometry::default_discs();
        let grid = MaskedGrid2d::from_resolution(g, 20.0).unwrap();
        let m = mat(1.0, 10.0);
        let op0 = assemble_operator(&grid, m, 10.0, 0.6, None);
        let chi = |p: [f64; 2]| 0.3 * p[0].sin() * p[1].cos();
        let op1 = assemble_operator(&grid, m, 10.0, 0.6, Some(&chi));
        let e0 = hermband::lowest_eigenpair(&op0, None, None, 1e-10, false).unwrap();
        let e1 = hermband::lowest_eigenpair(&op1, None, None, 1e-10, false).unwrap();
        assert!(
            (e0.value - e1.value).abs() < 1e-6 * e0.value.abs().max(1.0),
            "gauge shift changed mu1: {} vs {}",
            e0.value,
            e1.value
        );
    }

    #[test]
    fn cross_method_agreement_at_b_fifty() {
        let g = Geometry::default_discs();
        let m = mat(1.0, 10.0);
        let alpha = crate::band::alpha0_cached(m).unwrap();
        let four = mu1_disc_fourier(&g, m, 50.0, alpha, FourierOptions::default()).unwrap();
        let fd = mu1_2d_fd(&g, m, 50.0, alpha, FdOptions::default()).unwrap();
        let rel = (fd.mu1 - four.mu1).abs() / four.mu1.abs();
        assert!(rel < 0.01, "FD {} vs Fourier {} (rel {rel})", fd.mu1, four.mu1);
    }

    #[test]
    fn boundary_localization_grows_with_field() {
        let g = Geometry::default_discs();
        let m = mat(1.0, 10.0);
        let alpha = crate::band::alpha0_cached(m).unwrap();
        let opts = FdOptions { points_per_unit: 48.0, tol: 1e-9, certify: false };
        let lo = mu1_2d_fd(&g, m, 60.0, alpha, opts).unwrap();
        let hi = mu1_2d_fd(&g, m, 160.0, alpha, opts).unwrap();
        assert!(hi.boundary_mass_fraction >= 0.8, "mass fraction {}", hi.boundary_mass_fraction);
        assert!(
            hi.boundary_mass_fraction >= lo.boundary_mass_fraction - 0.02,
            "localization did not grow: {} vs {}",
            lo.boundary_mass_fraction,
            hi.boundary_mass_fraction
        );
    }
}
