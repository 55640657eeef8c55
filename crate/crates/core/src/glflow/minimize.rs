//! Energy descent: preconditioned Barzilai-Borwein steps with Armijo
//! backtracking, so the energy is non-increasing along every accepted step.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::Geometry;
use crate::material::Material;

use super::{gl_energy, gl_gradient, GLState, GlProblem};

#[derive(Debug, Clone, Copy)]
pub struct GlOptions {
    /// Grid nodes across the longer side of the Ω̃ bounding box.
    pub nodes_per_side: usize,
    /// Gradient-norm convergence factor; the tolerance is this times the
    /// number of masked nodes.
    pub tol_factor: f64,
    pub max_iter: usize,
    /// Clip |ψ| back to 1 whenever it exceeds this during descent (the
    /// radial retraction onto the unit disc never increases the energy).
    pub projection_cap: f64,
}

impl Default for GlOptions {
    fn default() -> Self {
        GlOptions { nodes_per_side: 128, tol_factor: 1e-8, max_iter: 50_000, projection_cap: 1.5 }
    }
}

/// Initial configuration of the descent.
#[derive(Debug, Clone)]
pub enum GlInit {
    /// Normal state plus small seeded noise on ψ.
    NormalPerturbed,
    /// Superconducting patch filling Ω in the applied field.
    Meissner,
    /// Caller-supplied configuration.
    Supplied { psi: Vec<Complex64>, link_theta: Vec<f64> },
}

/// Minimize the GL energy at (κ, H). Deterministic for a fixed seed.
pub fn minimize(
    geometry: &Geometry,
    material: Material,
    kappa: f64,
    h_field: f64,
    init: GlInit,
    opts: &GlOptions,
    seed: u64,
) -> Result<GLState> {
    let problem = GlProblem::new(geometry, material, kappa, h_field, opts.nodes_per_side)?;
    minimize_problem(&problem, init, opts, seed)
}

pub fn minimize_problem(
    problem: &GlProblem,
    init: GlInit,
    opts: &GlOptions,
    seed: u64,
) -> Result<GLState> {
    let n = problem.grid.n_nodes();
    let ne = problem.grid.edges.len();

    let (mut psi, mut theta) = match init {
        GlInit::NormalPerturbed => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi: Vec<Complex64> = (0..n)
                .map(|_| {
                    Complex64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1))
                })
                .collect();
            (psi, problem.normal_links())
        }
        GlInit::Meissner => {
            let psi: Vec<Complex64> = (0..n)
                .map(|u| Complex64::new(problem.grid.frac_in[u], 0.0))
                .collect();
            (psi, problem.normal_links())
        }
        GlInit::Supplied { psi, link_theta } => (psi, link_theta),
    };
    assert_eq!(psi.len(), n);
    assert_eq!(theta.len(), ne);

    // block preconditioner equalizing the ψ and θ curvature scales
    let h2 = problem.grid.h * problem.grid.h;
    let k2 = problem.kappa * problem.kappa;
    let p_psi = 1.0 / (8.0 + h2 * k2 * (1.0 + problem.material.a()));
    let p_theta = h2 / 8.0;

    let tol = opts.tol_factor * n as f64;
    let mut energy = gl_energy(problem, &psi, &theta);
    let mut grad = gl_gradient(problem, &psi, &theta);
    let mut gnorm = super::gradient_norm(&grad);
    let mut step = 0.5;
    let mut iterations = 0;
    let mut converged = gnorm <= tol;

    while !converged && iterations < opts.max_iter {
        iterations += 1;
        // Armijo backtracking along the preconditioned direction
        let dir_sq: f64 = grad.dpsi.iter().map(|z| 4.0 * p_psi * z.norm_sqr()).sum::<f64>()
            + grad.dtheta.iter().map(|t| p_theta * t * t).sum::<f64>();
        let mut accepted = false;
        let mut s = step;
        for _ in 0..40 {
            let mut psi_new = psi.clone();
            let mut theta_new = theta.clone();
            for u in 0..n {
                psi_new[u] -= 2.0 * s * p_psi * grad.dpsi[u];
            }
            for k in 0..ne {
                theta_new[k] -= s * p_theta * grad.dtheta[k];
            }
            let e_new = gl_energy(problem, &psi_new, &theta_new);
            if e_new <= energy - 1e-4 * s * dir_sq {
                // modulus projection: never increases the energy
                let mut projected = false;
                for z in psi_new.iter_mut() {
                    let m = z.norm();
                    if m > opts.projection_cap {
                        *z *= 1.0 / m;
                        projected = true;
                    }
                }
                let e_acc = if projected { gl_energy(problem, &psi_new, &theta_new) } else { e_new };
                let g_new = gl_gradient(problem, &psi_new, &theta_new);
                // BB1 step for descent along -P·∇E: (Δx·P⁻¹Δx)/(Δx·Δ∇E)
                let mut ss = 0.0;
                let mut sy = 0.0;
                for u in 0..n {
                    let dx = psi_new[u] - psi[u];
                    let dg = g_new.dpsi[u] - grad.dpsi[u];
                    ss += dx.norm_sqr() / p_psi;
                    sy += 2.0 * (dx.conj() * dg).re;
                }
                for k in 0..ne {
                    let dx = theta_new[k] - theta[k];
                    let dg = g_new.dtheta[k] - grad.dtheta[k];
                    ss += dx * dx / p_theta;
                    sy += dx * dg;
                }
                psi = psi_new;
                theta = theta_new;
                grad = g_new;
                energy = e_acc;
                step = if sy > 0.0 { (ss / sy).clamp(1e-10, 1e4) } else { (s * 2.0).min(1e4) };
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            // descent direction exhausted at this precision
            break;
        }
        gnorm = super::gradient_norm(&grad);
        if gnorm <= tol {
            converged = true;
        }
    }

    Ok(GLState {
        psi,
        link_theta: theta,
        h: problem.grid.h,
        kappa: problem.kappa,
        h_field: problem.h_field,
        energy,
        grad_norm: gnorm,
        converged,
        resolution_warning: !problem.resolution_ok(),
        iterations,
    })
}
