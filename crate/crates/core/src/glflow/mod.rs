//! Discrete nonlinear Ginzburg-Landau energy with link variables, its exact
//! gradient, a descent minimizer and the critical-point diagnostic battery.
//!
//! The Gibbs free energy on the masked grid is
//!
//!   E = Σ_edges w_e |ψ_v e^{-iθ_e} - ψ_u|²
//!     + Σ_nodes h²κ² [V_a|ψ|² + ½·1_Ω|ψ|⁴]
//!     + Σ_plaquettes (Φ_p - κH h²)² / h²,
//!
//! with θ_e the discrete circulation of κH·A along the edge and Φ_p its
//! plaquette sum. Link variables make the discretization exactly gauge
//! covariant: the normal state (ψ = 0, A = F) has zero energy and zero
//! gradient identically, and a nodal phase change shifted onto the links
//! leaves every quantity unchanged.

mod diagnostics;
mod minimize;

pub use diagnostics::{critical_point_diagnostics, GlDiagnostics};
pub use minimize::{minimize, minimize_problem, GlInit, GlOptions};

use num_complex::Complex64;

use crate::error::Result;
use crate::geometry::Geometry;
use crate::grid2d::MaskedGrid2d;
use crate::material::Material;

/// Assembled GL problem: grid plus material-resolved coefficient tables.
pub struct GlProblem {
    pub grid: MaskedGrid2d,
    pub material: Material,
    pub kappa: f64,
    pub h_field: f64,
    /// Kinetic weight per edge.
    pub weights: Vec<f64>,
    /// Quadratic potential coefficient per node (-1_Ω + a·1_out by fractions).
    pub vcoef: Vec<f64>,
    /// Quartic weight per node (the Ω fraction).
    pub qcoef: Vec<f64>,
}

impl GlProblem {
    pub fn new(
        geometry: &Geometry,
        material: Material,
        kappa: f64,
        h_field: f64,
        nodes_per_side: usize,
    ) -> Result<GlProblem> {
        let grid = MaskedGrid2d::from_node_count(geometry.clone(), nodes_per_side)?;
        let weights = grid.edge_weights(material);
        let vcoef = grid.potential_coeff(material);
        let qcoef = grid.frac_in.clone();
        Ok(GlProblem { grid, material, kappa, h_field, weights, vcoef, qcoef })
    }

    /// Marginal resolution check: the spacing should resolve both the
    /// coherence length 1/κ and the magnetic length 1/√(κH) by ~4 cells.
    pub fn resolution_ok(&self) -> bool {
        let h = self.grid.h;
        h <= 1.0 / (4.0 * self.kappa) && h <= 1.0 / (4.0 * (self.kappa * self.h_field).sqrt())
    }

    /// Link phases of the normal state: θ_e = κH·∫_e F·dl (every plaquette
    /// circulation is then exactly κH·h²).
    pub fn normal_links(&self) -> Vec<f64> {
        let khb = self.kappa * self.h_field;
        self.grid.edges.iter().map(|e| khb * e.theta_coeff).collect()
    }
}

/// Discrete order parameter and vector potential (as link circulations),
/// with the converged energy and gradient norm.
#[derive(Debug, Clone)]
pub struct GLState {
    pub psi: Vec<Complex64>,
    pub link_theta: Vec<f64>,
    /// Grid spacing (carried for the state's own quadratures).
    pub h: f64,
    pub kappa: f64,
    pub h_field: f64,
    pub energy: f64,
    pub grad_norm: f64,
    pub converged: bool,
    pub resolution_warning: bool,
    pub iterations: usize,
}

impl GLState {
    /// Discrete L²(Ω̃) norm of ψ.
    pub fn psi_l2(&self) -> f64 {
        self.h * self.psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Exact gradient of the energy: `dpsi[u] = ∂E/∂ψ̄_u` (the real gradient
/// with respect to (Re ψ, Im ψ) is twice its real and imaginary parts) and
/// `dtheta[e] = ∂E/∂θ_e`.
pub struct GlGradient {
    pub dpsi: Vec<Complex64>,
    pub dtheta: Vec<f64>,
}

/// Energy of a configuration.
pub fn gl_energy(problem: &GlProblem, psi: &[Complex64], theta: &[f64]) -> f64 {
    let grid = &problem.grid;
    let h2 = grid.h * grid.h;
    let k2 = problem.kappa * problem.kappa;
    let khb = problem.kappa * problem.h_field * h2;

    let mut e = 0.0;
    for (k, edge) in grid.edges.iter().enumerate() {
        let d = psi[edge.v as usize] * Complex64::from_polar(1.0, -theta[k]) - psi[edge.u as usize];
        e += problem.weights[k] * d.norm_sqr();
    }
    for u in 0..grid.n_nodes() {
        let m2 = psi[u].norm_sqr();
        e += h2 * k2 * (problem.vcoef[u] * m2 + 0.5 * problem.qcoef[u] * m2 * m2);
    }
    for p in &grid.plaquettes {
        let circ = theta[p.e_bottom as usize] + theta[p.e_right as usize]
            - theta[p.e_top as usize]
            - theta[p.e_left as usize];
        let d = circ - khb;
        e += d * d / h2;
    }
    e
}

/// Exact gradient of [`gl_energy`].
pub fn gl_gradient(problem: &GlProblem, psi: &[Complex64], theta: &[f64]) -> GlGradient {
    let grid = &problem.grid;
    let h2 = grid.h * grid.h;
    let k2 = problem.kappa * problem.kappa;
    let khb = problem.kappa * problem.h_field * h2;

    let mut dpsi = vec![Complex64::new(0.0, 0.0); grid.n_nodes()];
    let mut dtheta = vec![0.0; grid.edges.len()];

    for (k, edge) in grid.edges.iter().enumerate() {
        let w = problem.weights[k];
        let phase = Complex64::from_polar(1.0, -theta[k]);
        let pv = psi[edge.v as usize];
        let d = pv * phase - psi[edge.u as usize];
        dpsi[edge.u as usize] -= w * d;
        dpsi[edge.v as usize] += w * d * phase.conj();
        // ∂|d|²/∂θ = 2 Im(conj(d)·ψ_v e^{-iθ})
        dtheta[k] += w * 2.0 * (d.conj() * pv * phase).im;
    }
    for u in 0..grid.n_nodes() {
        let m2 = psi[u].norm_sqr();
        dpsi[u] += h2 * k2 * (problem.vcoef[u] + problem.qcoef[u] * m2) * psi[u];
    }
    for p in &grid.plaquettes {
        let circ = theta[p.e_bottom as usize] + theta[p.e_right as usize]
            - theta[p.e_top as usize]
            - theta[p.e_left as usize];
        let g = 2.0 * (circ - khb) / h2;
        dtheta[p.e_bottom as usize] += g;
        dtheta[p.e_right as usize] += g;
        dtheta[p.e_top as usize] -= g;
        dtheta[p.e_left as usize] -= g;
    }
    GlGradient { dpsi, dtheta }
}

/// Euclidean norm of the real gradient vector.
pub fn gradient_norm(g: &GlGradient) -> f64 {
    let mut s = 0.0;
    for z in &g.dpsi {
        s += 4.0 * z.norm_sqr();
    }
    for t in &g.dtheta {
        s += t * t;
    }
    s.sqrt()
}

/// Apply a discrete gauge transform: ψ_u ← ψ_u e^{iχ_u}, θ_e ← θ_e + χ_v - χ_u.
pub fn gauge_transform(problem: &GlProblem, psi: &mut [Complex64], theta: &mut [f64], chi: &[f64]) {
    for (u, z) in psi.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, chi[u]);
    }
    for (k, edge) in problem.grid.edges.iter().enumerate() {
        theta[k] += chi[edge.v as usize] - chi[edge.u as usize];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem() -> GlProblem {
        GlProblem::new(
            &Geometry::default_discs(),
            Material::new(1.0, 10.0).unwrap(),
            4.0,
            6.0,
            64,
        )
        .unwrap()
    }

    fn seeded_state(p: &GlProblem, seed: u64) -> (Vec<Complex64>, Vec<f64>) {
        let mut s = seed;
        let mut rnd = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let psi: Vec<Complex64> =
            (0..p.grid.n_nodes()).map(|_| Complex64::new(rnd(), rnd())).collect();
        let mut theta = p.normal_links();
        for t in theta.iter_mut() {
            *t += 0.2 * rnd();
        }
        (psi, theta)
    }

    #[test]
    fn normal_state_has_zero_energy_and_gradient() {
        let p = problem();
        let psi = vec![Complex64::new(0.0, 0.0); p.grid.n_nodes()];
        let theta = p.normal_links();
        let e = gl_energy(&p, &psi, &theta);
        assert!(e.abs() < 1e-20, "normal-state energy {e}");
        let g = gl_gradient(&p, &psi, &theta);
        // the only residue is plaquette-closure roundoff, ~ε·κH/h² per cell
        assert!(gradient_norm(&g) < 1e-9, "normal-state gradient {}", gradient_norm(&g));
    }

    #[test]
    fn energy_matches_independent_quadrature_oracle() {
        // straightforward re-quadrature reading weights from the geometry
        // fractions directly, term by term
        let p = problem();
        let (psi, theta) = seeded_state(&p, 0xABCDEF);
        let e = gl_energy(&p, &psi, &theta);

        let grid = &p.grid;
        let h2 = grid.h * grid.h;
        let (a, m) = (p.material.a(), p.material.m());
        let mut kinetic = 0.0;
        for (k, edge) in grid.edges.iter().enumerate() {
            let w = 1.0 / (edge.frac_in + (1.0 - edge.frac_in) * m);
            let d = psi[edge.v as usize]
                * Complex64::new(theta[k].cos(), -theta[k].sin())
                - psi[edge.u as usize];
            kinetic += w * (d.re * d.re + d.im * d.im);
        }
        let mut potential = 0.0;
        for u in 0..grid.n_nodes() {
            let f = grid.frac_in[u];
            let m2 = psi[u].norm_sqr();
            potential +=
                h2 * p.kappa * p.kappa * ((-f + a * (1.0 - f)) * m2 + 0.5 * f * m2 * m2);
        }
        let khb = p.kappa * p.h_field * h2;
        let mut field = 0.0;
        for pl in &grid.plaquettes {
            let circ = theta[pl.e_bottom as usize] + theta[pl.e_right as usize]
                - theta[pl.e_top as usize]
                - theta[pl.e_left as usize];
            field += (circ - khb) * (circ - khb) / h2;
        }
        let oracle = kinetic + potential + field;
        assert!(
            (e - oracle).abs() <= 1e-12 * oracle.abs().max(1.0),
            "energy {e} vs oracle {oracle}"
        );
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = problem();
        let (mut psi, theta) = seeded_state(&p, 0x5EED);
        for z in psi.iter_mut() {
            *z *= 0.3;
        }
        let g = gl_gradient(&p, &psi, &theta);
        // seeded direction (the θ part is the noise on top of the normal links)
        let (dpsi_dir, dtheta_seed) = seeded_state(&p, 0xD1CE);
        let normal = p.normal_links();
        let dir_theta: Vec<f64> =
            dtheta_seed.iter().zip(normal.iter()).map(|(a, b)| a - b).collect();
        let mut deriv = 0.0;
        for u in 0..psi.len() {
            deriv += 2.0 * (g.dpsi[u].conj() * dpsi_dir[u]).re;
        }
        for k in 0..theta.len() {
            deriv += g.dtheta[k] * dir_theta[k];
        }
        let mut best_rel = f64::INFINITY;
        for &t in &[1e-5, 1e-6, 1e-7] {
            let mut psi_p = psi.clone();
            let mut psi_m = psi.clone();
            let mut th_p = theta.clone();
            let mut th_m = theta.clone();
            for u in 0..psi.len() {
                psi_p[u] += t * dpsi_dir[u];
                psi_m[u] -= t * dpsi_dir[u];
            }
            for k in 0..theta.len() {
                th_p[k] += t * dir_theta[k];
                th_m[k] -= t * dir_theta[k];
            }
            let fd = (gl_energy(&p, &psi_p, &th_p) - gl_energy(&p, &psi_m, &th_m)) / (2.0 * t);
            best_rel = best_rel.min((fd - deriv).abs() / deriv.abs().max(1e-12));
        }
        assert!(best_rel <= 1e-6, "gradient vs FD relative error {best_rel}");
    }

    #[test]
    fn second_variation_matches_planar_quadratic_form() {
        let p = problem();
        let grid = &p.grid;
        let n = grid.n_nodes();
        // test direction supported inside Ω
        let mut phi = vec![Complex64::new(0.0, 0.0); n];
        for u in 0..n {
            let q = grid.position(u);
            let r2 = q[0] * q[0] + q[1] * q[1];
            if r2 < 0.8 * 0.8 {
                phi[u] = Complex64::new((1.3 * q[0]).sin() * (0.9 * q[1]).cos(), 0.4 * (q[0] + q[1]).cos());
            }
        }
        let theta = p.normal_links();
        let b = p.kappa * p.h_field;
        let alpha = p.kappa / p.h_field;
        let op = crate::planar::assemble_operator(grid, p.material, b, alpha, None);
        let mut aphi = vec![Complex64::new(0.0, 0.0); n];
        op.apply(&phi, &mut aphi);
        let mut quad = 0.0;
        for u in 0..n {
            quad += (phi[u].conj() * aphi[u]).re;
        }
        quad *= grid.h * grid.h;

        let t = 1e-3;
        let psi_t: Vec<Complex64> = phi.iter().map(|z| t * z).collect();
        let quartic: f64 = (0..n)
            .map(|u| {
                0.5 * p.kappa * p.kappa
                    * grid.h
                    * grid.h
                    * p.qcoef[u]
                    * psi_t[u].norm_sqr()
                    * psi_t[u].norm_sqr()
            })
            .sum();
        let e = gl_energy(&p, &psi_t, &theta);
        let second = (e - quartic) / (t * t);
        assert!(
            (second - quad).abs() <= 1e-10 * quad.abs().max(1.0),
            "second variation {second} vs Q {quad}"
        );
    }

    #[test]
    fn gauge_transform_preserves_energy_exactly() {
        let p = problem();
        let (mut psi, mut theta) = seeded_state(&p, 0xFEED);
        let e0 = gl_energy(&p, &psi, &theta);
        let chi: Vec<f64> = (0..p.grid.n_nodes())
            .map(|u| {
                let q = p.grid.position(u);
                0.7 * q[0] - 1.3 * q[1] + 0.5 * (q[0] * q[1]).sin()
            })
            .collect();
        gauge_transform(&p, &mut psi, &mut theta, &chi);
        let e1 = gl_energy(&p, &psi, &theta);
        assert!((e0 - e1).abs() <= 1e-12 * e0.abs().max(1.0), "gauge moved energy {e0} → {e1}");
    }
}
