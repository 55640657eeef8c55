//! Critical-point diagnostic battery: the estimates provable for weak
//! solutions, evaluated on a converged state.

use crate::material::Material;

use super::{GLState, GlProblem};

/// Diagnostics of one converged (or advisory) state.
#[derive(Debug, Clone)]
pub struct GlDiagnostics {
    pub max_psi: f64,
    /// a·∫_out|ψ|² / ∫_in|ψ|² (≤ 1 for critical points).
    pub l2_partition_ratio: f64,
    /// a·∫_out|ψ|⁴ / ∫_in|ψ|⁴ (≤ 1 for critical points).
    pub l4_partition_ratio: f64,
    /// H·‖curl A - 1‖₂ / (‖ψ‖_{L²(Ω)}·‖ψ‖_{L⁴(Ω̃)}); bounded across a family.
    pub curl_ratio: f64,
    /// ‖∇_{κHA}ψ‖₂ / (max(1,√m)·κ·‖ψ‖_{L²(Ω)}) (≤ 1 for critical points).
    pub nabla_ratio: f64,
    /// ‖ψ‖²_{L⁴(Ω)} / ‖ψ‖_{L²(Ω)} (≤ 1, a consequence of |ψ| ≤ 1).
    pub l4l2_ratio: f64,
    /// Exponential decay rate of |ψ|² into the bulk of Ω, normalized by
    /// √(κH): slope of the shell-averaged log |ψ|² fit divided by -2√(κH).
    pub decay_rate: f64,
    /// Number of shells entering the decay fit.
    pub decay_shells: usize,
    /// Mass within distance (κ(H-κ))^{-1/2} of ∂Ω (NaN when H ≤ κ).
    pub boundary_mass_fraction: f64,
    /// Diagnostics computed on a non-converged state are advisory only.
    pub advisory: bool,
}

/// Evaluate the battery on a state. The state must belong to the problem's
/// grid (same node count).
pub fn critical_point_diagnostics(problem: &GlProblem, state: &GLState) -> GlDiagnostics {
    let grid = &problem.grid;
    let n = grid.n_nodes();
    assert_eq!(state.psi.len(), n, "state does not match the problem grid");
    let h2 = grid.h * grid.h;
    let material: Material = problem.material;
    let (kappa, h_field) = (state.kappa, state.h_field);

    let mut max_psi = 0.0_f64;
    let (mut l2_in, mut l2_out, mut l4_in, mut l4_out, mut l4_total) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for u in 0..n {
        let m2 = state.psi[u].norm_sqr();
        max_psi = max_psi.max(m2.sqrt());
        let f = grid.frac_in[u];
        l2_in += h2 * f * m2;
        l2_out += h2 * (1.0 - f) * m2;
        l4_in += h2 * f * m2 * m2;
        l4_out += h2 * (1.0 - f) * m2 * m2;
        l4_total += h2 * m2 * m2;
    }

    // unweighted covariant Dirichlet energy
    let mut kinetic = 0.0;
    for (k, edge) in grid.edges.iter().enumerate() {
        let d = state.psi[edge.v as usize]
            * num_complex::Complex64::from_polar(1.0, -state.link_theta[k])
            - state.psi[edge.u as usize];
        kinetic += d.norm_sqr();
    }

    // curl misfit
    let khb = kappa * h_field * h2;
    let mut curl_l2_sq = 0.0;
    for p in &grid.plaquettes {
        let circ = state.link_theta[p.e_bottom as usize] + state.link_theta[p.e_right as usize]
            - state.link_theta[p.e_top as usize]
            - state.link_theta[p.e_left as usize];
        let c = circ / khb - 1.0;
        curl_l2_sq += h2 * c * c;
    }

    let l2_omega = l2_in.sqrt();
    let l4_omega_sq = l4_in.sqrt();
    let l4_tilde_sq = l4_total.sqrt();

    let curl_ratio = if l2_omega > 0.0 {
        h_field * curl_l2_sq.sqrt() / (l2_omega * l4_tilde_sq.sqrt())
    } else {
        f64::NAN
    };
    let nabla_ratio = if l2_omega > 0.0 {
        kinetic.sqrt() / (material.m().sqrt().max(1.0) * kappa * l2_omega)
    } else {
        f64::NAN
    };
    let l4l2_ratio = if l2_omega > 0.0 { l4_omega_sq / l2_omega } else { f64::NAN };

    // Agmon-type decay: shell averages of |ψ|² against distance into Ω
    let shell_w = 2.0 * grid.h;
    let mut shells: Vec<(f64, f64, usize)> = Vec::new();
    for u in 0..n {
        if grid.frac_in[u] < 0.999 {
            continue;
        }
        let d = grid.dist_inner[u];
        let k = (d / shell_w) as usize;
        if shells.len() <= k {
            shells.resize(k + 1, (0.0, 0.0, 0));
        }
        shells[k].0 += state.psi[u].norm_sqr();
        shells[k].1 += d;
        shells[k].2 += 1;
    }
    let pts: Vec<(f64, f64)> = shells
        .iter()
        .skip(1)
        .filter(|s| s.2 > 0)
        .map(|s| (s.1 / s.2 as f64, (s.0 / s.2 as f64).max(1e-300).ln()))
        .take_while(|&(_, logm)| logm > -55.0)
        .collect();
    let (decay_rate, decay_shells) = if pts.len() >= 4 {
        let npt = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (npt * sxy - sx * sy) / (npt * sxx - sx * sx);
        (-slope / (2.0 * (kappa * h_field).sqrt()), pts.len())
    } else {
        (f64::NAN, pts.len())
    };

    // weak-decay collar mass
    let boundary_mass_fraction = if h_field > kappa {
        let layer = 1.0 / (kappa * (h_field - kappa)).sqrt();
        let mut inside = 0.0;
        let mut total = 0.0;
        for u in 0..n {
            let m2 = state.psi[u].norm_sqr();
            total += m2;
            if grid.dist_inner[u] <= layer {
                inside += m2;
            }
        }
        if total > 0.0 {
            inside / total
        } else {
            f64::NAN
        }
    } else {
        f64::NAN
    };

    GlDiagnostics {
        max_psi,
        l2_partition_ratio: material.a() * l2_out / l2_in.max(1e-300),
        l4_partition_ratio: material.a() * l4_out / l4_in.max(1e-300),
        curl_ratio,
        nabla_ratio,
        l4l2_ratio,
        decay_rate,
        decay_shells,
        boundary_mass_fraction,
        advisory: !state.converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Geometry;
    use crate::glflow::{gauge_transform, gl_energy, minimize_problem, GlInit, GlOptions};

    #[test]
    fn converged_state_passes_partition_and_bounds() {
        let mat = Material::new(1.0, 10.0).unwrap();
        let problem = GlProblem::new(&Geometry::default_discs(), mat, 4.0, 4.5, 96).unwrap();
        let st = minimize_problem(&problem, GlInit::NormalPerturbed, &GlOptions { nodes_per_side: 96, ..GlOptions::default() }, 3).unwrap();
        assert!(st.converged && st.energy < -1e-8, "nontrivial state expected");
        let d = critical_point_diagnostics(&problem, &st);
        assert!(d.max_psi <= 1.0 + 1e-6, "max|ψ| = {}", d.max_psi);
        assert!(d.l2_partition_ratio <= 1.0 + 1e-3, "L² ratio {}", d.l2_partition_ratio);
        assert!(d.l4_partition_ratio <= 1.0 + 1e-3, "L⁴ ratio {}", d.l4_partition_ratio);
        assert!(d.nabla_ratio <= 1.0 + 1e-2, "∇ ratio {}", d.nabla_ratio);
        assert!(d.l4l2_ratio <= 1.0 + 1e-6, "L⁴/L² {}", d.l4l2_ratio);
        assert!(!d.advisory);
    }

    #[test]
    fn gauge_orbit_leaves_diagnostics_unchanged() {
        let mat = Material::new(1.0, 10.0).unwrap();
        let problem = GlProblem::new(&Geometry::default_discs(), mat, 4.0, 4.5, 64).unwrap();
        let opts = GlOptions { nodes_per_side: 64, ..GlOptions::default() };
        let st = minimize_problem(&problem, GlInit::NormalPerturbed, &opts, 5).unwrap();
        let d0 = critical_point_diagnostics(&problem, &st);
        let e0 = gl_energy(&problem, &st.psi, &st.link_theta);

        let mut st2 = st.clone();
        let chi: Vec<f64> = (0..problem.grid.n_nodes())
            .map(|u| {
                let p = problem.grid.position(u);
                1.7 * p[0] - 0.4 * p[1] * p[1] + (3.0 * p[0] * p[1]).sin()
            })
            .collect();
        gauge_transform(&problem, &mut st2.psi, &mut st2.link_theta, &chi);
        let e1 = gl_energy(&problem, &st2.psi, &st2.link_theta);
        let d1 = critical_point_diagnostics(&problem, &st2);
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1e-12);
        assert!(rel(e0, e1) < 1e-12, "energy moved under gauge: {e0} vs {e1}");
        assert!(rel(d0.l2_partition_ratio, d1.l2_partition_ratio) < 1e-12);
        assert!(rel(d0.curl_ratio, d1.curl_ratio) < 1e-12);
        assert!(rel(d0.nabla_ratio, d1.nabla_ratio) < 1e-12);
    }
}
