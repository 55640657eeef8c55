//! The 1D model operator family on the line with the interface flux
//! condition, and the half-line Neumann reference problem.
//!
//! The operator acts as `-u'' + (τ-ξ)²u - αu` on τ > 0 and as
//! `(1/m)(-u'' + (τ-ξ)²u) + aαu` on τ < 0, with the transmission condition
//! `u'(0+) = u'(0-)/m` at the interface. The discretization is flux-form
//! (finite volume): `-D⁻(w̃ D⁺u) + [w̃(τ)(τ-ξ)² + αṼ_a(τ)]u` with
//! face-centered weights, which encodes continuity of `w̃u'` without a
//! constraint row, stays exactly symmetric and converges at second order.
//!
//! The half-line problem `-u'' + (t-ξ)²u` on (0, ∞) with a Neumann condition
//! at 0 defines the reference constant Θ₀ as the minimum over ξ of its lowest
//! eigenvalue; it lies strictly between 1/2 and 1.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::grid1d::Grid1D;
use crate::material::Material;
use crate::tridiag::SymTridiag;

/// Parameters of the model operator `H[a, m, α; ξ]`.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    pub material: Material,
    pub alpha: f64,
    pub xi: f64,
}

impl ModelParams {
    /// `alpha = 0` is admitted here (it reduces the operator to the plain
    /// weighted oscillator, a useful closed-form check); the band and root
    /// operations require `alpha > 0`.
    pub fn new(material: Material, alpha: f64, xi: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be nonnegative, got {alpha}")));
        }
        if !xi.is_finite() {
            return Err(Error::InvalidParameter(format!("xi must be finite, got {xi}")));
        }
        Ok(ModelParams { material, alpha, xi })
    }
}

/// One eigenpair of the discretized model operator.
///
/// `vector` spans all grid nodes (Dirichlet zeros included) and is
/// normalized to unit discrete L² norm (trapezoid quadrature). The ground
/// state of these operators is sign-definite; the solver fixes the sign so
/// all entries are nonnegative.
#[derive(Debug, Clone)]
pub struct Eigenpair1D {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub grid: Grid1D,
}

impl Eigenpair1D {
    /// Value at the interface node τ = 0.
    pub fn at_interface(&self) -> f64 {
        self.vector[self.grid.interface_index()]
    }
}

/// Assemble the flux-form matrix of `H[a, m, α; ξ]` on `grid` with
/// Dirichlet rows at both ends (matrix over interior nodes only).
///
/// Face weights are `w̃` evaluated at face centers, so the two faces
/// touching the interface node carry `1/m` (left) and `1` (right), which
/// reproduces the transmission condition to second order. The nodal
/// potential at τ = 0 is the cell average of the two one-sided limits.
pub fn assemble_model_operator(params: &ModelParams, grid: &Grid1D) -> Result<SymTridiag> {
    if grid.lo() >= 0.0 {
        return Err(Error::InvalidGrid(
            "full-line operator needs lo < 0 < hi with a node at 0".into(),
        ));
    }
    let n = grid.n();
    let h = grid.spacing();
    if !(h > 0.0) {
        return Err(Error::InvalidGrid(format!("non-positive spacing {h}")));
    }
    let mat = params.material;
    let (alpha, xi) = (params.alpha, params.xi);
    let inv_h2 = 1.0 / (h * h);

    // interior nodes 1..n-1
    let dim = n - 1;
    let mut diag = vec![0.0; dim];
    let mut off = vec![0.0; dim - 1];
    for j in 0..dim {
        let i = j + 1;
        let tau = grid.node(i);
        let w_left = mat.weight_1d(grid.node(i) - 0.5 * h);
        let w_right = mat.weight_1d(grid.node(i) + 0.5 * h);
        let t = tau - xi;
        diag[j] = (w_left + w_right) * inv_h2 + mat.weight_1d(tau) * t * t
            + alpha * mat.potential_1d(tau);
        if j + 1 < dim {
            off[j] = -w_right * inv_h2;
        }
    }
    Ok(SymTridiag::new(diag, off))
}

/// Lowest eigenpair of an assembled model matrix, mapped back to grid nodes.
pub fn lowest_eigenpair(
    matrix: &SymTridiag,
    grid: &Grid1D,
    tolerance: f64,
) -> Result<Eigenpair1D> {
    let (value, v, residual) = matrix.lowest_eigenpair(tolerance)?;
    // embed interior vector into the full node array and renormalize in L²
    let n = grid.n();
    let mut vector = vec![0.0; n + 1];
    vector[1..n].copy_from_slice(&v);
    let sq: Vec<f64> = vector.iter().map(|x| x * x).collect();
    let norm = grid.trapezoid(&sq).sqrt();
    for x in vector.iter_mut() {
        *x /= norm;
    }
    // clamp sign-definiteness: entries should already be >= -eps after the
    // solver's sign fix
    Ok(Eigenpair1D { value, vector, residual, grid: *grid })
}

/// Discrete `μ₁(a, m, α; ξ)`: lowest eigenvalue of the model operator.
pub fn mu1_xi(material: Material, alpha: f64, xi: f64, grid: &Grid1D) -> Result<f64> {
    let params = ModelParams::new(material, alpha, xi)?;
    let t = assemble_model_operator(&params, grid)?;
    Ok(t.lowest_eigenvalue(EIG_TOL))
}

/// Absolute bisection tolerance for band-scale eigenvalues. The band values
/// are O(1), so an absolute tolerance keeps derivative quotients and golden
/// refinements quiet regardless of the matrix norm.
pub const EIG_TOL: f64 = 1e-13;

/// Ground state of the model operator at `(α, ξ)`.
pub fn ground_state(material: Material, alpha: f64, xi: f64, grid: &Grid1D) -> Result<Eigenpair1D> {
    let params = ModelParams::new(material, alpha, xi)?;
    let t = assemble_model_operator(&params, grid)?;
    lowest_eigenpair(&t, grid, EIG_TOL)
}

/// Assemble the half-line Neumann operator `-u'' + (t-ξ)²u` on `[0, hi]`
/// (Dirichlet at `hi`), symmetrized by the ghost-node similarity transform.
///
/// Returns the matrix together with the diagonal similarity scaling needed
/// to map its eigenvectors back to nodal values.
pub fn assemble_half_line_neumann(xi: f64, grid: &Grid1D) -> Result<(SymTridiag, Vec<f64>)> {
    if grid.lo() != 0.0 {
        return Err(Error::InvalidGrid("half-line grid must start at 0".into()));
    }
    let n = grid.n();
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    // unknowns: nodes 0..n-1 (Dirichlet at node n)
    let dim = n;
    let mut diag = vec![0.0; dim];
    let mut off = vec![0.0; dim - 1];
    for i in 0..dim {
        let t = grid.node(i) - xi;
        diag[i] = 2.0 * inv_h2 + t * t;
    }
    for j in 0..dim - 1 {
        off[j] = -inv_h2;
    }
    // ghost node u(-h) = u(h) makes row 0 equal to 2/h²(u0 - u1) + V u0;
    // the similarity D = diag(1/√2, 1, ..) restores symmetry: the coupling
    // becomes -√2/h² while eigenvalues are unchanged.
    off[0] = -std::f64::consts::SQRT_2 * inv_h2;
    let mut scaling = vec![1.0; dim];
    scaling[0] = std::f64::consts::SQRT_2; // nodal u0 = √2 · v0
    Ok((SymTridiag::new(diag, off), scaling))
}

/// Lowest eigenvalue of the half-line Neumann problem at a given ξ.
pub fn half_line_mu(xi: f64, grid: &Grid1D) -> Result<f64> {
    let (t, _) = assemble_half_line_neumann(xi, grid)?;
    Ok(t.lowest_eigenvalue(EIG_TOL))
}

/// Ground state of the half-line Neumann problem (nodal values).
pub fn half_line_ground_state(xi: f64, grid: &Grid1D) -> Result<Eigenpair1D> {
    let (t, scaling) = assemble_half_line_neumann(xi, grid)?;
    let (value, v, residual) = t.lowest_eigenpair(EIG_TOL)?;
    let n = grid.n();
    let mut vector = vec![0.0; n + 1];
    for i in 0..n {
        vector[i] = v[i] * scaling[i];
    }
    let sq: Vec<f64> = vector.iter().map(|x| x * x).collect();
    let norm = grid.trapezoid(&sq).sqrt();
    for x in vector.iter_mut() {
        *x /= norm;
    }
    Ok(Eigenpair1D { value, vector, residual, grid: *grid })
}

/// The reference constant Θ₀: minimum over ξ of the half-line Neumann
/// lowest eigenvalue. Coarse scan over ξ ∈ [0, 2] refined by golden section.
pub fn theta0(grid: &Grid1D) -> Result<f64> {
    let f = |xi: f64| half_line_mu(xi, grid);
    let mut best_xi = 0.0;
    let mut best = f64::INFINITY;
    let mut xi = 0.0;
    while xi <= 2.0 + 1e-12 {
        let v = f(xi)?;
        if v < best {
            best = v;
            best_xi = xi;
        }
        xi += 0.05;
    }
    let (_, value) = golden_min(&f, best_xi - 0.05, best_xi + 0.05, 1e-10)?;
    Ok(value)
}

/// Minimizing ξ of the half-line Neumann problem (needed by diagnostics).
pub fn theta0_minimizer(grid: &Grid1D) -> Result<(f64, f64)> {
    let f = |xi: f64| half_line_mu(xi, grid);
    let mut best_xi = 0.0;
    let mut best = f64::INFINITY;
    let mut xi = 0.0;
    while xi <= 2.0 + 1e-12 {
        let v = f(xi)?;
        if v < best {
            best = v;
            best_xi = xi;
        }
        xi += 0.05;
    }
    golden_min(&f, best_xi - 0.05, best_xi + 0.05, 1e-10)
}

/// Memoized Θ₀ on the given grid. The cache is synchronized; entries are
/// keyed by the exact grid.
pub fn theta0_cached(grid: &Grid1D) -> Result<f64> {
    static CACHE: Mutex<Option<HashMap<(u64, u64, usize), f64>>> = Mutex::new(None);
    let key = (grid.lo().to_bits(), grid.hi().to_bits(), grid.n());
    let mut guard = CACHE.lock().unwrap();
    let map = guard.get_or_insert_with(HashMap::new);
    if let Some(&v) = map.get(&key) {
        return Ok(v);
    }
    drop(guard);
    let v = theta0(grid)?;
    let mut guard = CACHE.lock().unwrap();
    guard.get_or_insert_with(HashMap::new).insert(key, v);
    Ok(v)
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
/// Returns `(argmin, min)` once the bracket width is below `xtol`.
pub fn golden_min<F>(f: &F, mut a: f64, mut b: f64, xtol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let xm = 0.5 * (a + b);
    Ok((xm, f(xm)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(a: f64, m: f64) -> Material {
        Material::new(a, m).unwrap()
    }

    #[test]
    fn uniform_weight_reduction_at_m_one() {
        // m = 1, α = 0: the matrix reduces to the standard stencil
        // (-1/h², 2/h² + (τ-ξ)², -1/h²).
        let grid = Grid1D::new(-2.0, 2.0, 80).unwrap();
        let h = grid.spacing();
        let params = ModelParams::new(mat(1.0, 1.0), 0.0, 0.7).unwrap();
        let t = assemble_model_operator(&params, &grid).unwrap();
        for j in 0..t.n() {
            let tau = grid.node(j + 1);
            let expect = 2.0 / (h * h) + (tau - 0.7) * (tau - 0.7);
            assert!((t.diag[j] - expect).abs() < 1e-9, "diag mismatch at node {j}");
        }
        for e in &t.off {
            assert!((e + 1.0 / (h * h)).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_is_exactly_symmetric() {
        // flux-form construction stores one off-diagonal, so symmetry is
        // structural; verify the left/right face weights are consistent by
        // comparing adjacent rows' couplings around the interface.
        let grid = Grid1D::new(-3.0, 3.0, 120).unwrap();
        let params = ModelParams::new(mat(2.0, 5.0), 0.6, 0.3).unwrap();
        let t = assemble_model_operator(&params, &grid).unwrap();
        let k = grid.interface_index();
        let h = grid.spacing();
        // coupling on the face left of the interface node is 1/(m h²)
        assert!((t.off[k - 2] + 1.0 / (5.0 * h * h)).abs() < 1e-12);
        // coupling on the face right of the interface node is 1/h²
        assert!((t.off[k - 1] + 1.0 / (h * h)).abs() < 1e-12);
    }

    #[test]
    fn full_line_oscillator_ground_energy() {
        // m = 1, α = 0: harmonic oscillator on the line, μ₁ = 1 for any ξ
        let grid = Grid1D::default_line();
        for &xi in &[-2.0, 0.0, 3.0] {
            let mu = mu1_xi(mat(1.0, 1.0), 0.0, xi, &grid).unwrap();
            assert!((mu - 1.0).abs() < 1e-6, "xi = {xi}: mu = {mu}");
        }
    }

    #[test]
    fn deep_well_limit_is_one_minus_alpha() {
        // well centered deep in τ > 0: operator is the oscillator minus α
        let grid = Grid1D::default_line();
        let mu = mu1_xi(mat(1.0, 2.0), 0.7, 8.0, &grid).unwrap();
        assert!((mu - 0.3).abs() < 1e-3, "mu = {mu}");
    }

    #[test]
    fn ground_state_is_sign_definite_and_normalized() {
        let grid = Grid1D::new(-8.0, 8.0, 800).unwrap();
        let pair = ground_state(mat(1.0, 2.0), 0.6, 0.3, &grid).unwrap();
        let sq: Vec<f64> = pair.vector.iter().map(|x| x * x).collect();
        let norm = grid.trapezoid(&sq);
        assert!((norm - 1.0).abs() < 1e-12, "norm² = {norm}");
        assert!(pair.vector.iter().all(|&x| x >= -1e-9), "sign change in ground state");
        assert!(pair.residual <= 1e-6);
    }

    #[test]
    fn grid_convergence_is_second_order() {
        let m = mat(1.0, 2.0);
        let mus: Vec<f64> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&h| {
                let g = Grid1D::with_spacing(-12.0, 12.0, h).unwrap();
                mu1_xi(m, 0.6, 0.5, &g).unwrap()
            })
            .collect();
        let d1 = (mus[0] - mus[1]).abs();
        let d2 = (mus[1] - mus[2]).abs();
        let ratio = d1 / d2;
        assert!((3.5..=4.5).contains(&ratio), "convergence ratio {ratio}");
    }

    #[test]
    fn truncation_is_negligible() {
        let m = mat(1.0, 2.0);
        for &xi in &[-2.0, 0.0, 1.5, 4.0] {
            let g1 = Grid1D::with_spacing(-12.0, 12.0, 0.02).unwrap();
            let g2 = Grid1D::with_spacing(-16.0, 16.0, 0.02).unwrap();
            let a = mu1_xi(m, 0.6, xi, &g1).unwrap();
            let b = mu1_xi(m, 0.6, xi, &g2).unwrap();
            assert!((a - b).abs() < 1e-9, "xi = {xi}: |Δμ| = {}", (a - b).abs());
        }
    }

    #[test]
    fn theta0_bracket_and_value() {
        let grid = Grid1D::default_half_line();
        let v = theta0(&grid).unwrap();
        assert!(v > 0.5 && v < 1.0, "Θ₀ = {v} outside (1/2, 1)");
        // reference value from the independent shooting oracle
        assert!((v - 0.5901).abs() < 5e-4, "Θ₀ = {v}");
    }

    #[test]
    fn theta0_stable_under_refinement() {
        let g1 = Grid1D::half_line(12.0, 1200).unwrap();
        let g2 = g1.refined();
        let g3 = Grid1D::half_line(16.0, 1600).unwrap();
        let v1 = theta0(&g1).unwrap();
        let v2 = theta0(&g2).unwrap();
        let v3 = theta0(&g3).unwrap();
        assert!((v1 - v2).abs() < 5e-4, "h refinement drift {}", (v1 - v2).abs());
        assert!((v1 - v3).abs() < 5e-4, "domain drift {}", (v1 - v3).abs());
    }

    #[test]
    fn neumann_derivative_vanishes_at_zero() {
        let grid = Grid1D::default_half_line();
        let (xi_star, _) = theta0_minimizer(&grid).unwrap();
        let gs = half_line_ground_state(xi_star, &grid).unwrap();
        let h = grid.spacing();
        // second-order one-sided derivative at node 0
        let d = (-3.0 * gs.vector[0] + 4.0 * gs.vector[1] - gs.vector[2]) / (2.0 * h);
        assert!(d.abs() < 10.0 * h * h, "one-sided derivative {d} at h = {h}");
    }

    #[test]
    fn lower_bound_inequality_beta_star() {
        // min over a ξ scan of μ₁ + α >= min(Θ₀, Θ₀/m + (a+1)α) - 5h²
        let grid = Grid1D::default_line();
        let half = Grid1D::default_half_line();
        let th0 = theta0(&half).unwrap();
        for &(a, m, alpha) in &[(1.0, 2.0, 0.7), (0.5, 5.0, 0.6), (2.0, 10.0, 0.62)] {
            let mt = mat(a, m);
            let mut min_mu = f64::INFINITY;
            let mut xi = -2.0;
            while xi <= 6.0 + 1e-12 {
                min_mu = min_mu.min(mu1_xi(mt, alpha, xi, &grid).unwrap());
                xi += 0.05;
            }
            let lhs = min_mu + alpha;
            let rhs = th0.min(th0 / m + (a + 1.0) * alpha);
            let tol = 5.0 * grid.spacing() * grid.spacing();
            assert!(lhs >= rhs - tol, "(a,m,α)=({a},{m},{alpha}): {lhs} < {rhs} - {tol}");
        }
    }
}
