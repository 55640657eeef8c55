// Scratch exploration of alpha0(1, m) - Theta0 versus m (not part of the build).
use snlab_core::band::{alpha0, band_minimum, ScanSpec};
use snlab_core::grid1d::Grid1D;
use snlab_core::material::Material;
use snlab_core::model1d::theta0;
use snlab_core::oracle;

fn main() {
    let grid = Grid1D::default_line();
    let half = Grid1D::default_half_line();
    let th0 = theta0(&half).unwrap();
    println!("theta0 = {th0:.10}  (shooting oracle: {:.10})", oracle::shoot_theta0());

    for &m in &[50.0, 100.0, 200.0, 400.0, 1000.0] {
        let mat = Material::new(1.0, m).unwrap();
        let a0 = alpha0(mat, &grid, &half).unwrap();
        println!("m = {m:7}: alpha0 = {a0:.8}  gap = {:.6}  gap*sqrt(m) = {:.4}", a0 - th0, (a0 - th0) * m.sqrt());
    }

    // cross-check beta at (1, 100, alpha) against the QL oracle on coarser grids
    let mat = Material::new(1.0, 100.0).unwrap();
    for &alpha in &[0.62, 0.65] {
        let (xi, beta) = band_minimum(mat, alpha, ScanSpec::default_xi(), &grid).unwrap();
        // oracle at the same xi on two grids + Richardson
        let mut vals = Vec::new();
        for &h in &[0.005, 0.0025] {
            let g = Grid1D::with_spacing(-12.0, 12.0, h).unwrap();
            let p = snlab_core::model1d::ModelParams::new(mat, alpha, xi).unwrap();
            let t = snlab_core::model1d::assemble_model_operator(&p, &g).unwrap();
            vals.push(oracle::lowest_eigenvalue_dense(&t));
        }
        let extrap = oracle::richardson2(vals[0], vals[1]);
        println!(
            "alpha = {alpha}: sturm beta = {beta:.10} at xi = {xi:.6}; QL h=0.005: {:.10}, h=0.0025: {:.10}, extrap: {:.10}",
            vals[0], vals[1], extrap
        );
    }
}
