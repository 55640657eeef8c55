// Regenerate the golden values frozen in the test suite, through the
// oracle path only (QL eigenvalues, dense LU resolvent, RK4 shooting),
// Richardson-extrapolated over grid spacings where stated.
use snlab_core::grid1d::Grid1D;
use snlab_core::material::Material;
use snlab_core::oracle;

fn main() {
    // Θ₀ from shooting
    println!("theta0_shooting = {:.10}", oracle::shoot_theta0());

    // mu1(a=1, m=2, α=0.7, ξ=0.5), Richardson over h ∈ {0.02, 0.01, 0.005}
    let mat12 = Material::new(1.0, 2.0).unwrap();
    let mut vals = Vec::new();
    for &h in &[0.02, 0.01, 0.005] {
        let g = Grid1D::with_spacing(-12.0, 12.0, h).unwrap();
        vals.push(oracle::mu1_oracle(mat12, 0.7, 0.5, &g));
    }
    let r1 = oracle::richardson2(vals[0], vals[1]);
    let r2 = oracle::richardson2(vals[1], vals[2]);
    println!("mu1(1,2,0.7;xi=0.5): h=0.02: {:.12}  h=0.01: {:.12}  h=0.005: {:.12}", vals[0], vals[1], vals[2]);
    println!("  richardson(0.02,0.01) = {r1:.12}   richardson(0.01,0.005) = {r2:.12}");

    // constants bundle at (1, 2, 0.7), oracle at h = 0.005 and 0.0025 + Richardson
    for &(a, m, alpha, label) in &[(1.0, 2.0, 0.7, "(1,2,0.7)")] {
        let mat = Material::new(a, m).unwrap();
        let g1 = Grid1D::with_spacing(-8.0, 8.0, 0.01).unwrap();
        let g2 = Grid1D::with_spacing(-8.0, 8.0, 0.005).unwrap();
        let c1 = oracle::constants_oracle(mat, alpha, &g1);
        let c2 = oracle::constants_oracle(mat, alpha, &g2);
        println!("constants {label}:");
        println!("  h=0.01  : {c1:?}");
        println!("  h=0.005 : {c2:?}");
        println!(
            "  extrap  : xi*={:.10} beta={:.10} mu''={:.8} C1={:.10} b1={:.10} I2={:.10} C2={:.10}",
            oracle::richardson2(c1.xi_star, c2.xi_star),
            oracle::richardson2(c1.beta, c2.beta),
            oracle::richardson2(c1.mu_second, c2.mu_second),
            oracle::richardson2(c1.c1, c2.c1),
            oracle::richardson2(c1.b1, c2.b1),
            oracle::richardson2(c1.i2, c2.i2),
            oracle::richardson2(c1.c2, c2.c2),
        );
    }
}
