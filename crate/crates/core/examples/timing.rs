// Scratch timing probe (not part of the build).
use snlab_core::grid1d::Grid1D;
use snlab_core::material::Material;
use snlab_core::model1d::ModelParams;
use snlab_core::oracle;
use std::time::Instant;

fn main() {
    let mat = Material::new(1.0, 2.0).unwrap();
    let g = Grid1D::with_spacing(-8.0, 8.0, 0.01).unwrap();
    let p = ModelParams::new(mat, 0.7, 0.5).unwrap();
    let t0 = Instant::now();
    let tm = snlab_core::model1d::assemble_model_operator(&p, &g).unwrap();
    let ev = oracle::tql_eigenvalues(&tm);
    eprintln!("tql n={} : {:?} (lowest {})", tm.n(), t0.elapsed(), ev[0]);

    let t0 = Instant::now();
    let a = oracle::dense_from_tridiag(&tm);
    let lu = oracle::DenseLu::factor(a, tm.n()).unwrap();
    let x = lu.solve(&vec![1.0; tm.n()]);
    eprintln!("dense LU n={} : {:?} (x0 {})", tm.n(), t0.elapsed(), x[0]);

    let t0 = Instant::now();
    let v = oracle::shoot_theta0();
    eprintln!("shoot_theta0: {:?} -> {v}", t0.elapsed());

    let t0 = Instant::now();
    let c = oracle::constants_oracle(mat, 0.7, &g);
    eprintln!("constants_oracle h=0.01: {:?} -> {c:?}", t0.elapsed());
}
