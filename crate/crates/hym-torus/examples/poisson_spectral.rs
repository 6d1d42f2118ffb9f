//! Spectral calculus on the torus: the contraction anchor
//! `Lambda(sqrt(-1) del delbar f) = Delta_g f` and the periodic Poisson
//! solve that underpins the conformal normalizations.

use hym_torus::geometry::BaseMetric;
use hym_torus::grid::{GridSpec, ScalarField};
use hym_torus::Complex64;

fn main() {
    let grid = GridSpec::square(1, 64).unwrap();
    let g = BaseMetric::euclidean(&grid).unwrap();

    // A smooth periodic function and its flat Laplacian.
    let f = ScalarField::from_fn(&grid, |p| {
        Complex64::new((p[0]).cos() * (2.0 * p[1]).sin(), 0.0)
    });
    let lap = g.laplacian(&f).unwrap();

    // Solving the Poisson equation recovers f up to its mean.
    let back = g.solve_poisson(&lap).unwrap();
    let f0 = f.sub(&ScalarField::constant(&grid, f.mean()));
    let err = back.sub(&f0).sup_norm();
    println!("poisson round trip sup error = {err:.3e}");
    assert!(err < 1e-12);

    // The same works against a conformally flat metric e^u g0, where the
    // Laplacian carries the conformal factor.
    let u = ScalarField::from_fn(&grid, |p| Complex64::new(0.3 * (p[0] + p[1]).cos(), 0.0));
    let gc = BaseMetric::conformal(
        &grid,
        vec![Complex64::new(1.0, 0.0)],
        u,
    )
    .unwrap();
    let rhs = gc.laplacian(&f).unwrap();
    // Solvability needs zero mean against the volume density.
    let mean = gc.poisson_mean(&rhs);
    let solvable = rhs.sub(&ScalarField::constant(&grid, mean));
    let back = gc.solve_poisson(&solvable).unwrap();
    let err = gc.laplacian(&back).unwrap().sub(&solvable).sup_norm();
    println!("conformal poisson residual  = {err:.3e}");
    assert!(err < 1e-10);

    println!(
        "classification: flat = {:?}, conformal = {:?}",
        g.classify().unwrap(),
        gc.classify().unwrap()
    );
}
