//! Curvature identities of the Higgs connection on a seeded random
//! instance: two independent evaluations of the curvature-trace tensor, the
//! difference identity relating two metrics, the conformal shift law, and
//! rank-1 invisibility of the Higgs field.

use hym_torus::fields::{herm_exp_wrt, HermitianMetricField, MatrixField};
use hym_torus::geometry::BaseMetric;
use hym_torus::grid::GridSpec;
use hym_torus::higgs::{
    chernhiggs_residual, curvature_difference, hym_higgs_tensor, HiggsField,
};
use hym_torus::instances::{
    random_hermitian_field, random_metric, random_real_field, rng_for, standard_higgs,
};
use hym_torus::Complex64;

fn main() {
    let grid = GridSpec::square(1, 64).unwrap();
    let g = BaseMetric::euclidean(&grid).unwrap();
    let mut rng = rng_for(17, 4);
    let h0 = random_metric(&grid, 2, &mut rng, 0.2, 2).unwrap();
    let theta = standard_higgs(&grid, 2, Complex64::new(0.3, 0.1)).unwrap();

    // The tensor from the form pipeline agrees with the direct expansion.
    let two_routes = chernhiggs_residual(&h0, &theta, &g).unwrap();
    println!("two-route tensor residual     = {two_routes:.3e}");
    assert!(two_routes < 1e-10);

    // Difference identity: S^{H h0} - S^{h0} equals the second-order
    // operator applied to the endomorphism H.
    let s = h0.herm_part(&random_hermitian_field(&grid, 2, &mut rng, 0.25, 2));
    let big_h = herm_exp_wrt(&s, &h0).unwrap();
    let h1 = HermitianMetricField::new(big_h.matmul(h0.field())).unwrap();
    let lhs = hym_higgs_tensor(&h1, &theta, &g)
        .unwrap()
        .sub(&hym_higgs_tensor(&h0, &theta, &g).unwrap());
    let rhs = curvature_difference(&big_h, &h0, &theta, &g).unwrap();
    let diff_res = lhs.sub(&rhs).frob_sup_norm();
    println!("difference identity residual  = {diff_res:.3e}");
    assert!(diff_res < 1e-10);

    // Conformal shift law: S^{e^{-f} h} = S^h + Delta_g f Id.
    let f = random_real_field(&grid, &mut rng, 0.3, 2);
    let emf = f.map(|v| Complex64::new((-v.re).exp(), 0.0));
    let h2 = HermitianMetricField::new(h1.field().mul_scalar_field(&emf)).unwrap();
    let shift = MatrixField::scalar_times_identity(&g.laplacian(&f).unwrap(), 2);
    let conf_res = hym_higgs_tensor(&h2, &theta, &g)
        .unwrap()
        .sub(&hym_higgs_tensor(&h1, &theta, &g).unwrap())
        .sub(&shift)
        .frob_sup_norm();
    println!("conformal shift residual      = {conf_res:.3e}");
    assert!(conf_res < 1e-10);

    // Rank 1: the Higgs terms cancel exactly, so the tensor ignores theta.
    let l = random_metric(&grid, 1, &mut rng, 0.3, 2).unwrap();
    let th1 = standard_higgs(&grid, 1, Complex64::new(0.7, -0.2)).unwrap();
    let z1 = HiggsField::zero(&grid, 1);
    let invis = hym_higgs_tensor(&l, &th1, &g)
        .unwrap()
        .sub(&hym_higgs_tensor(&l, &z1, &g).unwrap())
        .frob_sup_norm();
    println!("rank-1 invisibility residual  = {invis:.3e}");
    assert!(invis < 1e-12);
}
