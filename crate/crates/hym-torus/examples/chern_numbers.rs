//! Characteristic classes on a complex 2-torus: curvature-form integrals
//! evaluated by two independent pipelines (form wedge quadrature vs scalar
//! curvature invariants), the trace-adjusted norm decomposition, and the
//! quantitative number inequality for the trivial bundle.

use hym_torus::analysis::{
    c1_against_omega, chern_forms, chern_identity_check, chern_inequality_check,
    t_tensor_check, InequalityTolerances,
};
use hym_torus::config::{Overrides, ScenarioConfig};
use hym_torus::fields::HermitianMetricField;

fn main() {
    let cfg = ScenarioConfig::from_toml(
        r#"
seed = 11
[grid]
n = 2
points = 16
[bundle]
rank = 2
[target]
recipe = "manufactured"
amplitude = 0.2
"#,
    )
    .unwrap();
    let built = cfg.build(&Overrides::default()).unwrap();
    let h = HermitianMetricField::new(built.h_star.unwrap().matmul(built.h0.field())).unwrap();

    // The bundle is trivial, so every total characteristic integral
    // vanishes; this anchors the 2*pi normalization of the forms.
    let forms = chern_forms(&h, &built.theta, &built.g).unwrap();
    let deg = c1_against_omega(&forms, &built.g).unwrap();
    println!("integral of c1 ^ omega      = {:.3e}", deg.norm());
    assert!(deg.norm() < 1e-7);

    // Two-pipeline integral identities: the wedge quadrature of the
    // characteristic forms against the scalar-invariant quadrature.
    let report = chern_identity_check(&h, &built.theta, &built.g).unwrap();
    println!(
        "c1^2: wedge {:.6e}  invariants {:.6e}  residual {:.3e}",
        report.c1_sq_wedge, report.c1_sq_invariant, report.c1_residual
    );
    println!(
        "c2:   wedge {:.6e}  invariants {:.6e}  residual {:.3e}",
        report.c2_wedge, report.c2_invariant, report.c2_residual
    );
    assert!(report.c1_residual < 1e-6);
    assert!(report.c2_residual < 1e-6);
    assert!(report.max_imaginary < 1e-9);

    // Pointwise norm decomposition of the trace-adjusted curvature tensor.
    let t_res = t_tensor_check(&h, &built.theta, &built.g).unwrap();
    println!("trace-adjusted norm residual = {t_res:.3e}");
    assert!(t_res < 1e-9);

    // Number inequality with eigenvalue bounds of the reference tensor.
    let ineq = chern_inequality_check(
        &built.h0,
        &built.theta,
        &built.g,
        &InequalityTolerances::default(),
    )
    .unwrap();
    println!(
        "inequality: lhs {:.3e} <= rhs {:.3e}, eta integral {:.3e}",
        ineq.lhs, ineq.rhs, ineq.eta_integral
    );
    assert!(ineq.inequality_pass && ineq.eta_pass && ineq.spread_pass);
}
