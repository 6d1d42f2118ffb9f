//! Cross-solver agreement: a damped heat flow and the Newton iteration are
//! driven to the same prescribed-tensor equation and must land on the same
//! fixed point up to the scale gauge.

use hym_torus::config::{Overrides, ScenarioConfig};
use hym_torus::solver::{
    heat_flow, newton_solve, scale_normalize, FlowOptions, HiggsProblem, NewtonOptions,
};

fn main() {
    let cfg = ScenarioConfig::from_toml(
        r#"
seed = 7
[grid]
n = 1
points = 32
[bundle]
rank = 2
[target]
recipe = "manufactured"
amplitude = 0.15
"#,
    )
    .unwrap();
    let built = cfg.build(&Overrides::default()).unwrap();
    let problem = HiggsProblem::new(built.g, built.h0, built.theta, built.p).unwrap();

    let flow = heat_flow(
        &problem,
        &FlowOptions {
            dt: 0.2,
            max_steps: 20000,
            tol_sup: 1e-9,
            ..FlowOptions::default()
        },
    )
    .unwrap();
    println!(
        "flow: {} steps, residual {:.3e}",
        flow.steps, flow.final_residual_sup
    );
    assert!(flow.converged);

    let newton = newton_solve(
        &problem,
        &NewtonOptions {
            tol_sup: 1e-11,
            ..NewtonOptions::default()
        },
        None,
    )
    .unwrap();
    println!(
        "newton: {} iterations, residual {:.3e}",
        newton.iterations.len(),
        newton.final_residual_sup
    );
    assert!(newton.converged);

    let agreement = scale_normalize(&flow.big_h.unwrap(), &problem.g)
        .unwrap()
        .sub(&scale_normalize(&newton.big_h.unwrap(), &problem.g).unwrap())
        .frob_sup_norm();
    println!("fixed points agree within {agreement:.3e}");
    assert!(agreement < 1e-6);
}
