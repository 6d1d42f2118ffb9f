//! End-to-end acceptance gate: one pass/fail line per contract criterion.
//!
//! Two sub-checks are structurally unattainable on a flat torus and are
//! reported as `unattainable` instead of pass/fail: the trace integral of
//! the curvature-trace tensor vanishes for every metric, so neither the
//! target tensor of an exactly solvable instance nor the reference tensor
//! of the comparison theorem can be pointwise positive definite.  The gate
//! verifies that the library reports these hypotheses honestly.

use std::time::Instant;

use num_complex::Complex64;

use hym_torus::analysis::{
    chern_identity_check, chern_inequality_check, t_tensor_check, InequalityTolerances,
};
use hym_torus::config::{Overrides, ScenarioConfig};
use hym_torus::fields::{herm_exp_wrt, HermitianMetricField, MatrixField};
use hym_torus::forms::{Bidegree, FormMatrixField};
use hym_torus::geometry::BaseMetric;
use hym_torus::grid::{GridSpec, ScalarField};
use hym_torus::higgs::{
    bk_full_residual, curvature_difference, hym_higgs_tensor, HiggsField,
};
use hym_torus::instances::{
    random_endo_exp, random_hermitian_field, random_metric, random_real_field, rng_for,
    standard_higgs,
};
use hym_torus::report::without_timings;
use hym_torus::run::{run, Subcommand};
use hym_torus::solver::{
    newton_solve, normalize_trace_curvature, scale_normalize, HiggsProblem,
};

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Gate {
        Gate { failures: Vec::new() }
    }

    fn report(&mut self, criterion: &str, pass: bool, detail: String) {
        let status = if pass { "pass" } else { "FAIL" };
        println!("criterion {criterion}: {status}  ({detail})");
        if !pass {
            self.failures.push(format!("{criterion}: {detail}"));
        }
    }

    fn note(&self, criterion: &str, detail: String) {
        println!("criterion {criterion}: unattainable  ({detail})");
    }
}

/// A smooth random pair (h0, H) with band-limited exponents, plus the
/// standard commuting constant Higgs field.
fn smooth_instance(
    grid: &GridSpec,
    r: usize,
    seed: u64,
    amp: f64,
    max_mode: i64,
) -> (HermitianMetricField, MatrixField, HiggsField) {
    let mut rng = rng_for(seed, 4);
    let h0 = random_metric(grid, r, &mut rng, amp, max_mode).unwrap();
    let s = h0.herm_part(&random_hermitian_field(grid, r, &mut rng, amp, max_mode));
    let big_h = herm_exp_wrt(&s, &h0).unwrap();
    let theta = standard_higgs(grid, r, Complex64::new(0.3, 0.1)).unwrap();
    (h0, big_h, theta)
}

fn criterion_1(gate: &mut Gate) {
    // Curvature difference identity across seeded smooth instances.  The
    // curve base runs at the contract scale N = 64; the surface base runs
    // at N = 16 with exactly resolved mode-1 exponents, since a 64^4 grid
    // is far beyond desk scale (ledgered deviation).
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let (grid, amp, mode) = if seed < 6 {
            (GridSpec::square(1, 64).unwrap(), 0.2, 2)
        } else {
            (GridSpec::square(2, 16).unwrap(), 0.12, 1)
        };
        let g = BaseMetric::euclidean(&grid).unwrap();
        let (h0, big_h, theta) = smooth_instance(&grid, 2, seed, amp, mode);
        let h1 = HermitianMetricField::new(big_h.matmul(h0.field())).unwrap();
        let lhs = hym_higgs_tensor(&h1, &theta, &g)
            .unwrap()
            .sub(&hym_higgs_tensor(&h0, &theta, &g).unwrap());
        let rhs = curvature_difference(&big_h, &h0, &theta, &g).unwrap();
        worst = worst.max(lhs.sub(&rhs).frob_sup_norm());
    }
    let secs = start.elapsed().as_secs_f64();
    gate.report(
        "1 curvature-difference",
        worst <= 1e-7 && secs < 30.0,
        format!("worst sup residual {worst:.2e} over 10 seeds in {secs:.1}s"),
    );
}

fn criterion_2(gate: &mut Gate) {
    // Adjointness pairing, Kaehler case at N = 64 on the curve.
    let grid = GridSpec::square(1, 64).unwrap();
    let g = BaseMetric::euclidean(&grid).unwrap();
    let mut rng = rng_for(2, 4);
    let h0 = random_metric(&grid, 2, &mut rng, 0.2, 2).unwrap();
    let a11 = FormMatrixField::from_components(
        Bidegree::ONE_ONE,
        vec![random_hermitian_field(&grid, 2, &mut rng, 0.5, 2)],
    )
    .unwrap();
    let t01 = FormMatrixField::from_components(
        Bidegree::ZERO_ONE,
        vec![random_hermitian_field(&grid, 2, &mut rng, 0.5, 2)],
    )
    .unwrap();
    let (res_k, scale_k) = bk_full_residual(&h0, &g, &a11, &t01).unwrap();
    let rel_k = res_k / scale_k.max(1.0);

    // Torsion-augmented pairing on one non-Kaehler conformal surface.
    let grid2 = GridSpec::square(2, 16).unwrap();
    let mut rng2 = rng_for(3, 4);
    let u = random_real_field(&grid2, &mut rng2, 0.3, 1);
    let g2 = BaseMetric::conformal(
        &grid2,
        vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ],
        u,
    )
    .unwrap();
    let h2 = random_metric(&grid2, 2, &mut rng2, 0.15, 1).unwrap();
    let a2 = FormMatrixField::from_components(
        Bidegree::ONE_ONE,
        (0..4)
            .map(|_| random_hermitian_field(&grid2, 2, &mut rng2, 0.5, 1))
            .collect(),
    )
    .unwrap();
    let t2 = FormMatrixField::from_components(
        Bidegree::ZERO_ONE,
        (0..2)
            .map(|_| random_hermitian_field(&grid2, 2, &mut rng2, 0.5, 1))
            .collect(),
    )
    .unwrap();
    let (res_t, scale_t) = bk_full_residual(&h2, &g2, &a2, &t2).unwrap();
    let rel_t = res_t / scale_t.max(1.0);

    gate.report(
        "2 adjointness-pairing",
        rel_k <= 1e-7 && rel_t <= 1e-6,
        format!("kahler {rel_k:.2e}, torsion-augmented {rel_t:.2e}"),
    );
}

fn criterion_3(gate: &mut Gate) {
    // Rank-1 invisibility of the Higgs field across 5 seeds.
    let grid = GridSpec::square(1, 32).unwrap();
    let g = BaseMetric::euclidean(&grid).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..5u64 {
        let mut rng = rng_for(seed, 4);
        let h = random_metric(&grid, 1, &mut rng, 0.3, 2).unwrap();
        let theta = standard_higgs(&grid, 1, Complex64::new(0.7, -0.2)).unwrap();
        let zero = HiggsField::zero(&grid, 1);
        let d = hym_higgs_tensor(&h, &theta, &g)
            .unwrap()
            .sub(&hym_higgs_tensor(&h, &zero, &g).unwrap())
            .frob_sup_norm();
        worst = worst.max(d);
    }
    gate.report(
        "3 rank-1-invisibility",
        worst <= 1e-12,
        format!("worst residual {worst:.2e} over 5 seeds"),
    );
}

fn criterion_4(gate: &mut Gate) {
    // Conformal shift law with a trigonometric-polynomial exponent, N = 64.
    let grid = GridSpec::square(1, 64).unwrap();
    let g = BaseMetric::euclidean(&grid).unwrap();
    let (h0, big_h, theta) = smooth_instance(&grid, 2, 4, 0.2, 2);
    let h = HermitianMetricField::new(big_h.matmul(h0.field())).unwrap();
    let f = ScalarField::from_fn(&grid, |p| {
        Complex64::new(0.4 * p[0].cos() + 0.25 * (2.0 * p[1]).sin(), 0.0)
    });
    let emf = f.map(|v| Complex64::new((-v.re).exp(), 0.0));
    let h2 = HermitianMetricField::new(h.field().mul_scalar_field(&emf)).unwrap();
    let shift = MatrixField::scalar_times_identity(&g.laplacian(&f).unwrap(), 2);
    let res = hym_higgs_tensor(&h2, &theta, &g)
        .unwrap()
        .sub(&hym_higgs_tensor(&h, &theta, &g).unwrap())
        .sub(&shift)
        .frob_sup_norm();
    gate.report(
        "4 conformal-shift",
        res <= 1e-8,
        format!("sup residual {res:.2e}"),
    );
}

fn solver_scenario() -> ScenarioConfig {
    ScenarioConfig::from_toml(
        r#"
seed = 21
[grid]
n = 1
points = 32
[bundle]
rank = 2
[target]
recipe = "manufactured"
amplitude = 0.3
[solver]
max_iter = 15
tol_sup = 1e-10
"#,
    )
    .unwrap()
}

fn criterion_5(gate: &mut Gate) {
    let start = Instant::now();
    let cfg = solver_scenario();
    let built = cfg.build(&Overrides::default()).unwrap();
    let h_star = built.h_star.clone().unwrap();
    let problem = HiggsProblem::new(built.g, built.h0, built.theta, built.p).unwrap();

    // The contract asks for the target to be verified positive definite;
    // on a flat torus its trace integral vanishes for every metric, so no
    // exactly solvable target can be PD.  Report it, don't fake it.
    let diag = problem.diagnostics().unwrap();
    gate.note(
        "5 target-positivity",
        format!(
            "target eig range [{:.2e}, {:.2e}], trace integral {:.1e}: a solvable target always has indefinite sign on the torus",
            diag.eig_min, diag.eig_max, diag.trace_integral
        ),
    );

    let opts = cfg.solver.newton_options();
    let a = newton_solve(&problem, &opts, None).unwrap();
    // Second, distinct initial guess.
    let mut rng = rng_for(99, 4);
    let start_h = random_endo_exp(problem.h0.grid(), &problem.h0, &mut rng, 0.15, 2).unwrap();
    let b = newton_solve(&problem, &opts, Some(start_h)).unwrap();

    let norm_a = scale_normalize(a.big_h.as_ref().unwrap(), &problem.g).unwrap();
    let norm_b = scale_normalize(b.big_h.as_ref().unwrap(), &problem.g).unwrap();
    let truth = scale_normalize(&h_star, &problem.g).unwrap();
    let recovery = norm_a.sub(&truth).frob_sup_norm();
    let uniqueness = norm_a.sub(&norm_b).frob_sup_norm();
    let secs = start.elapsed().as_secs_f64();
    gate.report(
        "5 solver-recovery",
        a.converged
            && b.converged
            && a.iterations.len() <= 15
            && a.final_residual_sup <= 1e-10
            && recovery <= 1e-6
            && uniqueness <= 1e-5
            && secs < 60.0,
        format!(
            "{} iters, residual {:.2e}, recovery {recovery:.2e}, two-start agreement {uniqueness:.2e}, {secs:.1}s",
            a.iterations.len(),
            a.final_residual_sup
        ),
    );
}

fn criterion_6(gate: &mut Gate) {
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
[solver]
tol_sup = 1e-11
[flow]
dt = 0.2
max_steps = 20000
tol_sup = 1e-9
"#,
    )
    .unwrap();
    let summary = run(Subcommand::Flow, &cfg, &Overrides::default(), None).unwrap();
    let v = summary.to_value();
    let agreement = v["results"]["cross_solver_agreement_sup"].as_f64().unwrap();
    gate.report(
        "6 cross-solver-agreement",
        summary.pass() && agreement <= 1e-6,
        format!("flow vs newton fixed points agree within {agreement:.2e}"),
    );
}

fn criterion_7(gate: &mut Gate) {
    // Dominated targets with a PD gap require a strictly negative trace
    // integral, so the comparison scenario is never exactly solvable and
    // the theorem's positivity hypothesis never holds on the torus.  The
    // faithful behavior is a named hypothesis violation on every seed.
    gate.note(
        "7 comparison-conclusion",
        "reference tensor is never pointwise PD on the torus (zero trace integral), so the \
         comparison conclusion cannot be exercised; checking the gate instead"
            .to_string(),
    );
    let mut all_gated = true;
    let mut gaps = Vec::new();
    for seed in 0..5u64 {
        let toml = format!(
            r#"
seed = {seed}
[grid]
n = 1
points = 32
[bundle]
rank = 2
[target]
recipe = "omega-shift"
epsilon = -0.01
"#
        );
        let cfg = ScenarioConfig::from_toml(&toml).unwrap();
        let s = run(Subcommand::Compare, &cfg, &Overrides::default(), None).unwrap();
        all_gated &= s.hypothesis_violation() == Some("positive-reference-tensor");
        all_gated &= s.exit_code() == 3;
        let v = s.to_value();
        let gap = v["results"]["domination_gap_min"].as_f64().unwrap();
        all_gated &= gap >= 1e-3;
        gaps.push(gap);
    }
    gate.report(
        "7 comparison-hypothesis-gate",
        all_gated,
        format!(
            "5 seeds, domination gap >= {:.2e}, each run names the unmet positivity hypothesis (exit 3)",
            gaps.iter().cloned().fold(f64::INFINITY, f64::min)
        ),
    );
}

fn criterion_8(gate: &mut Gate) {
    let grid = GridSpec::square(1, 64).unwrap();
    let g = BaseMetric::euclidean(&grid).unwrap();
    let (h0, big_h, theta) = smooth_instance(&grid, 2, 13, 0.25, 2);
    let h = HermitianMetricField::new(big_h.matmul(h0.field())).unwrap();
    let (f, lambda0) = normalize_trace_curvature(&h, &theta, &g).unwrap();
    let emf = f.map(|v| Complex64::new((-v.re).exp(), 0.0));
    let h_tilde = HermitianMetricField::new(h.field().mul_scalar_field(&emf)).unwrap();
    let kappa = hym_higgs_tensor(&h_tilde, &theta, &g).unwrap().trace();
    let flat = kappa
        .sub(&ScalarField::constant(kappa.grid(), kappa.mean()))
        .sup_norm();
    let mean_err = (kappa.mean().re - lambda0).abs();
    gate.report(
        "8 trace-normalization",
        flat <= 1e-7 && mean_err <= 1e-9,
        format!("normalized trace constant within {flat:.2e}, mean level error {mean_err:.2e}"),
    );
}

fn criterion_9(gate: &mut Gate) {
    let grid = GridSpec::square(2, 32).unwrap();
    let g = BaseMetric::euclidean(&grid).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for r in [1usize, 2] {
        let (h0, big_h, theta) = smooth_instance(&grid, r, 11 + r as u64, 0.15, 1);
        let h = HermitianMetricField::new(big_h.matmul(h0.field())).unwrap();
        let idrep = chern_identity_check(&h, &theta, &g).unwrap();
        let t_res = t_tensor_check(&h, &theta, &g).unwrap();
        let ineq =
            chern_inequality_check(&h0, &theta, &g, &InequalityTolerances::default()).unwrap();
        pass &= idrep.c1_residual <= 1e-6
            && idrep.c2_residual <= 1e-6
            && idrep.max_imaginary <= 1e-7
            && t_res <= 1e-9
            && ineq.eta_integral >= -1e-9
            && ineq.spread_violation <= 1e-12
            && ineq.inequality_pass
            && idrep.c1_sq_wedge.abs() <= 1e-7;
        details.push(format!(
            "r={r}: c1 {:.1e}, c2 {:.1e}, T {:.1e}, eta {:.1e}, spread {:.1e}",
            idrep.c1_residual, idrep.c2_residual, t_res, ineq.eta_integral,
            ineq.spread_violation
        ));
    }
    gate.report("9 characteristic-class-suite", pass, details.join("; "));
}

fn criterion_10(gate: &mut Gate) {
    let cfg = solver_scenario();
    let a = run(Subcommand::Solve, &cfg, &Overrides::default(), None).unwrap();
    let b = run(Subcommand::Solve, &cfg, &Overrides::default(), None).unwrap();
    let identical = without_timings(&a.to_value()) == without_timings(&b.to_value());
    let c = run(
        Subcommand::Solve,
        &cfg,
        &Overrides {
            seed: Some(22),
            grid_points: None,
        },
        None,
    )
    .unwrap();
    let distinct = without_timings(&a.to_value()) != without_timings(&c.to_value());
    gate.report(
        "10 determinism",
        identical && distinct,
        format!("repeat runs identical modulo timings: {identical}; seed change alters summary: {distinct}"),
    );
}

#[test]
fn acceptance() {
    let mut gate = Gate::new();
    criterion_1(&mut gate);
    criterion_2(&mut gate);
    criterion_3(&mut gate);
    criterion_4(&mut gate);
    criterion_5(&mut gate);
    criterion_6(&mut gate);
    criterion_7(&mut gate);
    criterion_8(&mut gate);
    criterion_9(&mut gate);
    criterion_10(&mut gate);
    assert!(
        gate.failures.is_empty(),
        "acceptance failures:\n{}",
        gate.failures.join("\n")
    );
}
