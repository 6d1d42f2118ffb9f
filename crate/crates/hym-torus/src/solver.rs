//! Newton-Krylov and heat-flow solvers for the prescribed-tensor equation
//! `S^{H h0} = P`, plus the conformal trace-curvature normalization.
//!
//! The linear model at the current iterate `h1 = H h0` is
//! `L(Psi) = Lambda sqrt(-1) D''(D'^{h1} Psi) + Omega_1 Psi` with
//! `Omega_1 = S^{h1}`; the exact directional derivative of the residual along
//! `(Id + t Psi) H` is `L(Psi) - Omega_1 Psi`, so `L` is a zeroth-order
//! stabilization of the true Jacobian (it maps `Id` to `Omega_1` instead of
//! `0`, removing the global scale gauge from the kernel).

use crate::error::{Error, Result};
use crate::fields::{self, HermitianMetricField, MatrixField};
use crate::forms::{Bidegree, FormMatrixField};
use crate::geometry::BaseMetric;
use crate::grid::ScalarField;
use crate::higgs::{bracket_action, dprime, hym_higgs_tensor, HiggsField};
use num_complex::Complex64;
use serde::Serialize;

/// A prescribed-tensor problem: find `H` (h0-Hermitian, positive definite)
/// with `S^{H h0} = P`.
pub struct HiggsProblem {
    pub g: BaseMetric,
    pub h0: HermitianMetricField,
    pub theta: HiggsField,
    pub p: MatrixField,
}

/// Structural diagnostics of a problem instance.  Positivity of the target is
/// reported, not required: on the flat torus the trace integral of the tensor
/// vanishes for every metric, so no exactly-solvable instance has a
/// sign-definite target.
#[derive(Debug, Clone, Serialize)]
pub struct ProblemDiagnostics {
    /// Deviation of `P` from h0-Hermitian symmetry.
    pub herm_defect: f64,
    /// `integral of tr(P) dvol`; must vanish for the equation to be solvable.
    pub trace_integral: f64,
    /// Pointwise eigenvalue range of `P` with respect to `h0`.
    pub eig_min: f64,
    pub eig_max: f64,
    /// Whether `P` is pointwise positive definite.
    pub positive_definite: bool,
}

impl HiggsProblem {
    pub fn new(
        g: BaseMetric,
        h0: HermitianMetricField,
        theta: HiggsField,
        p: MatrixField,
    ) -> Result<Self> {
        g.grid().same_grid(h0.grid())?;
        g.grid().same_grid(p.grid())?;
        if p.rank() != h0.rank() || theta.rank() != h0.rank() {
            return Err(Error::ShapeMismatch("problem rank mismatch".into()));
        }
        // Note: P is Hermitian with respect to the (unknown) solution
        // metric, not h0, so Hermitian symmetry is reported in the
        // diagnostics rather than enforced here.
        Ok(HiggsProblem { g, h0, theta, p })
    }

    pub fn diagnostics(&self) -> Result<ProblemDiagnostics> {
        // Eigenvalue range of the h0-Hermitian part of P.
        let sym = self.h0.herm_part(&self.p);
        let (lo, hi) = fields::herm_eig_bounds(&sym, &self.h0)?;
        let (lo, hi) = (lo.min_real(), hi.max_real());
        let tr = self
            .p
            .trace()
            .integrate(&self.g.volume_density())?;
        Ok(ProblemDiagnostics {
            herm_defect: self.h0.herm_defect_of(&self.p),
            trace_integral: tr.re,
            eig_min: lo,
            eig_max: hi,
            positive_definite: lo > 0.0,
        })
    }

    /// True residual `S^{H h0} - P`.
    pub fn residual(&self, big_h: &MatrixField) -> Result<MatrixField> {
        let h1 = HermitianMetricField::new(big_h.matmul(self.h0.field()))?;
        Ok(hym_higgs_tensor(&h1, &self.theta, &self.g)?.sub(&self.p))
    }

    /// Symmetrized residual `S^{h1} - herm_{h1}(P)` together with `h1`.
    /// `S^{h1}` is h1-Hermitian, so symmetrizing the target keeps the whole
    /// iteration inside the h1-Hermitian subspace; at a true solution the
    /// anti-Hermitian part of `P` vanishes and both residuals agree.
    pub fn sym_residual(
        &self,
        big_h: &MatrixField,
    ) -> Result<(MatrixField, HermitianMetricField)> {
        let h1 = HermitianMetricField::new(big_h.matmul(self.h0.field()))?;
        let s = hym_higgs_tensor(&h1, &self.theta, &self.g)?;
        let res = s.sub(&h1.herm_part(&self.p));
        Ok((res, h1))
    }

    /// L2 norm of an endomorphism field with respect to `h0` and `dvol`.
    pub fn l2_norm(&self, a: &MatrixField) -> f64 {
        let ip = self.h0.inner(a, a);
        ip.integrate(&self.g.volume_density())
            .map(|v| v.re.max(0.0).sqrt())
            .unwrap_or(f64::NAN)
    }
}

/// `L(Psi) = Lambda sqrt(-1) D''(D'^{h1} Psi) + Omega_1 Psi`.
pub fn linearized_apply(
    g: &BaseMetric,
    h1: &HermitianMetricField,
    theta: &HiggsField,
    omega1: &MatrixField,
    psi: &MatrixField,
) -> Result<MatrixField> {
    let second_order = second_order_apply(g, h1, theta, psi)?;
    Ok(second_order.add(&omega1.matmul(psi)))
}

/// `Lambda sqrt(-1) D''(D'^{h1} Psi)`: the exact directional derivative of
/// `H -> S^{H h0}` along `(Id + t Psi) H` at `t = 0`.
pub fn second_order_apply(
    g: &BaseMetric,
    h1: &HermitianMetricField,
    theta: &HiggsField,
    psi: &MatrixField,
) -> Result<MatrixField> {
    let dpsi = dprime(&FormMatrixField::scalar(psi.clone()), h1, theta)?;
    let mut part11: Option<FormMatrixField> = None;
    if let Some(t10) = dpsi.part(Bidegree::TEN) {
        part11 = Some(t10.dbar()?);
    }
    if let Some(t01) = dpsi.part(Bidegree::ZERO_ONE) {
        let contrib = bracket_action(t01, &theta.form())?;
        part11 = Some(match part11 {
            Some(x) => x.add(&contrib)?,
            None => contrib,
        });
    }
    match part11 {
        Some(x) => g.lambda_contract(&x),
        None => Ok(MatrixField::zeros(h1.grid(), h1.rank())),
    }
}

/// Entrywise Fourier solve of `(Delta_const - sigma) x = v`, used as the
/// GMRES preconditioner (`Delta_const` is the constant-coefficient part of
/// the base Laplacian; the symbol `lap(k) - sigma` never vanishes for
/// `sigma > 0`).
fn precondition(g: &BaseMetric, sigma: f64, v: &MatrixField) -> Result<MatrixField> {
    let grid = v.grid().clone();
    let r = v.rank();
    let npts = grid.total_points();
    let sym = g.laplacian_symbol();
    let mut out = MatrixField::zeros(&grid, r);
    for e in 0..r * r {
        let mut entry = ScalarField::zeros(&grid);
        for p in 0..npts {
            entry.data_mut()[p] = v.raw_data()[p * r * r + e];
        }
        let solved = entry.solve_fourier(|k| sym(k) - sigma, false)?;
        for p in 0..npts {
            out.raw_data_mut()[p * r * r + e] = solved.data()[p];
        }
    }
    Ok(out)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn nrm(a: &[Complex64]) -> f64 {
    dot(a, a).re.max(0.0).sqrt()
}

/// Restarted GMRES on flattened matrix fields with right preconditioning.
/// Returns `(solution, relative_residual, matvec_count)`.
fn gmres<A, M>(
    apply: A,
    precond: M,
    b: &[Complex64],
    restart: usize,
    max_matvecs: usize,
    tol: f64,
) -> Result<(Vec<Complex64>, f64, usize)>
where
    A: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
    M: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let nn = b.len();
    let bnorm = nrm(b).max(f64::MIN_POSITIVE);
    let mut x = vec![Complex64::default(); nn];
    let mut matvecs = 0usize;
    let mut rel = 1.0;
    'outer: while matvecs < max_matvecs {
        // r = b - A x.
        let ax = apply(&x)?;
        matvecs += 1;
        let r: Vec<Complex64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let beta = nrm(&r);
        rel = beta / bnorm;
        if rel < tol {
            break;
        }
        let m = restart.min(max_matvecs - matvecs).max(1);
        let mut basis: Vec<Vec<Complex64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut hess = vec![vec![Complex64::default(); m]; m + 1];
        let mut cs = vec![Complex64::default(); m];
        let mut sn = vec![Complex64::default(); m];
        let mut gvec = vec![Complex64::default(); m + 1];
        gvec[0] = Complex64::new(beta, 0.0);
        let mut k_used = 0usize;
        for k in 0..m {
            let z = precond(&basis[k])?;
            let mut w = apply(&z)?;
            matvecs += 1;
            // Modified Gram-Schmidt.
            for i in 0..=k {
                let hik = dot(&basis[i], &w);
                hess[i][k] = hik;
                for (we, be) in w.iter_mut().zip(&basis[i]) {
                    *we -= hik * be;
                }
            }
            let hkk = nrm(&w);
            hess[k + 1][k] = Complex64::new(hkk, 0.0);
            // Apply stored Givens rotations to the new column.
            for i in 0..k {
                let t = cs[i].conj() * hess[i][k] + sn[i].conj() * hess[i + 1][k];
                hess[i + 1][k] = -sn[i] * hess[i][k] + cs[i] * hess[i + 1][k];
                hess[i][k] = t;
            }
            // New rotation annihilating hess[k+1][k]: with a = hess[k][k] and
            // real b = hkk, take c = a/r, s = b/r, r = sqrt(|a|^2 + b^2).
            let a = hess[k][k];
            let rr = (a.norm_sqr() + hkk * hkk).sqrt();
            if rr > 0.0 {
                cs[k] = a / rr;
                sn[k] = Complex64::new(hkk / rr, 0.0);
            } else {
                cs[k] = Complex64::new(1.0, 0.0);
                sn[k] = Complex64::default();
            }
            hess[k][k] = Complex64::new(rr, 0.0);
            hess[k + 1][k] = Complex64::default();
            let t = cs[k].conj() * gvec[k];
            gvec[k + 1] = -sn[k] * gvec[k];
            gvec[k] = t;
            k_used = k + 1;
            rel = gvec[k + 1].norm() / bnorm;
            if hkk > 0.0 {
                basis.push(w.iter().map(|v| v / hkk).collect());
            }
            if rel < tol || hkk == 0.0 || matvecs >= max_matvecs {
                break;
            }
        }
        // Back substitution on the k_used x k_used triangular system.
        let mut y = vec![Complex64::default(); k_used];
        for i in (0..k_used).rev() {
            let mut s = gvec[i];
            for j in i + 1..k_used {
                s -= hess[i][j] * y[j];
            }
            let d = hess[i][i];
            if d.norm() < 1e-300 {
                return Err(Error::Numerical("GMRES breakdown".into()));
            }
            y[i] = s / d;
        }
        // x += M^{-1} (V y).
        let mut vy = vec![Complex64::default(); nn];
        for (j, yj) in y.iter().enumerate() {
            for (ve, be) in vy.iter_mut().zip(&basis[j]) {
                *ve += yj * be;
            }
        }
        let z = precond(&vy)?;
        for (xe, ze) in x.iter_mut().zip(&z) {
            *xe += ze;
        }
        if rel < tol {
            break 'outer;
        }
    }
    Ok((x, rel, matvecs))
}

/// Per-iteration record of the Newton solve.
#[derive(Debug, Clone, Serialize)]
pub struct NewtonIter {
    pub residual_sup: f64,
    pub residual_l2: f64,
    pub step_alpha: f64,
    pub gmres_rel: f64,
    pub gmres_matvecs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutcome {
    pub converged: bool,
    pub iterations: Vec<NewtonIter>,
    /// Sup norm of the true residual `S - P` at the final iterate.
    pub final_residual_sup: f64,
    /// Sup norm of the symmetrized residual `S - herm_{h1}(P)`; this is the
    /// quantity the iteration drives to zero, and it equals the true residual
    /// whenever the instance is exactly solvable.
    pub final_symmetrized_residual: f64,
    pub message: String,
    #[serde(skip)]
    pub big_h: Option<MatrixField>,
}

#[derive(Debug, Clone)]
pub struct NewtonOptions {
    pub max_iter: usize,
    pub tol_sup: f64,
    pub gmres_restart: usize,
    pub gmres_max_matvecs: usize,
    pub gmres_tol: f64,
    pub min_alpha: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 40,
            tol_sup: 1e-9,
            gmres_restart: 40,
            gmres_max_matvecs: 400,
            gmres_tol: 1e-10,
            min_alpha: 1.0 / 256.0,
        }
    }
}

fn flatten(m: &MatrixField) -> Vec<Complex64> {
    m.raw_data().to_vec()
}

fn unflatten(template: &MatrixField, v: Vec<Complex64>) -> MatrixField {
    MatrixField::from_raw(template.grid(), template.rank(), v).unwrap()
}

/// Damped Newton-Krylov iteration from `H = Id` (or a supplied start).
pub fn newton_solve(
    problem: &HiggsProblem,
    opts: &NewtonOptions,
    start: Option<MatrixField>,
) -> Result<SolveOutcome> {
    let grid = problem.h0.grid().clone();
    let r = problem.h0.rank();
    // Parametrize H = exp_{h0}(S) with S an h0-Hermitian field: every
    // iterate is Hermitian positive definite by construction, and the
    // fixed point of the update S <- S + alpha Herm(Psi) is exactly a zero
    // of the residual (Psi vanishes if and only if the residual does).
    let mut s_field = match start {
        Some(h) => fields::herm_log_wrt(&h, &problem.h0)?,
        None => MatrixField::zeros(&grid, r),
    };
    let mut big_h = fields::herm_exp_wrt(&s_field, &problem.h0)?;
    let mut iterations = Vec::new();
    let mut res = problem.residual(&big_h)?;
    let mut res_sup = res.frob_sup_norm();
    for _ in 0..opts.max_iter {
        let res_l2 = problem.l2_norm(&res);
        if res_sup < opts.tol_sup {
            return finish(problem, big_h, iterations, true, "converged".into());
        }
        let h1 = HermitianMetricField::new(big_h.matmul(problem.h0.field()))?;
        let omega1 = res.add(&problem.p);
        // Positive shift for the preconditioner from the mean of tr Omega_1.
        let sigma = {
            let m = omega1.trace().mean().re / r as f64;
            m.abs().max(1e-2)
        };
        let rhs = flatten(&res.scale(Complex64::new(-1.0, 0.0)));
        let apply = |v: &[Complex64]| -> Result<Vec<Complex64>> {
            let psi = unflatten(&res, v.to_vec());
            Ok(flatten(&second_order_apply(
                &problem.g,
                &h1,
                &problem.theta,
                &psi,
            )?))
        };
        let precond =
            |v: &[Complex64]| -> Result<Vec<Complex64>> {
                Ok(flatten(&precondition(
                    &problem.g,
                    sigma,
                    &unflatten(&res, v.to_vec()),
                )?))
            };
        let (sol, gmres_rel, matvecs) = gmres(
            apply,
            precond,
            &rhs,
            opts.gmres_restart,
            opts.gmres_max_matvecs,
            opts.gmres_tol,
        )?;
        // Step direction in S-space: the h0-Hermitian part of Psi.
        let psi = problem.h0.herm_part(&unflatten(&res, sol));
        // Damped update S <- S + alpha Herm(Psi), backtracking on the
        // residual sup norm.  The linearized operator does not commute with
        // the metric adjoint, so projecting the linear solve onto Hermitian
        // fields tends to halve the effective step; trying alpha = 2 first
        // recovers the full Newton correction when that happens.
        let mut alpha = 2.0;
        let mut accepted = false;
        while alpha >= opts.min_alpha {
            let cand_s = s_field.add(&psi.scale(Complex64::new(alpha, 0.0)));
            if let Ok(cand) = fields::herm_exp_wrt(&cand_s, &problem.h0) {
                if let Ok(new_res) = problem.residual(&cand) {
                    let new_sup = new_res.frob_sup_norm();
                    if new_sup < res_sup * (1.0 - 1e-4 * alpha) {
                        iterations.push(NewtonIter {
                            residual_sup: res_sup,
                            residual_l2: res_l2,
                            step_alpha: alpha,
                            gmres_rel,
                            gmres_matvecs: matvecs,
                        });
                        s_field = cand_s;
                        big_h = cand;
                        res = new_res;
                        res_sup = new_sup;
                        accepted = true;
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return finish(
                problem,
                big_h,
                iterations,
                false,
                "line search stalled".into(),
            );
        }
    }
    let converged = res_sup < opts.tol_sup;
    let message = if converged {
        "converged".to_string()
    } else {
        "iteration budget exhausted".to_string()
    };
    finish(problem, big_h, iterations, converged, message)
}

fn finish(
    problem: &HiggsProblem,
    big_h: MatrixField,
    iterations: Vec<NewtonIter>,
    converged: bool,
    message: String,
) -> Result<SolveOutcome> {
    let true_res = problem.residual(&big_h)?.frob_sup_norm();
    let (sym_res, _) = problem.sym_residual(&big_h)?;
    Ok(SolveOutcome {
        converged,
        final_residual_sup: true_res,
        final_symmetrized_residual: sym_res.frob_sup_norm(),
        iterations,
        message,
        big_h: Some(big_h),
    })
}

#[derive(Debug, Clone)]
pub struct FlowOptions {
    pub dt: f64,
    pub max_steps: usize,
    pub tol_sup: f64,
    pub record_every: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            dt: 0.05,
            max_steps: 5000,
            tol_sup: 1e-7,
            record_every: 25,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowOutcome {
    pub converged: bool,
    pub steps: usize,
    pub dt_final: f64,
    /// `(step, sup residual)` samples along the trajectory.
    pub trajectory: Vec<(usize, f64)>,
    pub final_residual_sup: f64,
    #[serde(skip)]
    pub big_h: Option<MatrixField>,
}

/// Explicit heat-flow integration `dH/dt = -(S^{H h0} - P) H` with step
/// halving when the residual increases.
pub fn heat_flow(problem: &HiggsProblem, opts: &FlowOptions) -> Result<FlowOutcome> {
    let grid = problem.h0.grid().clone();
    let r = problem.h0.rank();
    let mut s_field = MatrixField::zeros(&grid, r);
    let mut big_h = MatrixField::identity(&grid, r);
    let mut dt = opts.dt;
    let mut res = problem.residual(&big_h)?;
    let mut res_sup = res.frob_sup_norm();
    let mut trajectory = vec![(0usize, res_sup)];
    let mut steps = 0usize;
    while steps < opts.max_steps && res_sup > opts.tol_sup {
        let cand_s = s_field.sub(
            &problem
                .h0
                .herm_part(&res)
                .scale(Complex64::new(dt, 0.0)),
        );
        if let Ok(cand) = fields::herm_exp_wrt(&cand_s, &problem.h0) {
            if let Ok(new_res) = problem.residual(&cand) {
                let new_sup = new_res.frob_sup_norm();
                if new_sup <= res_sup * (1.0 + 1e-12) {
                    s_field = cand_s;
                    big_h = cand;
                    res = new_res;
                    res_sup = new_sup;
                    steps += 1;
                    if steps % opts.record_every == 0 {
                        trajectory.push((steps, res_sup));
                    }
                    continue;
                }
            }
        }
        dt *= 0.5;
        if dt < 1e-12 {
            break;
        }
    }
    trajectory.push((steps, res_sup));
    Ok(FlowOutcome {
        converged: res_sup <= opts.tol_sup,
        steps,
        dt_final: dt,
        trajectory,
        final_residual_sup: res_sup,
        big_h: Some(big_h),
    })
}

/// Conformal normalization of the trace curvature: returns `(f, lambda0)`
/// such that `h~ = e^{-f} h` has `tr S^{h~} = lambda0` constant.  This is the
/// mechanical core of the degree normalization; it has no sign hypothesis.
pub fn normalize_trace_curvature(
    h: &HermitianMetricField,
    theta: &HiggsField,
    g: &BaseMetric,
) -> Result<(ScalarField, f64)> {
    let r = h.rank() as f64;
    let kappa = hym_higgs_tensor(h, theta, g)?.trace();
    let lambda0 = g.poisson_mean(&kappa);
    // tr S^{e^{-f} h} = tr S^h + r Delta_g f, so Delta_g f = (lambda0 - kappa)/r.
    let rhs = kappa
        .scale(Complex64::new(-1.0, 0.0))
        .add(&ScalarField::constant(kappa.grid(), lambda0))
        .scale(Complex64::new(1.0 / r, 0.0));
    let f = g.solve_poisson(&rhs)?;
    Ok((f, lambda0.re))
}

/// Degree-gated normalization: requires the degree `integral of tr S^h dvol`
/// to be strictly positive, then rescales conformally to constant trace
/// curvature.  A non-positive degree is a named hypothesis violation.
pub fn gauduchon_normalize(
    h: &HermitianMetricField,
    theta: &HiggsField,
    g: &BaseMetric,
) -> Result<(HermitianMetricField, f64)> {
    let kappa = hym_higgs_tensor(h, theta, g)?.trace();
    let degree = kappa.integrate(&g.volume_density())?.re;
    if degree <= 1e-10 {
        return Err(Error::hypothesis(
            "positive-degree",
            format!("integral of tr S^h dvol = {degree:.3e} is not positive"),
        ));
    }
    let (f, _lambda0) = normalize_trace_curvature(h, theta, g)?;
    let emf = f.map(|v| Complex64::new((-v.re).exp(), 0.0));
    let h_new = HermitianMetricField::new(h.field().mul_scalar_field(&emf))?;
    let lam = hym_higgs_tensor(&h_new, theta, g)?
        .trace()
        .mean()
        .re;
    Ok((h_new, lam))
}

/// Remove the global scale gauge: rescale `H` so that the volume mean of
/// `log det H` vanishes (solutions come in families `lambda H`).  The
/// determinant of an h0-Hermitian positive definite endomorphism is real and
/// positive, so `log det` is well defined pointwise.
pub fn scale_normalize(big_h: &MatrixField, g: &BaseMetric) -> Result<MatrixField> {
    let r = big_h.rank() as f64;
    let grid = big_h.grid().clone();
    let mut logdet = ScalarField::zeros(&grid);
    for p in 0..grid.total_points() {
        let d = big_h.matrix_at(p).determinant();
        if d.re <= 0.0 {
            return Err(Error::NotPositiveDefinite("scale_normalize input".into()));
        }
        logdet.data_mut()[p] = Complex64::new(d.re.ln(), 0.0);
    }
    let mean = g.volume_mean(&logdet)?.re / r;
    Ok(big_h.scale(Complex64::new((-mean).exp(), 0.0)))
}
