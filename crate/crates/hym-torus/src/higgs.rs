//! Higgs fields, Chern connections, and the coupled curvature operators.
//!
//! With the endomorphism storage of [`crate::fields`], the Chern connection
//! form of a metric `h` is `Gamma_i = (d_i h) h^{-1}`, its curvature is
//! `R_{i jbar} = -d_jbar Gamma_i`, and the Higgs adjoint is
//! `theta*_j = h theta_j^dagger h^{-1}`.  For a pure form `P` of total degree
//! p, the coupled operators act by
//!
//! * `theta(P) = (-1)^p P ^ theta - theta ^ P`,
//! * `D'' P = dbar P + theta(P)`,
//! * `D'^{h} P = del P + (-1)^p P ^ Gamma - Gamma ^ P + theta*(P)`,
//!
//! and the prescribed tensor of `(h, theta)` is
//! `S = Lambda(sqrt(-1) R^h) - g^{i jbar} (theta_i theta*_jbar - theta*_jbar theta_i)`.

use crate::error::{Error, Result};
use crate::fields::{HermitianMetricField, MatrixField};
use crate::forms::{Bidegree, FormMatrixField};
use crate::geometry::BaseMetric;
use crate::grid::{GridSpec, ScalarField};
use num_complex::Complex64;

const MINUS_ONE: Complex64 = Complex64::new(-1.0, 0.0);

/// Relative tolerance for the constant-coefficient Higgs field validator.
pub const THETA_CONST_TOL: f64 = 1e-12;
/// Relative tolerance for the integrability check `[theta_i, theta_j] = 0`.
pub const THETA_INTEGRABLE_TOL: f64 = 1e-10;

/// Higgs field `theta = theta_i dz^i` with constant matrix coefficients.
#[derive(Debug, Clone)]
pub struct HiggsField {
    grid: GridSpec,
    r: usize,
    comps: Vec<MatrixField>,
}

impl HiggsField {
    /// Validates that every component is constant over the grid (which makes
    /// the holomorphicity requirement `dbar theta = 0` exact) and, for n = 2,
    /// that the components commute (`theta ^ theta = 0`).
    pub fn new(comps: Vec<MatrixField>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::ShapeMismatch("Higgs field needs n components".into()));
        }
        let grid = comps[0].grid().clone();
        let r = comps[0].rank();
        if comps.len() != grid.n() {
            return Err(Error::ShapeMismatch(format!(
                "Higgs field needs {} components, got {}",
                grid.n(),
                comps.len()
            )));
        }
        let scale = comps
            .iter()
            .map(|c| c.frob_sup_norm())
            .fold(0.0_f64, f64::max)
            .max(1.0);
        for c in &comps {
            grid.same_grid(c.grid())?;
            if c.rank() != r {
                return Err(Error::ShapeMismatch("mixed ranks in Higgs components".into()));
            }
            let base = MatrixField::constant(&grid, r, c.at(0))?;
            if c.sub(&base).frob_sup_norm() > THETA_CONST_TOL * scale {
                return Err(Error::Unsupported(
                    "only constant-coefficient Higgs fields are supported".into(),
                ));
            }
        }
        if grid.n() == 2 {
            let comm = comps[0].commutator(&comps[1]).frob_sup_norm();
            if comm > THETA_INTEGRABLE_TOL * scale * scale {
                return Err(Error::hypothesis(
                    "higgs-integrability",
                    format!("|[theta_1, theta_2]| = {comm:.3e}, theta ^ theta != 0"),
                ));
            }
        }
        Ok(HiggsField { grid, r, comps })
    }

    pub fn zero(grid: &GridSpec, r: usize) -> Self {
        HiggsField {
            grid: grid.clone(),
            r,
            comps: (0..grid.n()).map(|_| MatrixField::zeros(grid, r)).collect(),
        }
    }

    pub fn from_matrices(grid: &GridSpec, r: usize, mats: &[Vec<Complex64>]) -> Result<Self> {
        let comps = mats
            .iter()
            .map(|m| MatrixField::constant(grid, r, m))
            .collect::<Result<Vec<_>>>()?;
        HiggsField::new(comps)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn component(&self, i: usize) -> &MatrixField {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.frob_sup_norm() == 0.0)
    }

    /// The (1,0)-form with components `theta_i`.
    pub fn form(&self) -> FormMatrixField {
        FormMatrixField::from_components(Bidegree::TEN, self.comps.clone()).unwrap()
    }

    /// h-adjoint Higgs field `theta*_{jbar} = h theta_j^dagger h^{-1}`.
    pub fn adjoint(&self, h: &HermitianMetricField) -> HiggsAdjointField {
        HiggsAdjointField {
            comps: self.comps.iter().map(|c| h.adjoint_of(c)).collect(),
        }
    }
}

/// Adjoint Higgs field `theta* = theta*_{jbar} dzbar^j`.
#[derive(Debug, Clone)]
pub struct HiggsAdjointField {
    comps: Vec<MatrixField>,
}

impl HiggsAdjointField {
    pub fn component(&self, j: usize) -> &MatrixField {
        &self.comps[j]
    }

    /// The (0,1)-form with components `theta*_{jbar}`.
    pub fn form(&self) -> FormMatrixField {
        FormMatrixField::from_components(Bidegree::ZERO_ONE, self.comps.clone()).unwrap()
    }
}

/// Sup-norm residual of the adjoint transformation law
/// `theta*_h = H theta*_{h0} H^{-1}` for `h = H h0`.
pub fn adjoint_transform_check(
    theta: &HiggsField,
    h0: &HermitianMetricField,
    big_h: &MatrixField,
) -> Result<f64> {
    let h = HermitianMetricField::new(big_h.matmul(h0.field()))?;
    let direct = theta.adjoint(&h);
    let base = theta.adjoint(h0);
    let hinv = big_h.inverse()?;
    let mut worst: f64 = 0.0;
    for j in 0..theta.grid.n() {
        let transported = big_h.matmul(base.component(j)).matmul(&hinv);
        worst = worst.max(direct.component(j).sub(&transported).frob_sup_norm());
    }
    Ok(worst)
}

/// Chern connection form `Gamma_i = (d_i h) h^{-1}` as a (1,0)-form.
pub fn chern_gamma(h: &HermitianMetricField) -> Result<FormMatrixField> {
    let n = h.grid().n();
    let comps = (0..n)
        .map(|i| Ok(h.field().partial_z(i)?.matmul(h.inv())))
        .collect::<Result<Vec<_>>>()?;
    FormMatrixField::from_components(Bidegree::TEN, comps)
}

/// Chern curvature `R^h = dbar Gamma` as a (1,1)-form,
/// `R_{i jbar} = -d_jbar Gamma_i`.
pub fn chern_curvature(h: &HermitianMetricField) -> Result<FormMatrixField> {
    chern_gamma(h)?.dbar()
}

/// `theta(P) = (-1)^p P ^ theta_form - theta_form ^ P` for a pure form of
/// total degree p.  Also used for the theta* action with a (0,1) argument.
pub fn bracket_action(p: &FormMatrixField, one_form: &FormMatrixField) -> Result<FormMatrixField> {
    let sign = if p.bidegree().total() % 2 == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        MINUS_ONE
    };
    p.wedge(one_form)?
        .scale(sign)
        .sub(&one_form.wedge(p)?)
}

/// Metric exterior derivative `del^h P = del P + (-1)^p P ^ Gamma - Gamma ^ P`.
pub fn del_chern(p: &FormMatrixField, gamma: &FormMatrixField) -> Result<FormMatrixField> {
    p.del()?.add(&bracket_action(p, gamma)?)
}

/// Sum of pure-bidegree forms (at most one term per bidegree).
#[derive(Debug, Clone, Default)]
pub struct PqSum {
    terms: Vec<FormMatrixField>,
}

impl PqSum {
    pub fn push(&mut self, f: FormMatrixField) -> Result<()> {
        for t in &mut self.terms {
            if t.bidegree() == f.bidegree() {
                *t = t.add(&f)?;
                return Ok(());
            }
        }
        self.terms.push(f);
        Ok(())
    }

    pub fn part(&self, b: Bidegree) -> Option<&FormMatrixField> {
        self.terms.iter().find(|t| t.bidegree() == b)
    }

    pub fn terms(&self) -> &[FormMatrixField] {
        &self.terms
    }
}

/// `D'' P = dbar P + theta(P)`, split into pure bidegrees.
pub fn dsecond(p: &FormMatrixField, theta: &HiggsField) -> Result<PqSum> {
    let mut out = PqSum::default();
    out.push(p.dbar()?)?;
    if !theta.is_zero() {
        out.push(bracket_action(p, &theta.form())?)?;
    }
    Ok(out)
}

/// `D'^{h0} P = del^{h0} P + theta*_{h0}(P)`, split into pure bidegrees.
pub fn dprime(
    p: &FormMatrixField,
    h0: &HermitianMetricField,
    theta: &HiggsField,
) -> Result<PqSum> {
    let mut out = PqSum::default();
    out.push(del_chern(p, &chern_gamma(h0)?)?)?;
    if !theta.is_zero() {
        out.push(bracket_action(p, &theta.adjoint(h0).form())?)?;
    }
    Ok(out)
}

/// Prescribed tensor of the pair `(h, theta)`:
/// `S^h = Lambda(sqrt(-1) R^{D^h})`, assembled through the form machinery.
pub fn hym_higgs_tensor(
    h: &HermitianMetricField,
    theta: &HiggsField,
    g: &BaseMetric,
) -> Result<MatrixField> {
    let r = chern_curvature(h)?;
    if theta.is_zero() {
        return g.lambda_contract(&r);
    }
    let tf = theta.form();
    let ts = theta.adjoint(h).form();
    let c = tf.wedge(&ts)?.add(&ts.wedge(&tf)?)?;
    g.lambda_contract(&r.sub(&c)?)
}

/// Same tensor evaluated through hand-written pointwise contractions, with no
/// shared code path with [`hym_higgs_tensor`] for the Higgs part.
pub fn hym_higgs_tensor_direct(
    h: &HermitianMetricField,
    theta: &HiggsField,
    g: &BaseMetric,
) -> Result<MatrixField> {
    let n = g.n();
    let grid = h.grid();
    let r = h.rank();
    // Lambda(sqrt(-1) R^h) from raw derivative calls.
    let mut out = MatrixField::zeros(grid, r);
    for i in 0..n {
        let gamma_i = h.field().partial_z(i)?.matmul(h.inv());
        for j in 0..n {
            let rij = gamma_i.partial_zbar(j)?.scale(MINUS_ONE);
            for p in 0..grid.total_points() {
                let w = g.gm_inv().at(p)[j * n + i];
                let src = rij.at(p);
                let dst = &mut out.raw_data_mut()[p * r * r..(p + 1) * r * r];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }
    // - g^{i jbar} (theta_i theta*_jbar - theta*_jbar theta_i).
    let ts = theta.adjoint(h);
    for i in 0..n {
        for j in 0..n {
            let comm = theta
                .component(i)
                .matmul(ts.component(j))
                .sub(&ts.component(j).matmul(theta.component(i)));
            for p in 0..grid.total_points() {
                let w = g.gm_inv().at(p)[j * n + i];
                let src = comm.at(p);
                let dst = &mut out.raw_data_mut()[p * r * r..(p + 1) * r * r];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= w * s;
                }
            }
        }
    }
    Ok(out)
}

/// Sup-norm disagreement of the two evaluation routes of the coupled tensor
/// (the decomposition identity `S^h = Lambda sqrt(-1) R^h - Lambda sqrt(-1)
/// (theta theta* + theta* theta)` checked route-against-route).
pub fn chernhiggs_residual(
    h: &HermitianMetricField,
    theta: &HiggsField,
    g: &BaseMetric,
) -> Result<f64> {
    let a = hym_higgs_tensor(h, theta, g)?;
    let b = hym_higgs_tensor_direct(h, theta, g)?;
    Ok(a.sub(&b).frob_sup_norm())
}

/// `Lambda sqrt(-1) D''(D'^{h0} H . H^{-1})`: the change of the prescribed
/// tensor from `h0` to `h = H h0`.
pub fn curvature_difference(
    big_h: &MatrixField,
    h0: &HermitianMetricField,
    theta: &HiggsField,
    g: &BaseMetric,
) -> Result<MatrixField> {
    let hinv = FormMatrixField::scalar(big_h.inverse()?);
    let dh = dprime(&FormMatrixField::scalar(big_h.clone()), h0, theta)?;
    let mut part11: Option<FormMatrixField> = None;
    if let Some(t10) = dh.part(Bidegree::TEN) {
        part11 = Some(t10.wedge(&hinv)?.dbar()?);
    }
    if let Some(t01) = dh.part(Bidegree::ZERO_ONE) {
        let contrib = bracket_action(&t01.wedge(&hinv)?, &theta.form())?;
        part11 = Some(match part11 {
            Some(x) => x.add(&contrib)?,
            None => contrib,
        });
    }
    match part11 {
        Some(x) => g.lambda_contract(&x),
        None => Ok(MatrixField::zeros(h0.grid(), h0.rank())),
    }
}

/// `F_theta(H) = Lambda sqrt(-1) theta(theta*_{h0}(H) . H^{-1})`, evaluated
/// through the form machinery.
pub fn f_theta(
    big_h: &MatrixField,
    h0: &HermitianMetricField,
    theta: &HiggsField,
    g: &BaseMetric,
) -> Result<MatrixField> {
    if theta.is_zero() {
        return Ok(MatrixField::zeros(h0.grid(), h0.rank()));
    }
    let hf = FormMatrixField::scalar(big_h.clone());
    let hinv = FormMatrixField::scalar(big_h.inverse()?);
    let t01 = bracket_action(&hf, &theta.adjoint(h0).form())?;
    let inner = t01.wedge(&hinv)?;
    g.lambda_contract(&bracket_action(&inner, &theta.form())?)
}

/// `F_theta(H)` through the expanded four-term product formula
/// `F_theta(H) H = Lambda sqrt(-1) (- H theta* H^{-1} theta H
///  - theta H theta* + theta* theta H + theta theta* H)`,
/// written out with raw pointwise products.
pub fn f_theta_expanded(
    big_h: &MatrixField,
    h0: &HermitianMetricField,
    theta: &HiggsField,
    g: &BaseMetric,
) -> Result<MatrixField> {
    let grid = h0.grid();
    let r = h0.rank();
    if theta.is_zero() {
        return Ok(MatrixField::zeros(grid, r));
    }
    let n = g.n();
    let hinv = big_h.inverse()?;
    let ts = theta.adjoint(h0);
    let mut acc = MatrixField::zeros(grid, r);
    for i in 0..n {
        for j in 0..n {
            let th = theta.component(i);
            let st = ts.component(j);
            // Wedge bookkeeping: a dz factor passing a dzbar factor flips the
            // sign, so each displayed term picks up -1 when theta* precedes
            // theta in the product.
            let t1 = big_h
                .matmul(st)
                .matmul(&hinv)
                .matmul(th)
                .matmul(big_h);
            let t2 = th.matmul(big_h).matmul(st).scale(MINUS_ONE);
            let t3 = st.matmul(th).matmul(big_h).scale(MINUS_ONE);
            let t4 = th.matmul(st).matmul(big_h);
            let term = t1.add(&t2).add(&t3).add(&t4);
            for p in 0..grid.total_points() {
                let w = g.gm_inv().at(p)[j * n + i];
                let src = term.at(p);
                let dst = &mut acc.raw_data_mut()[p * r * r..(p + 1) * r * r];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }
    Ok(acc.matmul(&hinv))
}

/// Full curvature of the Higgs pair `(h, theta)` on an integrable Higgs
/// bundle, split by bidegree:
/// `R^{2,0} = del^h theta`, `R^{0,2} = dbar theta*_h`,
/// `R^{1,1} = R^h - (theta ^ theta* + theta* ^ theta)`.
#[derive(Debug, Clone)]
pub struct HiggsCurvature {
    pub c20: FormMatrixField,
    pub c11: FormMatrixField,
    pub c02: FormMatrixField,
}

pub fn full_higgs_curvature(
    h: &HermitianMetricField,
    theta: &HiggsField,
) -> Result<HiggsCurvature> {
    let gamma = chern_gamma(h)?;
    let tf = theta.form();
    let ts = theta.adjoint(h).form();
    let c20 = del_chern(&tf, &gamma)?;
    let c02 = ts.dbar()?;
    let c11 = chern_curvature(h)?
        .sub(&tf.wedge(&ts)?)?
        .sub(&ts.wedge(&tf)?)?;
    Ok(HiggsCurvature { c20, c11, c02 })
}

impl HiggsCurvature {
    /// Residual of the conjugate-symmetry `R^{2,0} = (R^{0,2})^{* h}`, where
    /// the adjoint acts componentwise and swaps `dzbar^i ^ dzbar^j` with
    /// `dz^i ^ dz^j`.
    pub fn adjoint_symmetry_residual(&self, h: &HermitianMetricField) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, c) in self.c02.components().iter().enumerate() {
            let star = h.adjoint_of(c);
            worst = worst.max(self.c20.component(k).sub(&star).frob_sup_norm());
        }
        worst
    }
}

/// Residual of the algebraic Bochner-Kodaira sub-identity
/// `(theta*_{h0})^* = sqrt(-1) [Lambda, theta]`, tested in the L2 pairing
/// `<theta*(s), t> = <s, sqrt(-1) Lambda theta(t)>` for a 0-form `s` and a
/// (0,1)-form `t` with End(E) values.
pub fn bk_theta_residual(
    theta: &HiggsField,
    h0: &HermitianMetricField,
    g: &BaseMetric,
    s: &MatrixField,
    t: &FormMatrixField,
) -> Result<f64> {
    if t.bidegree() != Bidegree::ZERO_ONE {
        return Err(Error::ShapeMismatch("t must be a (0,1)-form".into()));
    }
    let n = g.n();
    let grid = g.grid();
    let vol = g.volume_density();
    // LHS: <theta*(s), t> with the (0,1)-form inner product
    // <a, b> = g^{l jbar} <a_jbar, b_lbar>_h0.
    let ts = bracket_action(&FormMatrixField::scalar(s.clone()), &theta.adjoint(h0).form())?;
    let mut lhs = ScalarField::zeros(grid);
    for j in 0..n {
        for l in 0..n {
            let ip = h0.inner(ts.component(j), t.component(l));
            for p in 0..grid.total_points() {
                let w = g.gm_inv().at(p)[j * n + l]; // g^{l jbar}
                lhs.data_mut()[p] += w * ip.data()[p];
            }
        }
    }
    // RHS: <s, sqrt(-1) Lambda theta(t)>.
    let lam = g.lambda_contract(&bracket_action(t, &theta.form())?)?;
    let rhs = h0.inner(s, &lam);
    let a = lhs.integrate(&vol)?;
    let b = rhs.integrate(&vol)?;
    Ok((a - b).norm())
}

/// Residual of the degree-resolved Bochner-Kodaira identity with torsion:
/// for `a` a (1,1)-form and `s` a (0,1)-form (End(E)-valued),
/// `<sqrt(-1)(Lambda dbar - dbar Lambda) a, s> = <a, del^{h0} s + tau(s)>`.
/// On Kaehler metrics `tau = 0` and this is the classical identity; on the
/// conformal family the torsion term restores the balance.
pub fn bk_full_residual(
    h0: &HermitianMetricField,
    g: &BaseMetric,
    a: &FormMatrixField,
    s: &FormMatrixField,
) -> Result<(f64, f64)> {
    if a.bidegree() != Bidegree::ONE_ONE || s.bidegree() != Bidegree::ZERO_ONE {
        return Err(Error::ShapeMismatch(
            "bk_full_residual expects a (1,1)-form and a (0,1)-form".into(),
        ));
    }
    let n = g.n();
    let grid = g.grid();
    let r = a.rank();
    let vol = g.volume_density();

    // sqrt(-1) Lambda (dbar a): (0,1)-components
    // l |-> g^{p qbar} (d_lbar A_{p qbar} - d_qbar A_{p lbar}).
    let mut lam_dbar: Vec<MatrixField> = Vec::new();
    for l in 0..n {
        let mut comp = MatrixField::zeros(grid, r);
        for p_ix in 0..n {
            for q in 0..n {
                let d1 = a.comp_11(p_ix, q).partial_zbar(l)?;
                let d2 = a.comp_11(p_ix, l).partial_zbar(q)?;
                let term = d1.sub(&d2);
                for pt in 0..grid.total_points() {
                    let w = g.gm_inv().at(pt)[q * n + p_ix]; // g^{p qbar}
                    let src = term.at(pt);
                    let dst = &mut comp.raw_data_mut()[pt * r * r..(pt + 1) * r * r];
                    for (d, sv) in dst.iter_mut().zip(src) {
                        *d += w * sv;
                    }
                }
            }
        }
        lam_dbar.push(comp);
    }
    // minus dbar of sqrt(-1) Lambda a.
    let lam_a = g.lambda_contract(a)?;
    let lhs_form = FormMatrixField::from_components(
        Bidegree::ZERO_ONE,
        (0..n)
            .map(|l| Ok(lam_dbar[l].sub(&lam_a.partial_zbar(l)?)))
            .collect::<Result<Vec<_>>>()?,
    )?;

    // <lhs, s> with the (0,1) pairing.
    let mut lhs = ScalarField::zeros(grid);
    for j in 0..n {
        for l in 0..n {
            let ip = h0.inner(lhs_form.component(j), s.component(l));
            for p in 0..grid.total_points() {
                let w = g.gm_inv().at(p)[j * n + l];
                lhs.data_mut()[p] += w * ip.data()[p];
            }
        }
    }

    // RHS: <a, del^{h0} s + tau(s)> with the (1,1) pairing
    // <A, B> = g^{i kbar} g^{l jbar} <A_{i jbar}, B_{k lbar}>_h0.
    let mut rhs_form = del_chern(s, &chern_gamma(h0)?)?;
    if n == 2 && !g.is_constant() {
        rhs_form = rhs_form.add(&tau_action_01(g, s)?)?;
    }
    let mut rhs = ScalarField::zeros(grid);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let ip = h0.inner(a.comp_11(i, j), rhs_form.comp_11(k, l));
                    for p in 0..grid.total_points() {
                        let w1 = g.gm_inv().at(p)[k * n + i]; // g^{i kbar}
                        let w2 = g.gm_inv().at(p)[j * n + l]; // g^{l jbar}
                        rhs.data_mut()[p] += w1 * w2 * ip.data()[p];
                    }
                }
            }
        }
    }

    let a_int = lhs.integrate(&vol)?;
    let b_int = rhs.integrate(&vol)?;
    let scale = a_int.norm().max(b_int.norm()).max(1.0);
    Ok(((a_int - b_int).norm(), scale))
}

/// Torsion operator `tau(s) = Lambda(del omega ^ s)` for a (0,1)-form `s`,
/// n = 2 only; returns the (1,1)-form result.
fn tau_action_01(g: &BaseMetric, s: &FormMatrixField) -> Result<FormMatrixField> {
    let n = 2usize;
    let grid = g.grid();
    let r = s.rank();
    // y = sum of signed products  d_k g_{i jbar} s_lbar  over the four
    // nonvanishing index patterns of dz^k dz^i dzbar^j dzbar^l against the
    // volume pattern dz^1 dzbar^1 dz^2 dzbar^2 (prefactor sqrt(-1) from
    // del omega kept aside; it cancels the -sqrt(-1) of the contraction).
    let dg0 = g.gm().partial_z(0)?;
    let dg1 = g.gm().partial_z(1)?;
    let term = |dg: &MatrixField, i: usize, j: usize, sl: &MatrixField| -> MatrixField {
        let mut out = MatrixField::zeros(grid, r);
        for p in 0..grid.total_points() {
            let w = dg.at(p)[i * n + j];
            let src = sl.at(p);
            let dst = &mut out.raw_data_mut()[p * r * r..(p + 1) * r * r];
            for (d, sv) in dst.iter_mut().zip(src) {
                *d = w * sv;
            }
        }
        out
    };
    // Patterns (k,i,j,l) with reorder signs: (0,1,0,1):-, (0,1,1,0):+,
    // (1,0,0,1):+, (1,0,1,0):-.
    let y = term(&dg0, 1, 0, s.component(1))
        .scale(MINUS_ONE)
        .add(&term(&dg0, 1, 1, s.component(0)))
        .add(&term(&dg1, 0, 0, s.component(1)))
        .add(&term(&dg1, 0, 1, s.component(0)).scale(MINUS_ONE));
    // Contraction of y * (volume 4-form pattern) back to a (1,1)-form:
    // entries  -C_{ij} y  with C = [[g^{22b}, -g^{21b}], [-g^{12b}, g^{11b}]],
    // combined with the sqrt(-1) prefactors into + C entries here.
    let mut comps = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let io = 1 - i;
            let jo = 1 - j;
            let sign = if i == j { -1.0 } else { 1.0 };
            let mut comp = MatrixField::zeros(grid, r);
            for p in 0..grid.total_points() {
                // g^{io job} = gm_inv[jo][io]
                let w = g.gm_inv().at(p)[jo * n + io] * sign * MINUS_ONE;
                let src = y.at(p);
                let dst = &mut comp.raw_data_mut()[p * r * r..(p + 1) * r * r];
                for (d, sv) in dst.iter_mut().zip(src) {
                    *d = w * sv;
                }
            }
            comps.push(comp);
        }
    }
    FormMatrixField::from_components(Bidegree::ONE_ONE, comps)
}
