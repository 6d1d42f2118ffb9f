//! Hermitian base metrics on the flat complex n-torus.
//!
//! Two families are supported: constant Hermitian positive definite metrics
//! (Kaehler) and conformal metrics `g = e^{u(x)} g0` with constant `g0` (the
//! non-Kaehler family for n = 2).  The metric matrix `g[i][j] = g_{i jbar}` uses
//! the same storage convention as bundle metrics, with `g^{i jbar}` recovered
//! from the pointwise inverse as `ginv[j][i]`.
//!
//! The sqrt(-1) normalization of the contraction against the Kaehler form is
//! fixed here and nowhere else: for a (1,1)-form `F = F_{i jbar} dz^i ^ dzbar^j`
//! the contraction returns `Lambda(sqrt(-1) F) = g^{i jbar} F_{i jbar}`, which
//! makes `Lambda(sqrt(-1) del delbar f) = Delta_g f` with the sign that is
//! positive on plurisubharmonic bumps.

use crate::error::{Error, Result};
use crate::fields::MatrixField;
use crate::forms::{Bidegree, FormMatrixField};
use crate::grid::{dz_symbol, dzbar_symbol, GridSpec, ScalarField};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricFamily {
    Constant,
    Conformal,
}

/// Numerical classification of a base metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricClass {
    pub kahler: bool,
    pub gauduchon: bool,
}

/// Tolerance for the Kaehler / Gauduchon classification checks.
pub const CLASSIFY_TOL: f64 = 1e-8;

/// Hermitian metric on the base torus.
#[derive(Debug, Clone)]
pub struct BaseMetric {
    grid: GridSpec,
    family: MetricFamily,
    g0: Vec<Complex64>,
    u: Option<ScalarField>,
    gm: MatrixField,
    gm_inv: MatrixField,
    det: ScalarField,
}

fn validate_constant_hermitian_pd(n: usize, g0: &[Complex64]) -> Result<()> {
    if g0.len() != n * n {
        return Err(Error::ShapeMismatch(format!(
            "constant metric needs {} entries, got {}",
            n * n,
            g0.len()
        )));
    }
    let m = nalgebra::DMatrix::from_row_slice(n, n, g0);
    if (&m - m.adjoint()).norm() > 1e-12 * m.norm().max(1.0) {
        return Err(Error::NotHermitian("constant base metric".into()));
    }
    let eig = nalgebra::SymmetricEigen::new(m);
    if eig.eigenvalues.iter().any(|&e| e <= 0.0) {
        return Err(Error::NotPositiveDefinite("constant base metric".into()));
    }
    Ok(())
}

impl BaseMetric {
    /// Constant Hermitian positive definite metric, `g0` row-major n x n.
    pub fn constant(grid: &GridSpec, g0: Vec<Complex64>) -> Result<Self> {
        Self::build(grid, g0, None)
    }

    /// Euclidean metric `g = Id`.
    pub fn euclidean(grid: &GridSpec) -> Result<Self> {
        let n = grid.n();
        let mut g0 = vec![Complex64::default(); n * n];
        for i in 0..n {
            g0[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Self::constant(grid, g0)
    }

    /// Conformal metric `g = e^{u(x)} g0` with real exponent field `u`.
    pub fn conformal(grid: &GridSpec, g0: Vec<Complex64>, u: ScalarField) -> Result<Self> {
        grid.same_grid(u.grid())?;
        let max_im = u.data().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        if max_im > 1e-12 {
            return Err(Error::ShapeMismatch(
                "conformal exponent must be a real field".into(),
            ));
        }
        Self::build(grid, g0, Some(u))
    }

    fn build(grid: &GridSpec, g0: Vec<Complex64>, u: Option<ScalarField>) -> Result<Self> {
        let n = grid.n();
        validate_constant_hermitian_pd(n, &g0)?;
        let g0m = nalgebra::DMatrix::from_row_slice(n, n, &g0);
        let g0inv = g0m.clone().try_inverse().unwrap();
        let det0 = g0m.determinant().re;
        let mut gm = MatrixField::constant(grid, n, &g0)?;
        let mut gm_inv =
            MatrixField::constant(grid, n, g0inv.transpose().as_slice())?;
        // DMatrix::as_slice is column-major; transposing first gives row-major.
        let mut det = ScalarField::constant(grid, Complex64::new(det0, 0.0));
        if let Some(uf) = &u {
            let eu = uf.map(|v| Complex64::new(v.re.exp(), 0.0));
            let emu = uf.map(|v| Complex64::new((-v.re).exp(), 0.0));
            gm = gm.mul_scalar_field(&eu);
            gm_inv = gm_inv.mul_scalar_field(&emu);
            let enu = uf.map(|v| Complex64::new((v.re * n as f64).exp(), 0.0));
            det = det.mul(&enu);
        }
        Ok(BaseMetric {
            grid: grid.clone(),
            family: if u.is_some() {
                MetricFamily::Conformal
            } else {
                MetricFamily::Constant
            },
            g0,
            u,
            gm,
            gm_inv,
            det,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn family(&self) -> MetricFamily {
        self.family
    }

    pub fn is_constant(&self) -> bool {
        self.family == MetricFamily::Constant
    }

    /// Metric matrix field `g_{i jbar}` (rank n).
    pub fn gm(&self) -> &MatrixField {
        &self.gm
    }

    /// Pointwise inverse matrix; `g^{i jbar} = gm_inv[j][i]`.
    pub fn gm_inv(&self) -> &MatrixField {
        &self.gm_inv
    }

    /// Inverse metric with upper indices at a point: entry `[i][j] = g^{i jbar}`.
    pub fn ginv_upper_at(&self, point: usize) -> Vec<Complex64> {
        let n = self.n();
        let inv = self.gm_inv.at(point);
        let mut out = vec![Complex64::default(); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = inv[j * n + i];
            }
        }
        out
    }

    pub fn det(&self) -> &ScalarField {
        &self.det
    }

    /// Volume density of `omega^n / n!` in real coordinates: `2^n det g`.
    pub fn volume_density(&self) -> ScalarField {
        let factor = (1 << self.n()) as f64;
        self.det.scale(Complex64::new(factor, 0.0))
    }

    /// Total volume `int omega^n / n!`.
    pub fn total_volume(&self) -> f64 {
        let one = ScalarField::constant(&self.grid, Complex64::new(1.0, 0.0));
        one.integrate(&self.volume_density()).unwrap().re
    }

    /// Mean of a scalar field against the metric volume form.
    pub fn volume_mean(&self, f: &ScalarField) -> Result<Complex64> {
        let num = f.integrate(&self.volume_density())?;
        Ok(num / self.total_volume())
    }

    /// `Lambda(sqrt(-1) F) = g^{i jbar} F_{i jbar}` for a (1,1)-form field.
    pub fn lambda_contract(&self, f: &FormMatrixField) -> Result<MatrixField> {
        if f.bidegree() != Bidegree::ONE_ONE {
            return Err(Error::ShapeMismatch(format!(
                "lambda_contract expects a (1,1)-form, got ({}, {})",
                f.bidegree().p,
                f.bidegree().q
            )));
        }
        self.grid.same_grid(f.grid())?;
        let n = self.n();
        let r = f.rank();
        let mut out = MatrixField::zeros(&self.grid, r);
        for i in 0..n {
            for j in 0..n {
                let comp = f.comp_11(i, j);
                for p in 0..self.grid.total_points() {
                    let w = self.gm_inv.at(p)[j * n + i];
                    if w != Complex64::default() {
                        let src = comp.at(p);
                        let dst = &mut out.raw_data_mut()[p * r * r..(p + 1) * r * r];
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d += w * s;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Complex Laplacian `Delta_g f = g^{i jbar} d_i d_jbar f`.
    pub fn laplacian(&self, f: &ScalarField) -> Result<ScalarField> {
        self.grid.same_grid(f.grid())?;
        let n = self.n();
        let mut out = ScalarField::zeros(&self.grid);
        for i in 0..n {
            for j in 0..n {
                let fij = f.partial_z(i)?.partial_zbar(j)?;
                for p in 0..self.grid.total_points() {
                    let w = self.gm_inv.at(p)[j * n + i];
                    out.data_mut()[p] += w * fij.data()[p];
                }
            }
        }
        Ok(out)
    }

    /// Fourier symbol of `Delta_g` for the constant part of the metric (the
    /// exact symbol when the metric is constant).  Real and negative away from
    /// the zero mode.
    pub fn laplacian_symbol(&self) -> impl Fn(&[f64]) -> f64 + '_ {
        let n = self.n();
        let g0m = nalgebra::DMatrix::from_row_slice(n, n, &self.g0);
        let g0inv = g0m.try_inverse().unwrap();
        move |k: &[f64]| {
            let mut s = Complex64::default();
            for i in 0..n {
                for j in 0..n {
                    // g^{i jbar} = inv[j][i]
                    s += g0inv[(j, i)] * dz_symbol(k, i) * dzbar_symbol(k, j);
                }
            }
            s.re
        }
    }

    /// Solve `Delta_g sol = rhs` with zero-mean `rhs`, constant metrics only.
    /// The solution is normalized to zero mean.  Residual contract: the
    /// round-trip `Delta_g(invert_laplacian(rhs)) - rhs` is below `1e-10`
    /// relative on band-limited data.
    pub fn invert_laplacian(&self, rhs: &ScalarField) -> Result<ScalarField> {
        if !self.is_constant() {
            return Err(Error::Unsupported(
                "invert_laplacian requires a constant base metric".into(),
            ));
        }
        rhs.solve_fourier(self.laplacian_symbol(), true)
    }

    /// Conformal exponent field, if this is a conformal metric.
    pub fn conformal_factor(&self) -> Option<&ScalarField> {
        self.u.as_ref()
    }

    /// Weighted mean that characterizes solvability of `Delta_g f = rhs`:
    /// for `g = e^u g0` the equation reads `Delta_{g0} f = e^u rhs`, so the
    /// compatible constant is the `e^u`-weighted mean of `rhs` (the plain mean
    /// when `g` is constant).
    pub fn poisson_mean(&self, f: &ScalarField) -> Complex64 {
        match &self.u {
            None => f.mean(),
            Some(u) => {
                let eu = u.map(|v| Complex64::new(v.re.exp(), 0.0));
                f.mul(&eu).mean() / eu.mean()
            }
        }
    }

    /// Solve `Delta_g f = rhs` on the flat or conformal family, normalizing
    /// the solution to zero mean.  `rhs` must have zero [`Self::poisson_mean`].
    pub fn solve_poisson(&self, rhs: &ScalarField) -> Result<ScalarField> {
        match &self.u {
            None => self.invert_laplacian(rhs),
            Some(u) => {
                let eu = u.map(|v| Complex64::new(v.re.exp(), 0.0));
                rhs.mul(&eu).solve_fourier(self.laplacian_symbol(), true)
            }
        }
    }

    /// Torsion of the Chern connection of `g`:
    /// `Theta^k_{ij} = g^{k lbar} (d_i g_{j lbar} - d_j g_{i lbar})`.
    pub fn torsion(&self) -> Result<TorsionTensor> {
        let n = self.n();
        let mut comps = Vec::new();
        if n == 2 {
            // Only the pair (i, j) = (0, 1) is independent.
            let mut dg = Vec::new(); // dg[i][j][l] = d_{z^i} g_{j lbar}
            for i in 0..n {
                dg.push(self.gm.partial_z(i)?);
            }
            for k in 0..n {
                let mut comp = ScalarField::zeros(&self.grid);
                for l in 0..n {
                    for p in 0..self.grid.total_points() {
                        let ginv_kl = self.gm_inv.at(p)[l * n + k]; // g^{k lbar}
                        let d0 = dg[0].at(p)[n + l]; // d_0 g_{1 lbar}
                        let d1 = dg[1].at(p)[l]; // d_1 g_{0 lbar}
                        comp.data_mut()[p] += ginv_kl * (d0 - d1);
                    }
                }
                comps.push(comp);
            }
        }
        Ok(TorsionTensor {
            grid: self.grid.clone(),
            comps,
        })
    }

    /// The (1,0)-form `tau = Lambda(del omega)` acting on 0-forms by
    /// multiplication; components along `dz^i`.
    pub fn tau_form(&self) -> Result<Vec<ScalarField>> {
        let n = self.n();
        let mut dg = Vec::new();
        for k in 0..n {
            dg.push(self.gm.partial_z(k)?);
        }
        let mut out = Vec::new();
        for i in 0..n {
            let mut comp = ScalarField::zeros(&self.grid);
            for p in 0..self.grid.total_points() {
                let mut s = Complex64::default();
                for k in 0..n {
                    for j in 0..n {
                        let gkj = self.gm_inv.at(p)[j * n + k]; // g^{k jbar}
                        let gij = self.gm_inv.at(p)[j * n + i]; // g^{i jbar}
                        s += -dg[k].at(p)[i * n + j] * gkj + dg[i].at(p)[k * n + j] * gij;
                    }
                }
                comp.data_mut()[p] = s;
            }
            out.push(comp);
        }
        Ok(out)
    }

    /// Numerical Kaehler / Gauduchon classification.
    pub fn classify(&self) -> Result<MetricClass> {
        let n = self.n();
        let scale = self.gm.frob_sup_norm().max(1.0);
        let kahler = if n == 1 {
            true
        } else {
            // d omega = 0 iff d_k g_{i jbar} is symmetric in (k, i).
            let mut defect: f64 = 0.0;
            for k in 0..n {
                let dk = self.gm.partial_z(k)?;
                for i in 0..n {
                    if i == k {
                        continue;
                    }
                    let di = self.gm.partial_z(i)?;
                    for j in 0..n {
                        for p in 0..self.grid.total_points() {
                            let a = dk.at(p)[i * n + j];
                            let b = di.at(p)[k * n + j];
                            defect = defect.max((a - b).norm());
                        }
                    }
                }
            }
            defect <= CLASSIFY_TOL * scale
        };
        let gauduchon = if n == 1 {
            true
        } else {
            // del delbar omega = c * dz^1^dzbar^1^dz^2^dzbar^2 with
            // c = dd(g_22) - cross terms, by the standard reordering signs.
            let mut c = ScalarField::zeros(&self.grid);
            let terms: [(usize, usize, usize, usize, f64); 4] = [
                (0, 0, 1, 1, 1.0),
                (1, 1, 0, 0, 1.0),
                (0, 1, 1, 0, -1.0),
                (1, 0, 0, 1, -1.0),
            ];
            for &(k, l, i, j, sign) in &terms {
                let comp = self.gm.partial_z(k)?.partial_zbar(l)?;
                for p in 0..self.grid.total_points() {
                    c.data_mut()[p] += sign * comp.at(p)[i * n + j];
                }
            }
            c.sup_norm() <= CLASSIFY_TOL * scale
        };
        Ok(MetricClass { kahler, gauduchon })
    }
}

/// Torsion tensor `Theta^k_{ij}` of the base metric, stored for the pair
/// (i, j) = (0, 1); identically zero when n = 1.
#[derive(Debug, Clone)]
pub struct TorsionTensor {
    grid: GridSpec,
    comps: Vec<ScalarField>,
}

impl TorsionTensor {
    /// Component `Theta^k_{01}`; `None` for n = 1 where the torsion vanishes
    /// identically.
    pub fn component(&self, k: usize) -> Option<&ScalarField> {
        self.comps.get(k)
    }

    pub fn sup_norm(&self) -> f64 {
        self.comps.iter().map(|c| c.sup_norm()).fold(0.0, f64::max)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::FormMatrixField;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lambda_contract_of_del_delbar_is_laplacian() {
        // Anchor identity fixing the sqrt(-1) convention:
        // Lambda(sqrt(-1) del delbar f) = Delta_g f, for constant anisotropic g.
        let grid = GridSpec::square(2, 8).unwrap();
        let g = BaseMetric::constant(
            &grid,
            vec![c(2.0, 0.0), c(0.5, 0.25), c(0.5, -0.25), c(1.0, 0.0)],
        )
        .unwrap();
        let f = ScalarField::from_fn(&grid, |p| {
            c((p[0] + p[3]).cos() + (p[1] - 2.0 * p[2]).sin(), 0.0)
        });
        let fm = MatrixField::scalar_times_identity(&f, 1);
        let dd = FormMatrixField::scalar(fm).del().unwrap().dbar().unwrap();
        // del then dbar: dbar(df_i dz^i) has coefficient -d_jbar d_i f, i.e.
        // -(del delbar f)_{i jbar}; flip the sign to compare.
        let contracted = g
            .lambda_contract(&dd.scale(c(-1.0, 0.0)))
            .unwrap()
            .trace();
        let lap = g.laplacian(&f).unwrap();
        assert!(contracted.sub(&lap).sup_norm() < 1e-10);
    }

    #[test]
    fn laplacian_positive_on_psh_bump() {
        // Delta_g of cos(x) at x = 0 is negative; of -cos(x) positive; sign
        // anchored so that Delta = (d_xx + d_yy)/4 for g = Id, n = 1.
        let grid = GridSpec::square(1, 16).unwrap();
        let g = BaseMetric::euclidean(&grid).unwrap();
        let f = ScalarField::from_fn(&grid, |p| c(p[0].cos(), 0.0));
        let lap = g.laplacian(&f).unwrap();
        let expect = f.scale(c(-0.25, 0.0));
        assert!(lap.sub(&expect).sup_norm() < 1e-12);
    }

    #[test]
    fn invert_laplacian_round_trip() {
        let grid = GridSpec::square(2, 8).unwrap();
        let g = BaseMetric::constant(
            &grid,
            vec![c(1.5, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.8, 0.0)],
        )
        .unwrap();
        let u = ScalarField::from_fn(&grid, |p| {
            c((p[0] + p[2]).sin() + 0.5 * (2.0 * p[1]).cos() * p[3].sin(), 0.0)
        });
        let rhs = g.laplacian(&u).unwrap();
        let sol = g.invert_laplacian(&rhs).unwrap();
        // Solutions agree up to the additive constant; both here are zero-mean.
        assert!(sol.sub(&u).sup_norm() < 1e-10);
        let back = g.laplacian(&sol).unwrap();
        assert!(back.sub(&rhs).sup_norm() < 1e-10 * rhs.sup_norm().max(1.0));
    }

    #[test]
    fn invert_laplacian_rejects_conformal_and_nonzero_mean() {
        let grid = GridSpec::square(2, 8).unwrap();
        let u = ScalarField::from_fn(&grid, |p| c(0.3 * p[0].cos(), 0.0));
        let g = BaseMetric::conformal(
            &grid,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            u,
        )
        .unwrap();
        let one = ScalarField::constant(&grid, c(1.0, 0.0));
        assert!(g.invert_laplacian(&one).is_err());
        let gc = BaseMetric::euclidean(&grid).unwrap();
        assert!(matches!(
            gc.invert_laplacian(&one),
            Err(Error::NonZeroMean(_))
        ));
    }

    #[test]
    fn torsion_vanishes_for_constant_metrics() {
        let grid = GridSpec::square(2, 8).unwrap();
        let g = BaseMetric::constant(
            &grid,
            vec![c(2.0, 0.0), c(0.3, 0.2), c(0.3, -0.2), c(1.1, 0.0)],
        )
        .unwrap();
        assert!(g.torsion().unwrap().sup_norm() < 1e-13);
        let cls = g.classify().unwrap();
        assert!(cls.kahler && cls.gauduchon);
    }

    #[test]
    fn conformal_torsion_matches_symbolic_oracle() {
        // g = e^u delta: Theta^k_{01} = delta_{1k} d_{z^0} u - delta_{0k} d_{z^1} u.
        // N = 16 keeps the spectral tail of e^u below the tolerance.
        let grid = GridSpec::square(2, 16).unwrap();
        let u = ScalarField::from_fn(&grid, |p| c(0.3 * (p[0].cos() + p[3].sin()), 0.0));
        let g = BaseMetric::conformal(
            &grid,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            u.clone(),
        )
        .unwrap();
        let t = g.torsion().unwrap();
        let du0 = u.partial_z(0).unwrap();
        let du1 = u.partial_z(1).unwrap();
        let t0 = t.component(0).unwrap();
        let t1 = t.component(1).unwrap();
        assert!(t0.add(&du1).sup_norm() < 1e-10);
        assert!(t1.sub(&du0).sup_norm() < 1e-10);
        let cls = g.classify().unwrap();
        assert!(!cls.kahler && !cls.gauduchon);
    }

    #[test]
    fn conformal_laplacian_scales_pointwise() {
        let grid = GridSpec::square(2, 8).unwrap();
        let u = ScalarField::from_fn(&grid, |p| c(0.3 * (p[1] + p[2]).sin(), 0.0));
        let g = BaseMetric::conformal(
            &grid,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            u.clone(),
        )
        .unwrap();
        let gc = BaseMetric::euclidean(&grid).unwrap();
        let f = ScalarField::from_fn(&grid, |p| c((p[0] - p[3]).cos(), 0.0));
        let a = g.laplacian(&f).unwrap();
        let b = gc
            .laplacian(&f)
            .unwrap()
            .mul(&u.map(|v| c((-v.re).exp(), 0.0)));
        assert!(a.sub(&b).sup_norm() < 1e-11);
    }
}
