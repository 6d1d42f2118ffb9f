//! Pointwise r x r endomorphism fields and Hermitian metric fields.
//!
//! An endomorphism `P = P_alpha^beta e^alpha (x) e_beta` is stored as the matrix
//! `P[alpha][beta]` in row-major order; the composition written `P * Q` in index
//! form, `(P * Q)_alpha^gamma = P_alpha^beta Q_beta^gamma`, is then the ordinary
//! matrix product of the stored matrices.  A metric `h` is stored as the matrix
//! `h[alpha][beta] = h_{alpha betabar}`, which is Hermitian positive definite.
//! An endomorphism `P` is h-Hermitian iff `P h` is a Hermitian matrix,
//! equivalently `P = h P^dagger h^{-1}`.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Field of r x r complex matrices over a periodic grid.
#[derive(Debug, Clone)]
pub struct MatrixField {
    grid: GridSpec,
    r: usize,
    data: Vec<Complex64>,
}

impl MatrixField {
    pub fn zeros(grid: &GridSpec, r: usize) -> Self {
        MatrixField {
            grid: grid.clone(),
            r,
            data: vec![Complex64::default(); grid.total_points() * r * r],
        }
    }

    pub fn identity(grid: &GridSpec, r: usize) -> Self {
        let mut out = Self::zeros(grid, r);
        for p in 0..grid.total_points() {
            for a in 0..r {
                out.data[(p * r + a) * r + a] = Complex64::new(1.0, 0.0);
            }
        }
        out
    }

    /// Same constant matrix (given row-major) at every point.
    pub fn constant(grid: &GridSpec, r: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != r * r {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries, got {}",
                r * r,
                entries.len()
            )));
        }
        let mut out = Self::zeros(grid, r);
        for p in 0..grid.total_points() {
            out.data[p * r * r..(p + 1) * r * r].copy_from_slice(entries);
        }
        Ok(out)
    }

    /// Build from a closure filling the r x r row-major block at each point.
    pub fn from_fn(
        grid: &GridSpec,
        r: usize,
        mut f: impl FnMut(&[f64], &mut [Complex64]),
    ) -> Self {
        let mut out = Self::zeros(grid, r);
        for p in 0..grid.total_points() {
            let coords = grid.coords(p);
            f(&coords, &mut out.data[p * r * r..(p + 1) * r * r]);
        }
        out
    }

    /// Diagonal scalar field times the identity.
    pub fn scalar_times_identity(s: &ScalarField, r: usize) -> Self {
        let grid = s.grid().clone();
        let mut out = Self::zeros(&grid, r);
        for (p, &v) in s.data().iter().enumerate() {
            for a in 0..r {
                out.data[(p * r + a) * r + a] = v;
            }
        }
        out
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn at(&self, point: usize) -> &[Complex64] {
        &self.data[point * self.r * self.r..(point + 1) * self.r * self.r]
    }

    pub fn at_mut(&mut self, point: usize) -> &mut [Complex64] {
        &mut self.data[point * self.r * self.r..(point + 1) * self.r * self.r]
    }

    pub fn raw_data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn raw_data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn from_raw(grid: &GridSpec, r: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.total_points() * r * r {
            return Err(Error::ShapeMismatch(format!(
                "matrix field needs {} samples, got {}",
                grid.total_points() * r * r,
                data.len()
            )));
        }
        Ok(MatrixField {
            grid: grid.clone(),
            r,
            data,
        })
    }

    fn check_compatible(&self, other: &MatrixField) -> Result<()> {
        self.grid.same_grid(&other.grid)?;
        if self.r != other.r {
            return Err(Error::ShapeMismatch(format!(
                "rank {} vs {}",
                self.r, other.r
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &MatrixField) -> MatrixField {
        debug_assert!(self.check_compatible(other).is_ok());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a + b)
            .collect();
        MatrixField {
            grid: self.grid.clone(),
            r: self.r,
            data,
        }
    }

    pub fn sub(&self, other: &MatrixField) -> MatrixField {
        debug_assert!(self.check_compatible(other).is_ok());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        MatrixField {
            grid: self.grid.clone(),
            r: self.r,
            data,
        }
    }

    pub fn scale(&self, c: Complex64) -> MatrixField {
        MatrixField {
            grid: self.grid.clone(),
            r: self.r,
            data: self.data.iter().map(|&a| c * a).collect(),
        }
    }

    /// Endomorphism composition `(self * other)_alpha^gamma =
    /// self_alpha^beta other_beta^gamma`: pointwise matrix product.
    pub fn matmul(&self, other: &MatrixField) -> MatrixField {
        debug_assert!(self.check_compatible(other).is_ok());
        let r = self.r;
        let mut out = MatrixField::zeros(&self.grid, r);
        for p in 0..self.grid.total_points() {
            let a = self.at(p);
            let b = other.at(p);
            let c = out.at_mut(p);
            for i in 0..r {
                for k in 0..r {
                    let aik = a[i * r + k];
                    if aik != Complex64::default() {
                        for j in 0..r {
                            c[i * r + j] += aik * b[k * r + j];
                        }
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &MatrixField) -> MatrixField {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// Plain pointwise conjugate transpose.
    pub fn dagger(&self) -> MatrixField {
        let r = self.r;
        let mut out = MatrixField::zeros(&self.grid, r);
        for p in 0..self.grid.total_points() {
            let a = self.at(p);
            let c = out.at_mut(p);
            for i in 0..r {
                for j in 0..r {
                    c[i * r + j] = a[j * r + i].conj();
                }
            }
        }
        out
    }

    pub fn mul_scalar_field(&self, s: &ScalarField) -> MatrixField {
        let r2 = self.r * self.r;
        let mut out = self.clone();
        for (p, &v) in s.data().iter().enumerate() {
            for e in &mut out.data[p * r2..(p + 1) * r2] {
                *e *= v;
            }
        }
        out
    }

    pub fn trace(&self) -> ScalarField {
        let r = self.r;
        let mut out = ScalarField::zeros(&self.grid);
        for p in 0..self.grid.total_points() {
            let a = self.at(p);
            out.data_mut()[p] = (0..r).map(|i| a[i * r + i]).sum();
        }
        out
    }

    /// Sup over points of the Frobenius norm.
    pub fn frob_sup_norm(&self) -> f64 {
        let r2 = self.r * self.r;
        let mut best: f64 = 0.0;
        for p in 0..self.grid.total_points() {
            let s: f64 = self.data[p * r2..(p + 1) * r2]
                .iter()
                .map(|v| v.norm_sqr())
                .sum();
            // Overflowed or indeterminate data must never look small:
            // f64::max would silently drop a NaN.
            if !s.is_finite() {
                return f64::INFINITY;
            }
            best = best.max(s.sqrt());
        }
        best
    }

    /// Sup over points of `||A - A^dagger||_F`, the plain Hermitian defect.
    pub fn herm_defect(&self) -> f64 {
        self.sub(&self.dagger()).frob_sup_norm()
    }

    /// Componentwise spectral derivative along a real axis.
    pub fn partial_axis(&self, axis: usize) -> Result<MatrixField> {
        let r2 = self.r * self.r;
        let total = self.grid.total_points();
        let mut out = self.clone();
        let mut comp = ScalarField::zeros(&self.grid);
        for e in 0..r2 {
            for p in 0..total {
                comp.data_mut()[p] = self.data[p * r2 + e];
            }
            let d = comp.partial_axis(axis)?;
            for p in 0..total {
                out.data[p * r2 + e] = d.data()[p];
            }
        }
        Ok(out)
    }

    pub fn partial_z(&self, i: usize) -> Result<MatrixField> {
        let dx = self.partial_axis(2 * i)?;
        let dy = self.partial_axis(2 * i + 1)?;
        Ok(dx
            .sub(&dy.scale(Complex64::new(0.0, 1.0)))
            .scale(Complex64::new(0.5, 0.0)))
    }

    pub fn partial_zbar(&self, i: usize) -> Result<MatrixField> {
        let dx = self.partial_axis(2 * i)?;
        let dy = self.partial_axis(2 * i + 1)?;
        Ok(dx
            .add(&dy.scale(Complex64::new(0.0, 1.0)))
            .scale(Complex64::new(0.5, 0.0)))
    }

    pub fn matrix_at(&self, point: usize) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.r, self.r, self.at(point))
    }

    pub fn set_matrix_at(&mut self, point: usize, m: &DMatrix<Complex64>) {
        let r = self.r;
        let block = self.at_mut(point);
        for i in 0..r {
            for j in 0..r {
                block[i * r + j] = m[(i, j)];
            }
        }
    }

    /// Pointwise matrix inverse.
    pub fn inverse(&self) -> Result<MatrixField> {
        let mut out = MatrixField::zeros(&self.grid, self.r);
        for p in 0..self.grid.total_points() {
            let m = self.matrix_at(p);
            let inv = m.try_inverse().ok_or_else(|| {
                Error::Numerical(format!("singular matrix at grid point {p}"))
            })?;
            out.set_matrix_at(p, &inv);
        }
        Ok(out)
    }
}

/// Hermitian positive definite metric field on the trivial bundle, with its
/// pointwise inverse precomputed.
#[derive(Debug, Clone)]
pub struct HermitianMetricField {
    mf: MatrixField,
    inv: MatrixField,
}

/// Relative Hermitian-symmetry tolerance accepted by metric constructors.
pub const HERMITIAN_REL_TOL: f64 = 1e-12;

impl HermitianMetricField {
    /// Validates Hermitian symmetry (relative tolerance `1e-12`) and positive
    /// definiteness, then precomputes the pointwise inverse.
    pub fn new(mf: MatrixField) -> Result<Self> {
        let scale = mf.frob_sup_norm().max(1.0);
        let defect = mf.herm_defect();
        if defect > HERMITIAN_REL_TOL * scale * 10.0 {
            return Err(Error::NotHermitian(format!(
                "defect {defect:.3e} relative to scale {scale:.3e}"
            )));
        }
        // Symmetrize exactly so downstream eigensolves see Hermitian input.
        let sym = mf.add(&mf.dagger()).scale(Complex64::new(0.5, 0.0));
        let (min_eig, _) = plain_eig_range(&sym)?;
        if min_eig <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!(
                "minimum eigenvalue {min_eig:.3e}"
            )));
        }
        let inv = sym.inverse()?;
        Ok(HermitianMetricField { mf: sym, inv })
    }

    pub fn identity(grid: &GridSpec, r: usize) -> Self {
        let id = MatrixField::identity(grid, r);
        HermitianMetricField {
            inv: id.clone(),
            mf: id,
        }
    }

    pub fn field(&self) -> &MatrixField {
        &self.mf
    }

    pub fn inv(&self) -> &MatrixField {
        &self.inv
    }

    pub fn grid(&self) -> &GridSpec {
        self.mf.grid()
    }

    pub fn rank(&self) -> usize {
        self.mf.rank()
    }

    /// Pointwise `(h^{1/2}, h^{-1/2})` by Hermitian eigendecomposition.
    pub fn sqrt_pair(&self) -> Result<(MatrixField, MatrixField)> {
        let grid = self.grid();
        let r = self.rank();
        let mut s = MatrixField::zeros(grid, r);
        let mut si = MatrixField::zeros(grid, r);
        for p in 0..grid.total_points() {
            let m = self.mf.matrix_at(p);
            let eig = nalgebra::SymmetricEigen::new(m);
            let mut d = DMatrix::<Complex64>::zeros(r, r);
            let mut di = DMatrix::<Complex64>::zeros(r, r);
            for k in 0..r {
                let ev = eig.eigenvalues[k];
                if ev <= 0.0 {
                    return Err(Error::NotPositiveDefinite(format!(
                        "eigenvalue {ev:.3e} at point {p}"
                    )));
                }
                d[(k, k)] = Complex64::new(ev.sqrt(), 0.0);
                di[(k, k)] = Complex64::new(1.0 / ev.sqrt(), 0.0);
            }
            let v = &eig.eigenvectors;
            s.set_matrix_at(p, &(v * &d * v.adjoint()));
            si.set_matrix_at(p, &(v * &di * v.adjoint()));
        }
        Ok((s, si))
    }

    /// h-adjoint of an endomorphism: `A^{*h} = h A^dagger h^{-1}`.
    pub fn adjoint_of(&self, a: &MatrixField) -> MatrixField {
        self.mf.matmul(&a.dagger()).matmul(&self.inv)
    }

    /// h-Hermitian part `(A + A^{*h}) / 2`.
    pub fn herm_part(&self, a: &MatrixField) -> MatrixField {
        a.add(&self.adjoint_of(a)).scale(Complex64::new(0.5, 0.0))
    }

    /// Sup over points of `||A - A^{*h}||_F`.
    pub fn herm_defect_of(&self, a: &MatrixField) -> f64 {
        a.sub(&self.adjoint_of(a)).frob_sup_norm()
    }

    /// Pointwise inner product `<A, B>_h = tr(A h B^dagger h^{-1})`.
    pub fn inner(&self, a: &MatrixField, b: &MatrixField) -> ScalarField {
        a.matmul(&self.mf)
            .matmul(&b.dagger())
            .matmul(&self.inv)
            .trace()
    }
}

/// Eigenvalue range of a pointwise (plain) Hermitian matrix field.
fn plain_eig_range(a: &MatrixField) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in 0..a.grid().total_points() {
        let eig = nalgebra::SymmetricEigen::new(a.matrix_at(p));
        for k in 0..a.rank() {
            lo = lo.min(eig.eigenvalues[k]);
            hi = hi.max(eig.eigenvalues[k]);
        }
    }
    Ok((lo, hi))
}

/// Relative tolerance for accepting "h-Hermitian" inputs to eigenvalue routines.
pub const EIG_INPUT_TOL: f64 = 1e-9;

/// Pointwise eigenvalue bounds of an h-Hermitian endomorphism field, computed
/// from the Hermitian matrix `h^{-1/2} A h^{1/2}`.  Returns (min, max) real
/// scalar fields.  Errors if `A` is not h-Hermitian within `1e-9` relative.
pub fn herm_eig_bounds(
    a: &MatrixField,
    h: &HermitianMetricField,
) -> Result<(ScalarField, ScalarField)> {
    let scale = a.frob_sup_norm().max(1.0);
    let defect = h.herm_defect_of(a);
    if defect > EIG_INPUT_TOL * scale * 100.0 {
        return Err(Error::NotHermitian(format!(
            "h-Hermitian defect {defect:.3e} relative to scale {scale:.3e}"
        )));
    }
    let (hs, hsi) = h.sqrt_pair()?;
    let w = hsi.matmul(a).matmul(&hs);
    let sym = w.add(&w.dagger()).scale(Complex64::new(0.5, 0.0));
    let grid = a.grid();
    let mut lo = ScalarField::zeros(grid);
    let mut hi = ScalarField::zeros(grid);
    for p in 0..grid.total_points() {
        let eig = nalgebra::SymmetricEigen::new(sym.matrix_at(p));
        let mut mn = f64::INFINITY;
        let mut mx = f64::NEG_INFINITY;
        for k in 0..a.rank() {
            mn = mn.min(eig.eigenvalues[k]);
            mx = mx.max(eig.eigenvalues[k]);
        }
        lo.data_mut()[p] = Complex64::new(mn, 0.0);
        hi.data_mut()[p] = Complex64::new(mx, 0.0);
    }
    Ok((lo, hi))
}

/// Pointwise eigenvalues of an h-Hermitian endomorphism (sorted ascending per
/// point), without the global min/max reduction.
pub fn herm_eigenvalues(a: &MatrixField, h: &HermitianMetricField) -> Result<Vec<Vec<f64>>> {
    let (hs, hsi) = h.sqrt_pair()?;
    let w = hsi.matmul(a).matmul(&hs);
    let sym = w.add(&w.dagger()).scale(Complex64::new(0.5, 0.0));
    let grid = a.grid();
    let mut out = Vec::with_capacity(grid.total_points());
    for p in 0..grid.total_points() {
        let eig = nalgebra::SymmetricEigen::new(sym.matrix_at(p));
        let mut evs: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        evs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out.push(evs);
    }
    Ok(out)
}

/// Sup over the grid of the h-operator norm, computed as the largest singular
/// value of `h^{-1/2} A h^{1/2}`.
pub fn sup_norm(a: &MatrixField, h: &HermitianMetricField) -> Result<f64> {
    let (hs, hsi) = h.sqrt_pair()?;
    let w = hsi.matmul(a).matmul(&hs);
    let mut best: f64 = 0.0;
    for p in 0..a.grid().total_points() {
        let m = w.matrix_at(p);
        let gram = m.adjoint() * &m;
        let eig = nalgebra::SymmetricEigen::new(gram);
        for k in 0..a.rank() {
            best = best.max(eig.eigenvalues[k].max(0.0).sqrt());
        }
    }
    Ok(best)
}

/// Pointwise exponential of a plain Hermitian matrix field.
pub fn matrix_exp(a: &MatrixField) -> Result<MatrixField> {
    herm_matrix_function(a, |x| x.exp())
}

/// Pointwise logarithm of a plain Hermitian positive definite matrix field.
pub fn matrix_log(a: &MatrixField) -> Result<MatrixField> {
    let (lo, _) = plain_eig_range(a)?;
    if lo <= 0.0 {
        return Err(Error::NotPositiveDefinite(format!(
            "matrix_log needs positive definite input, min eigenvalue {lo:.3e}"
        )));
    }
    herm_matrix_function(a, |x| x.ln())
}

fn herm_matrix_function(a: &MatrixField, f: impl Fn(f64) -> f64) -> Result<MatrixField> {
    let scale = a.frob_sup_norm().max(1.0);
    if a.herm_defect() > 1e-9 * scale * 100.0 {
        return Err(Error::NotHermitian(
            "matrix function of a non-Hermitian field".into(),
        ));
    }
    let r = a.rank();
    let mut out = MatrixField::zeros(a.grid(), r);
    for p in 0..a.grid().total_points() {
        let m = a.matrix_at(p);
        let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(sym);
        let mut d = DMatrix::<Complex64>::zeros(r, r);
        for k in 0..r {
            d[(k, k)] = Complex64::new(f(eig.eigenvalues[k]), 0.0);
        }
        let v = &eig.eigenvectors;
        out.set_matrix_at(p, &(v * &d * v.adjoint()));
    }
    Ok(out)
}

/// Exponential of an h-Hermitian endomorphism field, via the similarity
/// `h^{-1/2} A h^{1/2}` which is plain Hermitian.
pub fn herm_exp_wrt(a: &MatrixField, h: &HermitianMetricField) -> Result<MatrixField> {
    let (hs, hsi) = h.sqrt_pair()?;
    let w = hsi.matmul(a).matmul(&hs);
    let sym = w.add(&w.dagger()).scale(Complex64::new(0.5, 0.0));
    Ok(hs.matmul(&matrix_exp(&sym)?).matmul(&hsi))
}

/// Logarithm of an h-Hermitian positive definite endomorphism field.
pub fn herm_log_wrt(a: &MatrixField, h: &HermitianMetricField) -> Result<MatrixField> {
    let (hs, hsi) = h.sqrt_pair()?;
    let w = hsi.matmul(a).matmul(&hs);
    let sym = w.add(&w.dagger()).scale(Complex64::new(0.5, 0.0));
    Ok(hs.matmul(&matrix_log(&sym)?).matmul(&hsi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> GridSpec {
        GridSpec::square(1, 8).unwrap()
    }

    #[test]
    fn matmul_matches_index_convention() {
        let g = grid();
        // P = E_{12}, Q = E_{21}: (P*Q)_1^1 = P_1^2 Q_2^1 = 1.
        let p = MatrixField::constant(&g, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]).unwrap();
        let q = MatrixField::constant(&g, 2, &[c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        let pq = p.matmul(&q);
        assert_eq!(pq.at(0)[0], c(1., 0.));
        assert_eq!(pq.at(0)[3], c(0., 0.));
        let qp = q.matmul(&p);
        assert_eq!(qp.at(0)[3], c(1., 0.));
    }

    #[test]
    fn metric_rejects_bad_input() {
        let g = grid();
        let nonherm =
            MatrixField::constant(&g, 2, &[c(1., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]).unwrap();
        assert!(HermitianMetricField::new(nonherm).is_err());
        let indef =
            MatrixField::constant(&g, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap();
        assert!(HermitianMetricField::new(indef).is_err());
    }

    #[test]
    fn adjoint_wrt_metric_reproduces_pairing() {
        let g = grid();
        // Random-ish fixed h and A; verify h(A u, v) = h(u, A^{*h} v) where
        // h(u, v) = sum h[a][b] u^a conj(v^b) for row-vector sections.
        let h = HermitianMetricField::new(
            MatrixField::constant(&g, 2, &[c(2., 0.), c(0.3, 0.4), c(0.3, -0.4), c(1.5, 0.)])
                .unwrap(),
        )
        .unwrap();
        let a = MatrixField::constant(&g, 2, &[c(0.7, 0.1), c(-0.2, 0.5), c(1.1, 0.), c(0., -0.9)])
            .unwrap();
        let astar = h.adjoint_of(&a);
        let u = [c(1.0, -0.5), c(0.25, 2.0)];
        let v = [c(-0.7, 0.3), c(1.4, 0.9)];
        let pair = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
            let hm = h.field().at(0);
            let mut s = Complex64::default();
            for al in 0..2 {
                for be in 0..2 {
                    s += hm[al * 2 + be] * x[al] * y[be].conj();
                }
            }
            s
        };
        let act = |m: &MatrixField, x: &[Complex64]| -> Vec<Complex64> {
            let mm = m.at(0);
            (0..2)
                .map(|b| (0..2).map(|a| x[a] * mm[a * 2 + b]).sum())
                .collect()
        };
        let lhs = pair(&act(&a, &u), &v);
        let rhs = pair(&u, &act(&astar, &v));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn herm_inner_product_is_positive_and_compatible() {
        let g = grid();
        let h = HermitianMetricField::new(
            MatrixField::constant(&g, 2, &[c(2., 0.), c(0.3, 0.4), c(0.3, -0.4), c(1.5, 0.)])
                .unwrap(),
        )
        .unwrap();
        let a = MatrixField::constant(&g, 2, &[c(0.7, 0.1), c(-0.2, 0.5), c(1.1, 0.), c(0., -0.9)])
            .unwrap();
        let n = h.inner(&a, &a).data()[0];
        assert!(n.re > 0.0 && n.im.abs() < 1e-13);
        // <P A, B> = <A, P B> for h-Hermitian P.
        let p = h.herm_part(
            &MatrixField::constant(&g, 2, &[c(0.2, 0.6), c(-1., 0.1), c(0., 0.3), c(0.9, 0.)])
                .unwrap(),
        );
        let b = MatrixField::constant(&g, 2, &[c(0.1, 0.), c(0.4, -0.2), c(-0.6, 0.8), c(1., 1.)])
            .unwrap();
        let lhs = h.inner(&p.matmul(&a), &b).data()[0];
        let rhs = h.inner(&a, &p.matmul(&b)).data()[0];
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn exp_log_round_trip_wrt_metric() {
        let g = grid();
        let h = HermitianMetricField::new(
            MatrixField::constant(&g, 2, &[c(2., 0.), c(0.3, 0.4), c(0.3, -0.4), c(1.5, 0.)])
                .unwrap(),
        )
        .unwrap();
        let s = h.herm_part(
            &MatrixField::constant(&g, 2, &[c(0.2, 0.1), c(-0.4, 0.3), c(0.1, 0.), c(-0.3, 0.)])
                .unwrap(),
        );
        let e = herm_exp_wrt(&s, &h).unwrap();
        // exp of an h-Hermitian field is h-Hermitian and positive.
        assert!(h.herm_defect_of(&e) < 1e-12);
        let (lo, _) = herm_eig_bounds(&e, &h).unwrap();
        assert!(lo.min_real() > 0.0);
        let back = herm_log_wrt(&e, &h).unwrap();
        assert!(back.sub(&s).frob_sup_norm() < 1e-12);
    }

    #[test]
    fn eig_bounds_match_constant_diagonal() {
        let g = grid();
        let h = HermitianMetricField::identity(&g, 2);
        let a = MatrixField::constant(&g, 2, &[c(3., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
            .unwrap();
        let (lo, hi) = herm_eig_bounds(&a, &h).unwrap();
        assert!((lo.min_real() + 1.0).abs() < 1e-13);
        assert!((hi.max_real() - 3.0).abs() < 1e-13);
        assert!((sup_norm(&a, &h).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eig_bounds_reject_non_hermitian() {
        let g = grid();
        let h = HermitianMetricField::identity(&g, 2);
        let a = MatrixField::constant(&g, 2, &[c(0., 0.), c(5., 0.), c(0., 0.), c(0., 0.)])
            .unwrap();
        assert!(herm_eig_bounds(&a, &h).is_err());
    }
}
