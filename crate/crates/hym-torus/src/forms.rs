//! Endomorphism-valued differential forms of bidegree (p, q), p + q <= 2.
//!
//! Basis ordering and storage:
//! * (1,0) and (0,1): n components along `dz^i` resp. `dzbar^j`;
//! * (1,1): n*n components, entry `i*n + j` multiplying `dz^i ^ dzbar^j`;
//! * (2,0) and (0,2): n(n-1)/2 components for index pairs i < j.
//!
//! The wedge-composition product combines the exterior product on form indices
//! with the endomorphism product on matrix indices, e.g.
//! `(P . Q) = (P_alpha^beta ^ Q_beta^gamma) e^alpha (x) e_gamma`.

use crate::error::{Error, Result};
use crate::fields::MatrixField;
use crate::grid::GridSpec;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bidegree {
    pub p: u8,
    pub q: u8,
}

impl Bidegree {
    pub const ZERO: Bidegree = Bidegree { p: 0, q: 0 };
    pub const TEN: Bidegree = Bidegree { p: 1, q: 0 };
    pub const ZERO_ONE: Bidegree = Bidegree { p: 0, q: 1 };
    pub const ONE_ONE: Bidegree = Bidegree { p: 1, q: 1 };
    pub const TWO_ZERO: Bidegree = Bidegree { p: 2, q: 0 };
    pub const ZERO_TWO: Bidegree = Bidegree { p: 0, q: 2 };

    pub fn total(&self) -> u8 {
        self.p + self.q
    }

    pub fn component_count(&self, n: usize) -> usize {
        match (self.p, self.q) {
            (0, 0) => 1,
            (1, 0) | (0, 1) => n,
            (1, 1) => n * n,
            (2, 0) | (0, 2) => n * (n - 1) / 2,
            _ => 0,
        }
    }
}

/// Index of the pair (i, j), i < j, in the packed antisymmetric layout.
pub fn pair_index(i: usize, j: usize, _n: usize) -> usize {
    debug_assert!(i < j);
    // Only n <= 2 is supported, so the sole pair is (0, 1).
    debug_assert!(i == 0 && j == 1);
    0
}

/// Endomorphism-valued (p, q)-form field.
#[derive(Debug, Clone)]
pub struct FormMatrixField {
    grid: GridSpec,
    r: usize,
    bidegree: Bidegree,
    comps: Vec<MatrixField>,
}

impl FormMatrixField {
    pub fn zeros(grid: &GridSpec, r: usize, bidegree: Bidegree) -> Result<Self> {
        if bidegree.total() > 2 {
            return Err(Error::Unsupported(format!(
                "form bidegree ({}, {}) beyond the supported total degree 2",
                bidegree.p, bidegree.q
            )));
        }
        let comps = (0..bidegree.component_count(grid.n()))
            .map(|_| MatrixField::zeros(grid, r))
            .collect();
        Ok(FormMatrixField {
            grid: grid.clone(),
            r,
            bidegree,
            comps,
        })
    }

    pub fn from_components(bidegree: Bidegree, comps: Vec<MatrixField>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::ShapeMismatch(
                "cannot infer grid from empty component list".into(),
            ));
        }
        let grid = comps[0].grid().clone();
        let r = comps[0].rank();
        if comps.len() != bidegree.component_count(grid.n()) {
            return Err(Error::ShapeMismatch(format!(
                "bidegree ({}, {}) on n = {} needs {} components, got {}",
                bidegree.p,
                bidegree.q,
                grid.n(),
                bidegree.component_count(grid.n()),
                comps.len()
            )));
        }
        for c in &comps {
            grid.same_grid(c.grid())?;
            if c.rank() != r {
                return Err(Error::ShapeMismatch("mixed ranks in form components".into()));
            }
        }
        Ok(FormMatrixField {
            grid,
            r,
            bidegree,
            comps,
        })
    }

    /// Degree-(0,0) form from a single matrix field.
    pub fn scalar(m: MatrixField) -> Self {
        FormMatrixField {
            grid: m.grid().clone(),
            r: m.rank(),
            bidegree: Bidegree::ZERO,
            comps: vec![m],
        }
    }

    pub fn bidegree(&self) -> Bidegree {
        self.bidegree
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn components(&self) -> &[MatrixField] {
        &self.comps
    }

    pub fn component(&self, k: usize) -> &MatrixField {
        &self.comps[k]
    }

    /// (1,1) component multiplying `dz^i ^ dzbar^j`.
    pub fn comp_11(&self, i: usize, j: usize) -> &MatrixField {
        debug_assert_eq!(self.bidegree, Bidegree::ONE_ONE);
        &self.comps[i * self.grid.n() + j]
    }

    pub fn add(&self, other: &FormMatrixField) -> Result<FormMatrixField> {
        if self.bidegree != other.bidegree {
            return Err(Error::ShapeMismatch("adding forms of different bidegree".into()));
        }
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(FormMatrixField {
            grid: self.grid.clone(),
            r: self.r,
            bidegree: self.bidegree,
            comps,
        })
    }

    pub fn sub(&self, other: &FormMatrixField) -> Result<FormMatrixField> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> FormMatrixField {
        FormMatrixField {
            grid: self.grid.clone(),
            r: self.r,
            bidegree: self.bidegree,
            comps: self.comps.iter().map(|m| m.scale(c)).collect(),
        }
    }

    pub fn frob_sup_norm(&self) -> f64 {
        self.comps
            .iter()
            .map(|m| m.frob_sup_norm())
            .fold(0.0, f64::max)
    }

    /// Wedge-composition product.  Supported whenever the result has total
    /// degree at most 2.
    pub fn wedge(&self, other: &FormMatrixField) -> Result<FormMatrixField> {
        let n = self.grid.n();
        let (a, b) = (self.bidegree, other.bidegree);
        let out_deg = Bidegree {
            p: a.p + b.p,
            q: a.q + b.q,
        };
        if out_deg.total() > 2 {
            return Err(Error::Unsupported(format!(
                "wedge of ({},{}) with ({},{}) exceeds total degree 2",
                a.p, a.q, b.p, b.q
            )));
        }
        let mut out = FormMatrixField::zeros(&self.grid, self.r, out_deg)?;
        match ((a.p, a.q), (b.p, b.q)) {
            ((0, 0), _) => {
                for (k, c) in other.comps.iter().enumerate() {
                    out.comps[k] = self.comps[0].matmul(c);
                }
            }
            (_, (0, 0)) => {
                for (k, c) in self.comps.iter().enumerate() {
                    out.comps[k] = c.matmul(&other.comps[0]);
                }
            }
            ((1, 0), (1, 0)) | ((0, 1), (0, 1)) => {
                for i in 0..n {
                    for j in (i + 1)..n {
                        out.comps[pair_index(i, j, n)] = self.comps[i]
                            .matmul(&other.comps[j])
                            .sub(&self.comps[j].matmul(&other.comps[i]));
                    }
                }
            }
            ((1, 0), (0, 1)) => {
                for i in 0..n {
                    for j in 0..n {
                        out.comps[i * n + j] = self.comps[i].matmul(&other.comps[j]);
                    }
                }
            }
            ((0, 1), (1, 0)) => {
                // dzbar^j ^ dz^i = -dz^i ^ dzbar^j.
                for i in 0..n {
                    for j in 0..n {
                        out.comps[i * n + j] =
                            self.comps[j].matmul(&other.comps[i]).scale(Complex64::new(-1.0, 0.0));
                    }
                }
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "wedge of ({},{}) with ({},{})",
                    a.p, a.q, b.p, b.q
                )))
            }
        }
        Ok(out)
    }

    /// Antiholomorphic exterior derivative.  Supported on bidegrees whose image
    /// still has total degree at most 2.
    pub fn dbar(&self) -> Result<FormMatrixField> {
        let n = self.grid.n();
        match (self.bidegree.p, self.bidegree.q) {
            (0, 0) => {
                let comps = (0..n)
                    .map(|j| self.comps[0].partial_zbar(j))
                    .collect::<Result<Vec<_>>>()?;
                FormMatrixField::from_components(Bidegree::ZERO_ONE, comps)
            }
            (1, 0) => {
                // dbar(P_i dz^i) = d_jbar P_i dzbar^j ^ dz^i
                //                = -d_jbar P_i dz^i ^ dzbar^j.
                let mut out = FormMatrixField::zeros(&self.grid, self.r, Bidegree::ONE_ONE)?;
                for i in 0..n {
                    for j in 0..n {
                        out.comps[i * n + j] =
                            self.comps[i].partial_zbar(j)?.scale(Complex64::new(-1.0, 0.0));
                    }
                }
                Ok(out)
            }
            (0, 1) => {
                let mut out = FormMatrixField::zeros(&self.grid, self.r, Bidegree::ZERO_TWO)?;
                for i in 0..n {
                    for j in (i + 1)..n {
                        out.comps[pair_index(i, j, n)] = self.comps[j]
                            .partial_zbar(i)?
                            .sub(&self.comps[i].partial_zbar(j)?);
                    }
                }
                Ok(out)
            }
            _ => Err(Error::Unsupported(format!(
                "dbar on bidegree ({}, {})",
                self.bidegree.p, self.bidegree.q
            ))),
        }
    }

    /// Holomorphic exterior derivative (no connection terms).
    pub fn del(&self) -> Result<FormMatrixField> {
        let n = self.grid.n();
        match (self.bidegree.p, self.bidegree.q) {
            (0, 0) => {
                let comps = (0..n)
                    .map(|i| self.comps[0].partial_z(i))
                    .collect::<Result<Vec<_>>>()?;
                FormMatrixField::from_components(Bidegree::TEN, comps)
            }
            (0, 1) => {
                let mut out = FormMatrixField::zeros(&self.grid, self.r, Bidegree::ONE_ONE)?;
                for i in 0..n {
                    for j in 0..n {
                        out.comps[i * n + j] = self.comps[j].partial_z(i)?;
                    }
                }
                Ok(out)
            }
            (1, 0) => {
                let mut out = FormMatrixField::zeros(&self.grid, self.r, Bidegree::TWO_ZERO)?;
                for i in 0..n {
                    for j in (i + 1)..n {
                        out.comps[pair_index(i, j, n)] = self.comps[j]
                            .partial_z(i)?
                            .sub(&self.comps[i].partial_z(j)?);
                    }
                }
                Ok(out)
            }
            _ => Err(Error::Unsupported(format!(
                "del on bidegree ({}, {})",
                self.bidegree.p, self.bidegree.q
            ))),
        }
    }
}
