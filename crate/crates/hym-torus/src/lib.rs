//! Numerical library for the prescribed Hermitian-Yang-Mills-Higgs tensor
//! equation on Higgs bundles over flat complex tori.
//!
//! The base manifold is a real 2n-torus with complex structure z^i = x_i + i y_i
//! (n = 1 or 2), the bundle is the trivial rank-r bundle, and all fields live on
//! a uniform periodic grid with spectral (FFT) differentiation.  The library
//! provides:
//!
//! * periodic scalar/matrix/form fields and exact spectral calculus ([`grid`],
//!   [`fields`], [`forms`]);
//! * flat and conformally flat Hermitian base metrics, contraction against the
//!   Kaehler form, torsion and classification ([`geometry`]);
//! * Higgs-bundle curvature operators: Chern curvature, Higgs adjoints, the
//!   coupled curvature tensor, curvature-difference and Bochner-Kodaira
//!   identities ([`higgs`]);
//! * a Newton-Krylov solver (with a damped heat-flow cross-check) for the
//!   prescribed tensor equation, plus Gauduchon-style conformal normalization
//!   ([`solver`]);
//! * comparison-principle verdicts and Chern-Weil integral checks ([`analysis`]).
//!
//! Conventions are fixed once: endomorphisms are stored as matrices P[alpha][beta]
//! acting on frame indices, the product `P * Q` is the plain matrix product, and
//! the contraction of a (1,1)-form F against the metric returns
//! `Lambda(sqrt(-1) F) = g^{i jbar} F_{i jbar}`; this is anchored by the scalar
//! identity `Lambda(sqrt(-1) del delbar f) = Delta_g f`.

pub mod analysis;
pub mod config;
pub mod error;
pub mod fields;
pub mod forms;
pub mod geometry;
pub mod grid;
pub mod higgs;
pub mod instances;
pub mod io;
pub mod report;
pub mod run;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
