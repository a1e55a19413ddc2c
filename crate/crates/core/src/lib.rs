#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Spectral analysis of first-order (and diagonal second-order) ODE systems
//! with piecewise-constant matrix coefficients on an interval.
//!
//! The characteristic function of a system is expanded exactly as an
//! exponential sum `F(z) = Σ δ_r e^{μ_r z}`; the convex hull of the conjugate
//! exponents then predicts where the zeros lie and how many there are. Zero
//! finding is by argument principle with subdivision, and the diagnostics
//! module measures how badly the eigenfunctions fail to form a basis.
//!
//! Numeric code is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix `f64`, which is what the catalog, IO and CLI use.

pub mod acceptance;
pub mod catalog;
pub mod diagnostics;
pub mod error;
pub mod expsum;
pub mod hull;
pub mod io;
pub mod linalg;
pub mod rootfind;
pub mod scalar;
pub mod system;

pub use error::{Error, Result};
pub use expsum::{ExpSum, ExpSumMatrix, Term};
pub use hull::{analyze_exponents, symbol_density, DensityMode, HullReport};
pub use linalg::ComplexMatrix;
pub use rootfind::{count_function, find_zeros, winding_number, Rect, ZeroSet};
pub use scalar::{Cx, Real};
pub use system::{PiecewiseFirstOrderSystem, SecondOrderDiagonalSystem};

pub type ExpSumF64 = expsum::ExpSum<f64>;
pub type ExpSumMatrixF64 = expsum::ExpSumMatrix<f64>;
pub type ComplexMatrixF64 = linalg::ComplexMatrix<f64>;
pub type HullReportF64 = hull::HullReport<f64>;
pub type EdgeRecordF64 = hull::EdgeRecord<f64>;
pub type RectF64 = rootfind::Rect<f64>;
pub type ZeroSetF64 = rootfind::ZeroSet<f64>;
pub type PiecewiseFirstOrderSystemF64 = system::PiecewiseFirstOrderSystem<f64>;
pub type SecondOrderDiagonalSystemF64 = system::SecondOrderDiagonalSystem<f64>;
pub type PiecewiseExponentialFunctionF64 = diagnostics::PiecewiseExponentialFunction<f64>;
pub type ProjectionReportF64 = diagnostics::ProjectionReport<f64>;
