//! Projectively invariant geometry of strongly ℂ-linearly convex hypersurfaces:
//! Beltrami-type invariants, projective duality, Fefferman-type norms, the
//! transfer pairing between dual hypersurfaces, and discretized Cauchy/Leray
//! transforms whose norms measure the efficiency of that pairing.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod duality;
pub mod geometry;
pub mod invariants;
pub mod linalg;
pub mod pairing;
pub mod rigid;
pub mod transforms;

pub use num_complex::Complex64 as C64;

pub type CVec = nalgebra::DVector<C64>;
pub type CMat = nalgebra::DMatrix<C64>;
pub type RVec = nalgebra::DVector<f64>;
pub type RMat = nalgebra::DMatrix<f64>;

/// Failure modes shared across the library.
#[derive(Clone, Debug, thiserror::Error)]
pub enum Error {
    #[error("point outside the coordinate chart: {0}")]
    Chart(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("point maps to the hyperplane at infinity")]
    AtInfinity,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("Levi form not positive definite: {0}")]
    NotPseudoconvex(String),
    #[error("not strongly C-linearly convex: {0}")]
    NotLinearlyConvex(String),
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
