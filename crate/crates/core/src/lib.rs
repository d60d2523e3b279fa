//! Dense real matrix decompositions.
//!
//! Every factorization family lives in its own module and shares the
//! [`Matrix`] carrier, the [`Permutation`] index vector, the elementary
//! orthogonal transforms in [`orthogonal`], and the [`Tolerance`] policy
//! that every rank or pivot decision goes through.
//!
//! All routines are pure functions of their inputs: they never mutate
//! arguments and hold no global state.

pub mod als;
pub mod approx;
pub mod cholesky;
pub mod error;
pub mod eigen;
pub mod flops;
pub mod interp;
pub mod lu;
pub mod matrix;
pub mod orthogonal;
pub mod permutation;
pub mod qr;
pub mod random;
pub mod reduce;
pub mod svd;
pub mod tolerance;
pub mod transform;
pub mod triangular;
pub mod utv;
pub mod wedderburn;

pub use error::{Error, Result};
pub use matrix::{Matrix, NormKind, Shape};
pub use permutation::Permutation;
pub use tolerance::Tolerance;
