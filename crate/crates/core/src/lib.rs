//! Curvature and positivity calculus for Hermitian holomorphic vector bundles.
//!
//! Metrics live on coordinate charts; curvature is evaluated pointwise as a
//! Hermitian form on `T ⊗ E`, and positivity is decided on tensors of bounded
//! rank.

pub mod error;
pub mod bergman;
pub mod bundle;
pub mod cohomology;
pub mod fd;
pub mod hermitian;
pub mod positivity;
pub mod sampling;
pub mod schur;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use hermitian::{biform_apply, eigh, singular_values, ComplexMatrix, HermitianMatrix, TensorPoint, C64};
