//! Randomized permanent estimation for nonnegative rectangular matrices.
//!
//! For an `n x m` matrix `A` with nonnegative entries (`n >= m`), the random
//! determinant `det(X'X)` with `X_ij = sqrt(a_ij) * x_ij` and i.i.d. standard
//! Gaussian `x_ij` is an unbiased estimator of the permanent of `A`. This
//! crate bundles:
//!
//! - the estimator itself, for real and complex Gaussian entries
//!   ([`estimator`]);
//! - exact permanent oracles used as ground truth ([`exact`]);
//! - eigenvalue analytics of the associated Wishart-type matrix `Z = X'X`:
//!   cutoff determinants, small-eigenvalue tail statistics, determinant
//!   factorization identities, and eigenvalue interlacing ([`spectrum`]);
//! - the exact chi-square product law of the all-ones ("flat") case and its
//!   closed-form moments ([`flat`]);
//! - the complex-Wishart eigenvalue density in Laguerre-polynomial form,
//!   together with singular integrals against it ([`laguerre`]).
//!
//! Every randomized operation is a pure function of an explicit 64-bit seed;
//! see [`rng::substream`] for the derivation scheme.
//!
//! The crate is `no_std`-compatible (it requires `alloc`). The default `std`
//! feature only widens dependency features; no API depends on it.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod error;
pub mod estimator;
pub mod exact;
pub mod flat;
pub mod laguerre;
pub mod matrix;
pub mod quad;
pub mod rng;
pub mod special;
pub mod spectrum;
pub mod stats;

pub use error::{Error, Result};
pub use estimator::{EstimateRun, FieldKind};
pub use exact::PermValue;
pub use matrix::{DenseMatrix, EntryBounds, SparseColumnSpec};
pub use spectrum::{CutoffParams, SpectrumReport, TailStatistic};
