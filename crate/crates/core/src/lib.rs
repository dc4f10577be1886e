//! Finding the k largest approximately rank-one blocks of a nonnegative
//! matrix with the dual Ky Fan 2-k-norm plus an entrywise ℓ1 penalty.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense matrices and a Jacobi SVD,
//! * [`norms`]: the Ky Fan 2-k-norm, its dual, and the θ-combined norms,
//! * [`subdiff`]: subdifferential membership tests,
//! * [`solver`]: Douglas-Rachford solver, certificates and SDPA export,
//! * [`recovery`]: heterogeneity parameters and recovery constants,
//! * [`datagen`]: seeded planted-block generators,
//! * [`eval`]: match scores, thresholding and θ sweeps.

pub mod datagen;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod norms;
pub mod recovery;
pub mod solver;
pub mod subdiff;

pub use error::{Error, Result};
pub use linalg::{svd, svd_warm, Matrix, SvdFactors};
pub use norms::NormParams;
pub use solver::{Certificate, ProblemSpec, SolveOutcome, SolverOptions};
