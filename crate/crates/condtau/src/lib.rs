//! Kernel-based estimation of the conditional Kendall's tau of a bivariate
//! vector given a covariate, with bandwidth selection, pointwise confidence
//! intervals, explicit finite-sample bounds and a Monte Carlo study harness.

pub mod bandwidth;
pub mod bounds;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod io;
pub mod kernels;
pub mod sample;
pub mod simulation;
pub mod weights;

pub use error::{Error, Result};
pub use estimators::{TauEstimate, TauKind};
pub use kernels::{KernelFamily, KernelSpec};
pub use sample::Sample;
