// `!(x > 0.0)` is used deliberately to reject NaN alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Spectral toolkit for anisotropic Lorentzian integral operators and their
//! model operator `|D| + τ/2`.

pub mod asym;
pub mod discretize;
pub mod eigen;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod symbols;
pub mod theta;

pub use discretize::{DiscreteOperator, Grid, Potential, Scheme};
pub use eigen::{EigenOptions, EigenPair, SpectrumResult};
pub use error::{Error, Result};
pub use kernels::{KernelFamily, KernelSpec};
pub use theta::ThetaSpec;
