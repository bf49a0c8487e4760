//! Variational eigenvalues of the spiked harmonic oscillator
//! `-d²/dx² + Bx² + λ/x^α` in a singular oscillator basis, with an
//! independent shooting oracle and the convergence analysis for `α = 4`.

// `!(x > y)` is used on purpose so that NaN fails validity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod basis;
pub mod cli;
pub mod error;
pub mod golden;
pub mod matrix;
pub mod oracle;
pub mod quad;
pub mod solver;
pub mod specfun;
pub mod tables;

pub use basis::{BasisContext, ModelSpec};
pub use error::{Error, Result};
pub use matrix::HamiltonianMatrix;
pub use solver::SpectrumResult;
