//! Numerics for discrete-modulated continuous-variable QKD.
//!
//! The crate builds coherent-state constellation density operators in a
//! truncated Fock space and measures how quickly they approach the thermal
//! state with the same mean photon number:
//!
//! - [`fock`] and [`linalg`]: truncated Fock vectors, density matrices,
//!   ladder operators, tensor products, partial traces, a Hermitian Jacobi
//!   eigensolver, PSD square roots and trace-norm distances.
//! - [`constellation`]: square QAM grids with Maxwell–Boltzmann shaping.
//! - [`convergence`]: trace distance, tail mass, spectral and eigenprojector
//!   gaps against the thermal reference.
//! - [`bipartite`]: purifications, the two-mode squeezed reference and the
//!   covariance-matrix off-diagonal gap.
//! - [`security`]: energy-test tail terms and the composed diamond-norm budget.
//! - [`protocol`]: a seeded prepare-and-measure Monte Carlo with parameter
//!   estimation and MAP / minimum-distance symbol decisions.
//! - [`cli`]: JSON run configs, CSV/JSON emitters and the subcommand drivers
//!   used by the `dmqkd` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

#![forbid(unsafe_code)]
// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bipartite;
pub mod cli;
pub mod constellation;
pub mod convergence;
mod error;
pub mod fock;
pub mod linalg;
pub mod protocol;
pub mod rng;
pub mod security;

pub use error::{Error, Result};
pub use nalgebra::Complex;

/// Complex scalar used throughout.
pub type C64 = Complex<f64>;
/// Dense complex matrix in the Fock basis.
pub type CMatrix = nalgebra::DMatrix<C64>;
