//! Quantum signatures of chimera states in a ring of nonlocally coupled
//! quantum Van der Pol oscillators.
//!
//! * [`ring`]: coupling matrix, initial conditions and the classical
//!   mean-field (Stuart-Landau) dynamics with regime classification.
//! * [`gaussian`]: drift and diffusion of the linearized fluctuations,
//!   covariance propagation, weighted correlations, squeezing and Husimi maps.
//! * [`info`]: Gaussian Rényi-2 entropies and mutual information.
//! * [`fock`]: truncated-Fock reference solvers (full Lindblad, Gutzwiller,
//!   linearized moments) used to certify the Gaussian layer.
//! * [`scenario`]: configuration, presets, runs, sweeps and file output.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod info;
pub mod io;
pub mod oracle_check;
pub mod params;
pub mod ring;
pub mod rk4;
pub mod scenario;

pub use error::{Error, Result};
pub use params::NetworkParams;
