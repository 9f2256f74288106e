//! Truncated-Fock reference solvers: the full network master equation for
//! a few sites, the factorized (Gutzwiller) equations for any size, a
//! birth-death chain for single-site steady states, and oracles for the
//! linearized fluctuation dynamics.

mod gutzwiller;
mod lindblad;
mod moments;
mod ops;
mod rate_equation;

pub use gutzwiller::{gutzwiller_evolve, FockDensitySites};
pub use lindblad::{
    coherent_ket, coherent_site, evolve_full_lindblad, network_lindbladian, FockDensityFull,
    Lindbladian, TruncationConfig, DEFAULT_BUDGET, DEFAULT_N_T, MAX_FULL_SITES, POSITIVITY_TOL,
};
pub use moments::{
    linearized_fock_evolve, linearized_moment_oracle, propagate_moments, MomentSample,
};
pub use ops::SparseOp;
pub use rate_equation::{birth_death_steady_state, steady_occupation};
