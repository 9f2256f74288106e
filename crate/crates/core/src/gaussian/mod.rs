//! Gaussian fluctuations about the mean field: drift and diffusion of the
//! linearized dynamics, covariance propagation and per-node diagnostics.

mod analysis;
mod covariance;
mod drift;
mod husimi;

pub use analysis::{axial_circular_std, squeezing_axes, weighted_correlation, SqueezingAxes};
pub use covariance::{
    min_uncertainty_eigenvalue, propagate_covariance, propagate_frozen, propagate_lyapunov,
    symplectic_form, Coefficients, CovarianceState, SYMMETRY_TOL, UNCERTAINTY_TOL,
};
pub use drift::{diffusion_matrix, drift_matrix, DiffusionMatrix, DriftMatrix};
pub use husimi::{covering_grid, husimi_node, HusimiField, HusimiGrid};
