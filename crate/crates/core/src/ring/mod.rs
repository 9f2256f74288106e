//! Ring network, initial conditions and classical mean-field dynamics.

mod coupling;
mod initial;
mod mean_field;
mod order;

pub use coupling::{build_coupling, ring_distance, RingCoupling};
pub use initial::{draw_thetas, initial_conditions, InitialConditionSpec, RNG_NAME};
pub use mean_field::{
    advance_mean_field, integrate_mean_field, mean_field_rhs, MeanFieldState, MeanFieldStepper,
    MeanFieldTrajectory, TrajectoryMetadata, DEFAULT_DT, DIVERGENCE_BOUND,
};
pub use order::{
    classify_regime, local_order_parameter, Classification, Regime, Thresholds,
    CHIMERA_MIN_FRACTION, DEFAULT_CLASSIFY_WINDOW,
};
