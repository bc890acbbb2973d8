//! Linear time stepping of the coupled system and the local-in-time
//! nonlinear solver built on it.

pub mod data;
pub mod linear;
pub mod nonlinear;

pub use data::{
    beam_power_norm, initial_state, validate_initial_data, EvolutionConfig, ForcingPair,
    InitialData, InitialDiagnostics, NonlinearTerms, Scheme, DATA_EPSILON,
};
pub use linear::{
    linear_estimate, run_linear, solve_linear, LinearEstimate, LinearStepper, NormSample,
    TrajectoryRecord,
};
pub use nonlinear::{
    current_transform, evaluate_fhat, evaluate_ghat, forcing_norm, nonlinear_residual,
    solve_nonlinear, z_map, z_map_norm_at_zero, NonlinearOutcome, NonlinearResidual,
};
