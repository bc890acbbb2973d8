//! Grids, transforms, the beam operator and its powers, the mean-zero
//! projection, the boundary lifting and norms.

pub mod beam;
pub mod chebyshev;
pub mod config;
pub mod fourier;
pub mod norms;

pub use beam::{
    adjoint_lambda_star, apply_a1_power, check_no_contact, lift_lambda, min_gap, project_mean_zero,
    BeamFunction, BeamState, BoundaryField,
};
pub use chebyshev::VerticalBasis;
pub use config::SpectralConfig;
pub use norms::{beam_norm, NormSpec};
