//! Stokes resolvent problems on the reference domain: the lifted problem
//! defining `W_lambda`, the forced problem with homogeneous boundary values,
//! the top-wall traction functional and the Leray projection.

pub mod assembly;
pub mod leray;
pub mod system;
pub mod traction;

pub use leray::{leray_matrix, leray_project, stokes_eigenvalues};
pub use system::{solve_forced, solve_lifted, StokesResolvent, StokesSolution, StokesSystem};
pub use traction::{solution_strong_traction, strong_traction, ReferenceDomain};
