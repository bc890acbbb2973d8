//! Spectral toolkit for a viscous incompressible fluid in a periodic channel
//! whose upper wall is an undamped elastic beam.
//!
//! The fluid occupies `{(s, y) : 0 < y < 1 + eta(s)}` over the period
//! `[0, L)`. Everything is discretized on the flat strip `[0, L) x [0, 1]`
//! with Fourier modes in `s` and Chebyshev–Gauss–Lobatto nodes in `y`; the
//! curved reference domain enters through a Piola pull-back.
//!
//! Main entry points:
//! - [`spectral`]: grids, beam operator powers, lifting and norms.
//! - [`geometry`]: changes of variables, Jacobian fields and transformed
//!   differential operators.
//! - [`stokes`]: Galerkin Stokes resolvent solves on the reference domain.
//! - [`coupling`]: added-mass and damping operators, the coupled generator
//!   and its block resolvent.
//! - [`lab`]: resolvent and estimate sweeps with fitted exponents.
//! - [`evolution`]: linear time stepping and the nonlinear fixed point.
//! - [`io`]: scenario files, run directories and artifacts.

pub mod coupling;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod io;
pub mod lab;
pub mod linalg;
pub mod spectral;
pub mod stokes;

pub use error::{FsiError, Result};
pub use num_complex::Complex64 as C64;
