//! Beam-side operators generated by the fluid, the coupled generator on the
//! discrete energy space and its resolvent in block form.

pub mod blocks;
pub mod generator;
pub mod operators;

pub use blocks::{resolvent_blocks, BlockResolvent};
pub use generator::{assemble_a0, CoupledGenerator, CoupledState};
pub use operators::{
    a1_power_matrix, assemble_g, assemble_k, assemble_k_adjoint, assemble_l, assemble_l_strong,
    assemble_v, coercivity_constant, factor_v, resolved_beam_indices, restrict, upper_constant,
    v_operators, BeamOperators, FactoredV, RhoConstants, VOperators,
};
