//! Resolvent and estimate sweeps with fitted exponents, bounded-constant
//! batteries and refinement comparisons.

pub mod report;
pub mod sweeps;

pub use report::{
    attach_refinement, describe_shape, fluid_cutoff, Cutoff, fit_envelope, fit_loglog, fit_peaks, refinement_ratios,
    resolved_band, resolved_cutoff, Band, CheckRecord, Expectation, FitMode, Line, Series,
    SlopeFit, SweepMeta, SweepReport, REPORT_SCHEMA,
};
pub use sweeps::{
    battery_wkp, check_commutator, commutator, invertibility_grid, random_beam_vectors,
    sweep_gevrey, sweep_regularity, sweep_v, sweep_vtilde, BatteryParams, BeamOperatorKind,
    COMMUTATOR_EPSILON,
};
