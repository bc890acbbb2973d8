//! Scenario files, run directories, reports, CSV tables and binary dumps.

pub mod artifacts;
pub mod run;
pub mod scenario;

pub use artifacts::{
    decode_matrix, decode_state, emit_plotdata, emit_spectrum, emit_trajectory, encode_matrix,
    encode_state, fmt_f64, matrix_table, Table, CSV_SCHEMA,
};
pub use run::{
    fresh_dir, run_file, run_text, sha256_hex, ErrorRecord, FileRecord, Manifest, RunOptions,
    RunOutcome, THREADS_ENV,
};
pub use scenario::{InitialSpec, RunKind, Scenario, ShapePreset, SweepParams, VelocityPreset};
