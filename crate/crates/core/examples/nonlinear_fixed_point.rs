//! Local nonlinear solve by fixed-point iteration on the forcing, with the
//! residual of the converged trajectory.
//!
//! ```bash
//! cargo run --release --example nonlinear_fixed_point
//! ```

use fsi_strip::coupling::assemble_a0;
use fsi_strip::evolution::{nonlinear_residual, solve_nonlinear, EvolutionConfig, InitialData, NonlinearTerms};
use fsi_strip::spectral::{BeamFunction, SpectralConfig};
use fsi_strip::stokes::ReferenceDomain;

fn main() -> fsi_strip::Result<()> {
    let cfg = SpectralConfig::new(16, 12);
    let rd = ReferenceDomain::new(&cfg, &BeamFunction::from_fn(&cfg, |s| 0.02 * s.sin()))?;
    let gen = assemble_a0(&rd)?;
    let data = InitialData::with_lifted_velocity(
        &rd,
        rd.sys.eta10.clone(),
        BeamFunction::from_fn(&cfg, |s| 0.01 * (2.0 * s).cos()),
    )?;
    let evo = EvolutionConfig {
        dt: 0.01,
        horizon: 0.1,
        fp_tol: 1e-10,
        ..EvolutionConfig::default()
    };
    let out = solve_nonlinear(&rd, &gen, &data, &evo)?;
    println!(
        "converged on [0, {}] after {} iterations ({} halvings)",
        out.horizon, out.iterations, out.halvings
    );
    for (i, u) in out.history.iter().enumerate() {
        println!("  iteration {:>2}: relative update {u:.3e}", i + 1);
    }
    let r = nonlinear_residual(&rd, &gen, &out.trajectory, NonlinearTerms::Full)?;
    println!("residual {:.3e} (relative {:.3e})", r.absolute, r.relative);
    Ok(())
}
