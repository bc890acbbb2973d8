//! Lifted and forced Stokes resolvent solves on a curved reference domain.
//!
//! ```bash
//! cargo run --release --example stokes_resolvent
//! ```

use fsi_strip::geometry::FluidField;
use fsi_strip::spectral::{BeamFunction, SpectralConfig};
use fsi_strip::stokes::{solve_forced, solve_lifted, stokes_eigenvalues, ReferenceDomain};
use fsi_strip::C64;

fn main() -> fsi_strip::Result<()> {
    let cfg = SpectralConfig::new(16, 16);
    let eta10 = BeamFunction::from_fn(&cfg, |s| 0.2 * s.sin());
    let rd = ReferenceDomain::new(&cfg, &eta10)?;
    let sys = &rd.sys;
    println!("velocity unknowns {}, divergence-free dimension {}", sys.ambient_dim(), sys.nz());

    let top = BeamFunction::from_fn(&cfg, |s| (2.0 * s).cos());
    for tau in [1.0, 10.0, 100.0] {
        let lambda = C64::new(0.0, tau);
        let lifted = solve_lifted(lambda, &top, sys)?;
        let f = FluidField::from_fn(rd.grid(), |s, y| [y * (1.0 - y) * s.cos(), 0.0]);
        let forced = solve_forced(lambda, &f, sys)?;
        println!(
            "lambda = {tau}i: lifted max|w| {:.4e} (div {:.1e}), forced max|w| {:.4e}",
            lifted.w.max_abs(),
            lifted.div_residual,
            forced.w.max_abs()
        );
    }
    let ev = stokes_eigenvalues(sys)?;
    println!("least stable Stokes eigenvalues: {:?}", &ev[..3.min(ev.len())]);
    Ok(())
}
