//! Resolvent norm of the coupled generator along the imaginary axis, with
//! its fitted decay exponent.
//!
//! ```bash
//! cargo run --release --example gevrey_sweep
//! ```

use fsi_strip::coupling::assemble_a0;
use fsi_strip::lab::{sweep_gevrey, Band, Line};
use fsi_strip::spectral::{BeamFunction, SpectralConfig};
use fsi_strip::stokes::ReferenceDomain;

fn main() -> fsi_strip::Result<()> {
    let cfg = SpectralConfig::new(24, 24);
    let rd = ReferenceDomain::new(&cfg, &BeamFunction::from_fn(&cfg, |s| 0.2 * s.sin()))?;
    let gen = assemble_a0(&rd)?;
    println!("state dimension {}, spectral abscissa {:.4e}", gen.dim(), gen.spectral_abscissa()?);
    let report = sweep_gevrey(&gen, &rd, Line::Imaginary, Band::new(1.0, 100.0)?, 24)?;
    for w in &report.meta.warnings {
        println!("note: {w}");
    }
    let s = report.series("resolvent").expect("resolvent series");
    for (l, n) in report.lambdas.iter().zip(&s.norms).step_by(4) {
        println!("|lambda| {:>9.3}  ||R|| {:.5e}", l.norm(), n);
    }
    if let Some(fit) = &s.fit {
        println!("fitted slope {:.3} +- {:.3} (expected -1/2)", fit.slope, fit.stderr);
    }
    println!("sup |lambda|^1/2 ||R|| = {:.4}, verdict {}", s.sup_weighted, report.verdict);
    Ok(())
}
