//! Weighted norms of the inverse beam operators `V` and `V~` and their
//! fitted exponents, plus invertibility of `V` on a right half-plane grid.
//!
//! ```bash
//! cargo run --release --example beam_operator_scaling
//! ```

use fsi_strip::coupling::RhoConstants;
use fsi_strip::lab::{sweep_v, sweep_vtilde, Band, Line};
use fsi_strip::spectral::{BeamFunction, SpectralConfig};
use fsi_strip::stokes::ReferenceDomain;
use fsi_strip::C64;

fn main() -> fsi_strip::Result<()> {
    let cfg = SpectralConfig::new(24, 16);
    let rd = ReferenceDomain::new(&cfg, &BeamFunction::from_fn(&cfg, |s| 0.2 * s.sin()))?;
    let rho = RhoConstants::estimate(&rd.sys, C64::new(0.0, 1.0), &[C64::new(0.0, 50.0)])?;
    let band = Band::new(1.0, 50.0)?;
    let vt = sweep_vtilde(&rd, &rho, &[(0.0, 0.0), (1.0, 0.0), (0.5, 0.5)], Line::Imaginary, band, 16)?;
    let v = sweep_v(&rd, &rho, &[(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)], Line::Imaginary, band, 16)?;
    for r in [&vt, &v] {
        println!("{}:", r.kind);
        for s in r.series.iter().filter(|s| s.fit.is_some()) {
            println!("  {:<40} slope {:>7.3} pass {}", s.label, s.fit.as_ref().unwrap().slope, s.pass);
        }
        for c in &r.checks {
            println!("  {:<40} {:.3e}", c.name, c.value);
        }
    }
    Ok(())
}
