//! Commutator of a beam-operator power with the added-mass operator: zero
//! on the flat strip, bounded on a curved one.
//!
//! ```bash
//! cargo run --release --example commutator_bound
//! ```

use fsi_strip::coupling::BeamOperators;
use fsi_strip::lab::{check_commutator, commutator, Band, Line, COMMUTATOR_EPSILON};
use fsi_strip::linalg;
use fsi_strip::spectral::{BeamFunction, SpectralConfig};
use fsi_strip::stokes::ReferenceDomain;
use fsi_strip::C64;

fn main() -> fsi_strip::Result<()> {
    let cfg = SpectralConfig::new(16, 16);
    let flat = ReferenceDomain::new(&cfg, &BeamFunction::zeros(cfg.kmax()))?;
    let ops = BeamOperators::new(C64::new(0.0, 10.0), &flat.sys)?;
    println!("flat strip: ||[A1^3/8, K]|| = {:.2e}", linalg::op_norm(&commutator(&ops, &flat))?);

    let curved = ReferenceDomain::new(&cfg, &BeamFunction::from_fn(&cfg, |s| 0.2 * s.sin()))?;
    let r = check_commutator(&curved, Line::Imaginary, Band::new(1.0, 1000.0)?, 12, COMMUTATOR_EPSILON, 7)?;
    for w in &r.meta.warnings {
        println!("note: {w}");
    }
    for s in &r.series {
        println!(
            "{:<28} sup {:.4e} slope {:?} pass {}",
            s.label,
            s.sup_weighted,
            s.fit.as_ref().map(|f| (f.slope * 1e3).round() / 1e3),
            s.pass
        );
    }
    Ok(())
}
