//! Flat-strip to curved-domain change of variables and its Jacobian fields.
//!
//! ```bash
//! cargo run --release --example domain_transform
//! ```

use fsi_strip::geometry::{build_transform, StripGrid};
use fsi_strip::spectral::{BeamFunction, SpectralConfig};

fn main() -> fsi_strip::Result<()> {
    let cfg = SpectralConfig::new(24, 16);
    let grid = StripGrid::new(&cfg);
    let flat = BeamFunction::zeros(cfg.kmax());
    for amp in [0.0, 0.1, 0.3, 0.6] {
        let eta = BeamFunction::from_fn(&cfg, |s| amp * s.sin());
        let tf = build_transform(&eta, &flat, &grid)?;
        let sm = tf.summary();
        println!(
            "amp {amp:.1}: det in [{:.4}, {:.4}], chain rule residual {:.1e}, cofactor residual {:.1e}",
            sm.min_det, sm.max_det, sm.chain_rule_residual, sm.cofactor_residual
        );
    }
    let touching = BeamFunction::from_fn(&cfg, |s| 1.2 * s.sin());
    match build_transform(&touching, &flat, &grid) {
        Err(e) => println!("deflection 1.2 sin(s): {e}"),
        Ok(_) => println!("deflection 1.2 sin(s) unexpectedly accepted"),
    }
    Ok(())
}
