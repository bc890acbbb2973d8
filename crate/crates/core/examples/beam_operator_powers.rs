//! Fractional powers of the beam operator and beam-space norms.
//!
//! ```bash
//! cargo run --release --example beam_operator_powers
//! ```

use fsi_strip::spectral::{apply_a1_power, beam_norm, min_gap, BeamFunction, NormSpec, SpectralConfig};

fn main() -> fsi_strip::Result<()> {
    let cfg = SpectralConfig::new(32, 16);
    cfg.validate()?;
    let eta = BeamFunction::from_fn(&cfg, |s| 0.2 * s.sin() + 0.05 * (3.0 * s).cos());

    let half = apply_a1_power(&eta, 0.5, &cfg)?;
    let back = apply_a1_power(&half, -0.5, &cfg)?;
    println!("round trip A1^-1/2 A1^1/2 error: {:.2e}", back.sub(&eta).max_abs_coeff());

    for theta in [0.0, 0.125, 0.375, 0.625, 0.875] {
        let n = beam_norm(&eta, NormSpec::DomA1(theta), &cfg)?;
        println!("||eta||_D(A1^{theta}) = {n:.6}");
    }
    let (gap, at) = min_gap(&eta, &cfg);
    println!("min(1 + eta) = {gap:.6} at s = {at:.4}");
    Ok(())
}
