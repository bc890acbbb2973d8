//! Resolvent of the coupled generator assembled from fluid and beam blocks,
//! compared with the dense inverse.
//!
//! ```bash
//! cargo run --release --example block_resolvent
//! ```

use fsi_strip::coupling::{assemble_a0, BlockResolvent};
use fsi_strip::linalg;
use fsi_strip::spectral::{BeamFunction, SpectralConfig};
use fsi_strip::stokes::ReferenceDomain;
use fsi_strip::C64;

fn main() -> fsi_strip::Result<()> {
    let cfg = SpectralConfig::new(12, 12);
    let rd = ReferenceDomain::new(&cfg, &BeamFunction::from_fn(&cfg, |s| 0.2 * s.sin()))?;
    let gen = assemble_a0(&rd)?;
    for lambda in [C64::new(1.0, 0.0), C64::new(0.5, 20.0), C64::new(4.0, -3.0)] {
        let blocks = BlockResolvent::new(lambda, &rd)?.matrix(&gen);
        let dense = gen.resolvent_dense(lambda)?;
        let diff = linalg::frobenius(&(&blocks - &dense)) / linalg::frobenius(&dense);
        println!("lambda = {lambda}: ||R||_H = {:.4e}, blocks vs dense {diff:.1e}", gen.resolvent_norm(lambda)?);
    }
    Ok(())
}
