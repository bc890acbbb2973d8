//! Added-mass and damping operators, their structure and the coercivity
//! constants.
//!
//! ```bash
//! cargo run --release --example added_mass_operators
//! ```

use fsi_strip::coupling::{assemble_l, coercivity_constant, BeamOperators, RhoConstants};
use fsi_strip::linalg;
use fsi_strip::spectral::{BeamFunction, SpectralConfig};
use fsi_strip::stokes::ReferenceDomain;
use fsi_strip::C64;

fn main() -> fsi_strip::Result<()> {
    let cfg = SpectralConfig::new(16, 16);
    let rd = ReferenceDomain::new(&cfg, &BeamFunction::from_fn(&cfg, |s| 0.2 * s.sin()))?;
    for tau in [1.0, 10.0, 100.0] {
        let lambda = C64::new(0.0, tau);
        let ops = BeamOperators::new(lambda, &rd.sys)?;
        let herm = linalg::frobenius(&(&ops.k - ops.k.adjoint())) / linalg::frobenius(&ops.k);
        let kmin = linalg::hermitian_eigenvalues(&ops.k)?[0];
        let l = assemble_l(lambda, &rd)?.entries;
        let combo = linalg::axpby(lambda, &ops.k, linalg::ONE, &ops.g);
        let ident = linalg::frobenius(&(&l - &combo)) / linalg::frobenius(&l);
        println!(
            "tau {tau:>5}: ||K|| {:.4e}, K hermitian defect {herm:.1e}, min eig K {kmin:.3e}, \
             rho1 {:.4}, |L - (lambda K + G)| {ident:.1e}",
            linalg::op_norm(&ops.k)?,
            coercivity_constant(&ops.g, &cfg)?
        );
    }
    let rho = RhoConstants::estimate(&rd.sys, C64::new(0.0, 1.0), &[C64::new(0.0, 100.0)])?;
    println!("rho1 {:.4}, rho2 {:.4}, rho {:.4}", rho.rho1, rho.rho2, rho.rho);
    Ok(())
}
