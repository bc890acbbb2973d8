//! Linear evolution of the coupled system: energy decay, conserved mass and
//! the two sides of the linear estimate.
//!
//! ```bash
//! cargo run --release --example linear_trajectory
//! ```

use fsi_strip::coupling::assemble_a0;
use fsi_strip::evolution::{linear_estimate, solve_linear, EvolutionConfig, ForcingPair, InitialData, Scheme};
use fsi_strip::spectral::{BeamFunction, SpectralConfig};
use fsi_strip::stokes::ReferenceDomain;

fn main() -> fsi_strip::Result<()> {
    let cfg = SpectralConfig::new(16, 12);
    let rd = ReferenceDomain::new(&cfg, &BeamFunction::from_fn(&cfg, |s| 0.1 * s.sin()))?;
    let gen = assemble_a0(&rd)?;
    let data = InitialData::with_lifted_velocity(
        &rd,
        BeamFunction::from_fn(&cfg, |s| 0.05 * (2.0 * s).cos()),
        BeamFunction::from_fn(&cfg, |s| 0.1 * s.sin()),
    )?;
    let evo = EvolutionConfig {
        dt: 0.02,
        horizon: 0.5,
        scheme: Scheme::CrankNicolson,
        ..EvolutionConfig::default()
    };
    let traj = solve_linear(&rd, &gen, &data, &ForcingPair::zero(), &evo)?;
    for i in (0..traj.len()).step_by(5) {
        println!(
            "t {:.2}  energy {:.6e}  mass {:+.1e}  min(1+eta) {:.5}",
            traj.times[i], traj.energy[i], traj.mass[i], traj.min_gap[i]
        );
    }
    let est = linear_estimate(&rd, &traj, &data);
    println!("estimate: lhs {:.4e}, rhs {:.4e}, ratio {:.4}", est.lhs, est.rhs, est.ratio);
    Ok(())
}
