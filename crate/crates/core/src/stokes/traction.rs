//! Strong-form top-wall traction by spectral differentiation, and the
//! bundled reference domain (transform plus assembled Stokes system).

use num_complex::Complex64 as C64;

use super::system::{StokesSolution, StokesSystem};
use crate::error::Result;
use crate::geometry::flat_ops::apply_d_trace_samples;
use crate::geometry::{build_transform, FluidField, PressureField, StripGrid, TransformOps};
use crate::spectral::{fourier, project_mean_zero, BeamFunction, SpectralConfig};

/// Flat-strip transform onto the reference domain and the Stokes system on it.
#[derive(Clone, Debug)]
pub struct ReferenceDomain {
    pub tf: TransformOps,
    pub sys: StokesSystem,
}

impl ReferenceDomain {
    /// Reference domain under `1 + eta10`.
    pub fn new(cfg: &SpectralConfig, eta10: &BeamFunction) -> Result<Self> {
        cfg.validate()?;
        let grid = StripGrid::new(cfg);
        let zero = BeamFunction::zeros(cfg.kmax());
        let tf = build_transform(eta10, &zero, &grid)?;
        let sys = StokesSystem::new(&tf)?;
        Ok(ReferenceDomain { tf, sys })
    }

    pub fn cfg(&self) -> &SpectralConfig {
        &self.sys.grid.cfg
    }

    pub fn grid(&self) -> &StripGrid {
        &self.sys.grid
    }
}

fn real_traction(tf: &TransformOps, w: &FluidField, q: &PressureField) -> Result<Vec<C64>> {
    let grid = &tf.grid;
    let n1 = tf.n1();
    let d = apply_d_trace_samples(tf, w)?;
    let qtop = grid.trace(&q.values, true).samples(n1);
    let nu = grid.cfg.nu;
    let vals: Vec<f64> = d.iter().zip(&qtop).map(|(d, q)| 2.0 * nu * d - q).collect();
    Ok(fourier::coeffs_from_real(&vals, grid.cfg.kmax()))
}

/// `M[(2 nu D(w) - q I) n . e2 |dgamma/ds|]` on the top wall, from the flat
/// representation of `(w, q)` by spectral differentiation.
pub fn strong_traction(
    tf: &TransformOps,
    w: &FluidField,
    q: &PressureField,
) -> Result<BeamFunction> {
    let grid = &tf.grid;
    let (wr, wi) = w.real_imag(grid);
    let (qr, qi) = q.real_imag(grid);
    let a = real_traction(tf, &wr, &qr)?;
    let b = real_traction(tf, &wi, &qi)?;
    let coeffs = a
        .iter()
        .zip(&b)
        .map(|(x, y)| x + C64::new(0.0, 1.0) * y)
        .collect();
    Ok(project_mean_zero(&BeamFunction { coeffs }))
}

/// Strong-form traction of a computed solution.
pub fn solution_strong_traction(tf: &TransformOps, sol: &StokesSolution) -> Result<BeamFunction> {
    strong_traction(tf, &sol.w, &sol.q)
}
