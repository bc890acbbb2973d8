//! The coupled fluid–beam generator on the discrete energy space.
//!
//! A state of the discrete energy space `H_h` is `(c, eta1, eta2)`: the fluid
//! velocity is `w = Z c + E eta2` (divergence-free, top trace `eta2 e2`,
//! zero on the bottom) and `eta1`, `eta2` are beam basis coordinates. The
//! energy product is
//! `<z, z'> = int w . conj(w') + (A1^{1/2} eta1, A1^{1/2} eta1') + (eta2, eta2')`
//! with Gram matrix `M_H`. The weak form of the coupled dynamics reads
//! `M_H z' = B z + J^H G_x [F; 0; G]`, so the generator is `A0 = M_H^{-1} B`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::operators::{a1_power_matrix, beam_space};
use crate::error::{FsiError, Result};
use crate::geometry::FluidField;
use crate::linalg::{self, CMat, Lu, OperatorMatrix, SpaceDesc};
use crate::spectral::BeamFunction;
use crate::stokes::ReferenceDomain;

/// Packed state `(c, eta1, eta2)` of the discrete energy space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledState {
    /// Coefficients on the divergence-free basis `Z`.
    pub fluid: Vec<C64>,
    /// Beam deflection (mean-zero basis coordinates).
    pub eta1: Vec<C64>,
    /// Beam velocity (mean-zero basis coordinates).
    pub eta2: Vec<C64>,
}

impl CoupledState {
    pub fn zeros(nz: usize, nb: usize) -> Self {
        CoupledState {
            fluid: vec![linalg::ZERO; nz],
            eta1: vec![linalg::ZERO; nb],
            eta2: vec![linalg::ZERO; nb],
        }
    }

    pub fn pack(&self) -> Vec<C64> {
        let mut v = self.fluid.clone();
        v.extend_from_slice(&self.eta1);
        v.extend_from_slice(&self.eta2);
        v
    }

    pub fn unpack(v: &[C64], nz: usize, nb: usize) -> Self {
        CoupledState {
            fluid: v[..nz].to_vec(),
            eta1: v[nz..nz + nb].to_vec(),
            eta2: v[nz + nb..nz + 2 * nb].to_vec(),
        }
    }

    /// Ambient velocity vector `Z c + E eta2`.
    pub fn velocity_vector(&self, rd: &ReferenceDomain) -> Vec<C64> {
        let mut w = linalg::matvec(&rd.sys.z, &self.fluid);
        let e = linalg::matvec(&rd.sys.lift, &self.eta2);
        for (a, b) in w.iter_mut().zip(&e) {
            *a += b;
        }
        w
    }

    pub fn velocity(&self, rd: &ReferenceDomain) -> FluidField {
        FluidField::from_vector(rd.grid(), &self.velocity_vector(rd))
    }

    pub fn beam(&self, kmax: usize) -> (BeamFunction, BeamFunction) {
        (
            BeamFunction::from_beam_vector(kmax, &self.eta1),
            BeamFunction::from_beam_vector(kmax, &self.eta2),
        )
    }
}

/// Discrete generator `A0` with the energy Gram matrix and its factor.
#[derive(Clone, Debug)]
pub struct CoupledGenerator {
    pub nz: usize,
    pub nb: usize,
    /// Energy Gram matrix `M_H`.
    pub mass_h: CMat,
    /// Dynamics form `B` (`Re z^H B z <= 0`).
    pub dynamics: CMat,
    /// `A0 = M_H^{-1} B` in state coordinates.
    pub a0: OperatorMatrix,
    /// Lower Cholesky factor `R` of `M_H = R R^H`.
    pub chol: CMat,
    /// `R^{-1} B R^{-H}`: the generator in an energy-orthonormal basis.
    pub a_hat: CMat,
    /// Description of the constraint space.
    pub basis: String,
}

fn place(dst: &mut CMat, r0: usize, c0: usize, src: &CMat, scale: C64) {
    for i in 0..src.nrows() {
        for j in 0..src.ncols() {
            dst[(r0 + i, c0 + j)] += scale * src[(i, j)];
        }
    }
}

/// Assemble the discrete energy space, its projection and the generator.
pub fn assemble_a0(rd: &ReferenceDomain) -> Result<CoupledGenerator> {
    let sys = &rd.sys;
    let cfg = rd.cfg();
    let nz = sys.nz();
    let nb = sys.beam_dim();
    let n = nz + 2 * nb;
    let len = C64::new(cfg.length, 0.0);
    let one = linalg::ONE;
    let a1 = a1_power_matrix(cfg, 1.0);
    let id = linalg::identity(nb);

    let mut mass_h = linalg::zeros(n, n);
    place(&mut mass_h, 0, 0, &sys.mzz, one);
    place(&mut mass_h, 0, nz + nb, &sys.mze, one);
    place(&mut mass_h, nz + nb, 0, &sys.mze.adjoint().to_owned(), one);
    place(&mut mass_h, nz + nb, nz + nb, &sys.mee, one);
    place(&mut mass_h, nz + nb, nz + nb, &id, len);
    place(&mut mass_h, nz, nz, &a1, len);

    let mut dynamics = linalg::zeros(n, n);
    let m1 = -one;
    place(&mut dynamics, 0, 0, &sys.azz, m1);
    place(&mut dynamics, 0, nz + nb, &sys.aze, m1);
    place(&mut dynamics, nz + nb, 0, &sys.aze.adjoint().to_owned(), m1);
    place(&mut dynamics, nz + nb, nz + nb, &sys.aee, m1);
    place(&mut dynamics, nz, nz + nb, &a1, len);
    place(&mut dynamics, nz + nb, nz, &a1, -len);

    let chol = linalg::cholesky(&mass_h)
        .map_err(|e| FsiError::Numerical(format!("energy Gram matrix: {e}")))?;
    let t = linalg::solve_lower(&chol, &dynamics);
    let a_hat = linalg::solve_lower(&chol, &t.adjoint().to_owned())
        .adjoint()
        .to_owned();
    let a0 = Lu::new(&mass_h)?.solve(&dynamics);
    let state = SpaceDesc::new("H_h", None);
    Ok(CoupledGenerator {
        nz,
        nb,
        mass_h,
        dynamics,
        a0: OperatorMatrix::new("A0", a0, state.clone(), state),
        chol,
        a_hat,
        basis: format!(
            "H_h = span(Z c + E eta2, eta1, eta2): {nz} divergence-free fluid modes, {nb} beam modes"
        ),
    })
}

impl CoupledGenerator {
    pub fn dim(&self) -> usize {
        self.nz + 2 * self.nb
    }

    /// Energy inner product `<z1, z2>_H = z2^H M_H z1`.
    pub fn inner(&self, z1: &[C64], z2: &[C64]) -> C64 {
        linalg::dot(z2, &linalg::matvec(&self.mass_h, z1))
    }

    pub fn energy(&self, z: &[C64]) -> f64 {
        self.inner(z, z).re.max(0.0)
    }

    /// Energy-orthonormal coordinates `R^H z`.
    pub fn to_orthonormal(&self, z: &[C64]) -> Vec<C64> {
        linalg::matvec(&self.chol.adjoint().to_owned(), z)
    }

    /// Inverse of [`CoupledGenerator::to_orthonormal`].
    pub fn from_orthonormal(&self, x: &[C64]) -> Vec<C64> {
        let y = linalg::solve_lower_adjoint(&self.chol, &linalg::column(x));
        linalg::col_to_vec(y.as_ref(), 0)
    }

    /// `(lambda - A0)^{-1}` in state coordinates, by a dense solve.
    pub fn resolvent_dense(&self, lambda: C64) -> Result<CMat> {
        let s = linalg::axpby(lambda, &self.mass_h, -linalg::ONE, &self.dynamics);
        Ok(Lu::new(&s)?.solve(&self.mass_h))
    }

    /// `lambda I - A_hat`.
    pub fn shifted_orthonormal(&self, lambda: C64) -> CMat {
        let n = self.dim();
        CMat::from_fn(n, n, |i, j| {
            let d = if i == j { lambda } else { linalg::ZERO };
            d - self.a_hat[(i, j)]
        })
    }

    /// Energy-norm operator norm `||(lambda - A0)^{-1}||_H`.
    pub fn resolvent_norm(&self, lambda: C64) -> Result<f64> {
        let smin = linalg::min_singular(&self.shifted_orthonormal(lambda))?;
        if smin <= 0.0 {
            return Err(FsiError::Numerical(format!(
                "lambda = {lambda} is an eigenvalue of A0"
            )));
        }
        Ok(1.0 / smin)
    }

    /// Eigenvalues of `A0`, sorted by decreasing real part.
    pub fn spectrum(&self) -> Result<Vec<C64>> {
        let mut ev = linalg::eigenvalues(&self.a_hat)?;
        ev.sort_by(|a, b| b.re.total_cmp(&a.re));
        Ok(ev)
    }

    /// Largest real part of the spectrum.
    pub fn spectral_abscissa(&self) -> Result<f64> {
        Ok(self
            .spectrum()?
            .first()
            .map(|z| z.re)
            .unwrap_or(f64::NEG_INFINITY))
    }

    /// `Re <A0 z, z>_H = Re z^H B z`.
    pub fn dissipation(&self, z: &[C64]) -> f64 {
        linalg::dot(z, &linalg::matvec(&self.dynamics, z)).re
    }

    /// `J^H G_x [f; g1; g2]`: the energy pairing of ambient data with every
    /// state basis vector. `M_H^{-1}` of this is `P0 [f; g1; g2]`.
    pub fn ambient_pairing(
        &self,
        rd: &ReferenceDomain,
        f: &[C64],
        g1: &[C64],
        g2: &[C64],
    ) -> Vec<C64> {
        let sys = &rd.sys;
        let cfg = rd.cfg();
        let mf = linalg::matvec(&sys.mass, f);
        let mut out = linalg::matvec(&sys.z.adjoint().to_owned(), &mf);
        let sym = cfg.beam_symbol_powers(1.0);
        out.extend(g1.iter().zip(&sym).map(|(g, s)| g * (cfg.length * s)));
        let ef = linalg::matvec(&sys.lift.adjoint().to_owned(), &mf);
        out.extend(ef.iter().zip(g2).map(|(e, g)| e + g * cfg.length));
        out
    }

    /// `P0 [f; g1; g2]` in state coordinates.
    pub fn project(
        &self,
        rd: &ReferenceDomain,
        f: &[C64],
        g1: &[C64],
        g2: &[C64],
    ) -> Result<Vec<C64>> {
        let rhs = self.ambient_pairing(rd, f, g1, g2);
        let y = linalg::solve_lower(&self.chol, &linalg::column(&rhs));
        let x = linalg::solve_lower_adjoint(&self.chol, &y);
        Ok(linalg::col_to_vec(x.as_ref(), 0))
    }

    /// Gram matrix in state coordinates of
    /// `|w|_fluid^2 + L |A1^{p1} eta1|^2 + L |A1^{p2} eta2|^2`, where `fluid`
    /// is an ambient Gram matrix and `w = Z c + E eta2`.
    pub fn weighted_gram(&self, rd: &ReferenceDomain, fluid: &CMat, p1: f64, p2: f64) -> CMat {
        let sys = &rd.sys;
        let cfg = rd.cfg();
        let nb = self.nb;
        let mut jf = linalg::zeros(sys.ambient_dim(), self.dim());
        place(&mut jf, 0, 0, &sys.z, linalg::ONE);
        place(&mut jf, 0, self.nz + nb, &sys.lift, linalg::ONE);
        let mut g = jf.adjoint() * fluid * &jf;
        let len = C64::new(cfg.length, 0.0);
        place(&mut g, self.nz, self.nz, &a1_power_matrix(cfg, 2.0 * p1), len);
        place(&mut g, self.nz + nb, self.nz + nb, &a1_power_matrix(cfg, 2.0 * p2), len);
        g
    }

    /// Ambient matrix of `P0` (ambient velocity, eta1, eta2 in and out),
    /// together with the ambient Gram matrix `G_x` it is orthogonal for.
    pub fn projection_matrix(&self, rd: &ReferenceDomain) -> Result<(OperatorMatrix, CMat)> {
        let sys = &rd.sys;
        let cfg = rd.cfg();
        let na = sys.ambient_dim();
        let nb = self.nb;
        let nx = na + 2 * nb;
        let len = C64::new(cfg.length, 0.0);
        let mut gx = linalg::zeros(nx, nx);
        place(&mut gx, 0, 0, &sys.mass, linalg::ONE);
        place(&mut gx, na, na, &a1_power_matrix(cfg, 1.0), len);
        place(&mut gx, na + nb, na + nb, &linalg::identity(nb), len);
        let mut j = linalg::zeros(nx, self.dim());
        place(&mut j, 0, 0, &sys.z, linalg::ONE);
        place(&mut j, 0, self.nz + nb, &sys.lift, linalg::ONE);
        place(&mut j, na, self.nz, &linalg::identity(nb), linalg::ONE);
        place(
            &mut j,
            na + nb,
            self.nz + nb,
            &linalg::identity(nb),
            linalg::ONE,
        );
        let jhg = j.adjoint() * &gx;
        let p = &j * Lu::new(&self.mass_h)?.solve(&jhg);
        let space = SpaceDesc::new("L2 x D(A1^1/2) x L2", None);
        Ok((OperatorMatrix::new("P0", p, space.clone(), space), gx))
    }
}

/// Beam-space descriptor helper re-exported for reports.
pub fn state_space() -> SpaceDesc {
    beam_space(0.5)
}
