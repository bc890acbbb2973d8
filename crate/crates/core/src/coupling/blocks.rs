//! Resolvent of the coupled generator through beam-space operators.
//!
//! For data `(f, g1, g2)` with `f = Z c0 + E g2` the solution of
//! `(lambda - A0) (w, eta1, eta2) = (f, g1, g2)` is
//! `eta1 = V^{-1} (T f + g2) + (I - V^{-1} A1) g1 / lambda`,
//! `eta2 = lambda V^{-1} (T f + g2) - V^{-1} A1 g1`,
//! `w = S_lambda f + W_lambda eta2`, where `S_lambda f` is the forced Stokes
//! solution and `T f` the beam load it exerts.

use num_complex::Complex64 as C64;

use super::generator::{CoupledGenerator, CoupledState};
use super::operators::{a1_power_matrix, factor_v, v_operators, BeamOperators, FactoredV};
use crate::error::{FsiError, Result};
use crate::linalg::{self, CMat, Lu};
use crate::stokes::ReferenceDomain;

/// Factorizations needed to apply the block resolvent at one `lambda`.
pub struct BlockResolvent<'a> {
    pub lambda: C64,
    pub ops: BeamOperators,
    pub v: FactoredV,
    rd: &'a ReferenceDomain,
    stokes: Lu,
    a1: CMat,
}

impl<'a> BlockResolvent<'a> {
    pub fn new(lambda: C64, rd: &'a ReferenceDomain) -> Result<Self> {
        if lambda.norm() == 0.0 {
            return Err(FsiError::Numerical(
                "block resolvent needs lambda != 0".into(),
            ));
        }
        let sys = &rd.sys;
        let ops = BeamOperators::new(lambda, sys)?;
        let vops = v_operators(&ops, 0.0, rd.cfg());
        let v = factor_v(&vops.v.entries)?;
        let stokes = Lu::new(&linalg::axpby(lambda, &sys.mzz, linalg::ONE, &sys.azz))?;
        Ok(BlockResolvent {
            lambda,
            ops,
            v,
            rd,
            stokes,
            a1: a1_power_matrix(rd.cfg(), 1.0),
        })
    }

    /// Forced Stokes coefficients `c^ = (lambda Mzz + Azz)^{-1} Z^H M f` and
    /// the load `T f = (E^H M f - (lambda Mez + Aez) c^) / L`.
    pub fn forced(&self, mf: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let sys = &self.rd.sys;
        let zmf = linalg::matvec(&sys.z.adjoint().to_owned(), mf);
        let c = self.stokes.solve_vec(&zmf);
        let coupling = linalg::axpby(self.lambda.conj(), &sys.mze, linalg::ONE, &sys.aze);
        let back = linalg::matvec(&linalg::adjoint(&coupling), &c);
        let emf = linalg::matvec(&sys.lift.adjoint().to_owned(), mf);
        let inv_l = 1.0 / self.rd.cfg().length;
        let load = emf
            .iter()
            .zip(&back)
            .map(|(e, b)| (e - b) * inv_l)
            .collect();
        (c, load)
    }

    /// Apply the resolvent to ambient data `(f, g1, g2)`; `f` is an ambient
    /// velocity vector whose top trace is `g2 e2`.
    pub fn apply_ambient(&self, f: &[C64], g1: &[C64], g2: &[C64]) -> CoupledState {
        let sys = &self.rd.sys;
        let lambda = self.lambda;
        let mf = linalg::matvec(&sys.mass, f);
        let (c_hat, load) = self.forced(&mf);
        let rhs: Vec<C64> = load.iter().zip(g2).map(|(a, b)| a + b).collect();
        let vr = self.v.lu.solve_vec(&rhs);
        let va = self.v.lu.solve_vec(&linalg::matvec(&self.a1, g1));
        let eta1: Vec<C64> = (0..g1.len())
            .map(|i| vr[i] + (g1[i] - va[i]) / lambda)
            .collect();
        let eta2: Vec<C64> = (0..g1.len()).map(|i| lambda * vr[i] - va[i]).collect();
        let corr = linalg::matvec(&self.ops.correction, &eta2);
        let fluid = c_hat.iter().zip(&corr).map(|(a, b)| a + b).collect();
        CoupledState { fluid, eta1, eta2 }
    }

    /// Apply the resolvent to a state of the energy space.
    pub fn apply(&self, z: &CoupledState) -> CoupledState {
        let f = z.velocity_vector(self.rd);
        self.apply_ambient(&f, &z.eta1, &z.eta2)
    }

    /// Matrix of the resolvent in state coordinates, column by column.
    pub fn matrix(&self, gen: &CoupledGenerator) -> CMat {
        let n = gen.dim();
        let mut out = linalg::zeros(n, n);
        for col in 0..n {
            let mut e = vec![linalg::ZERO; n];
            e[col] = linalg::ONE;
            let z = CoupledState::unpack(&e, gen.nz, gen.nb);
            let r = self.apply(&z).pack();
            for (row, v) in r.into_iter().enumerate() {
                out[(row, col)] = v;
            }
        }
        out
    }
}

/// Block resolvent matrix at `lambda` in state coordinates.
pub fn resolvent_blocks(lambda: C64, gen: &CoupledGenerator, rd: &ReferenceDomain) -> Result<CMat> {
    Ok(BlockResolvent::new(lambda, rd)?.matrix(gen))
}
