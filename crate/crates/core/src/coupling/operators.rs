//! Beam-side operators built from the lifted Stokes problem.
//!
//! Matrices act on coordinates in the mean-zero beam basis
//! `{exp(i xi_k s) : 0 < |k| <= kmax}`. That basis is orthogonal with weight
//! `L`, so the `L^2(I)` operator norm of a beam operator is the spectral
//! norm of its matrix and self-adjoint operators have Hermitian matrices.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{FsiError, Result};
use crate::linalg::{self, CMat, Lu, OperatorMatrix, SpaceDesc};
use crate::spectral::{BeamFunction, SpectralConfig};
use crate::stokes::{strong_traction, ReferenceDomain, StokesSystem};

/// Diagonal matrix of `A1^theta` on the beam basis.
pub fn a1_power_matrix(cfg: &SpectralConfig, theta: f64) -> CMat {
    linalg::from_real_diag(&cfg.beam_symbol_powers(theta))
}

pub(crate) fn beam_space(a1_power: f64) -> SpaceDesc {
    SpaceDesc::new(&format!("D(A1^{a1_power})"), Some(a1_power))
}

/// `W_lambda` together with the quadratic forms built from it.
#[derive(Clone, Debug)]
pub struct BeamOperators {
    pub lambda: C64,
    /// Ambient matrix of `W_lambda` (one column per beam basis function).
    pub w: CMat,
    /// Divergence-free correction `C` with `W = E + Z C`.
    pub correction: CMat,
    /// Added-mass operator `K_lambda` (Gram form).
    pub k: CMat,
    /// Damping operator `G_lambda`.
    pub g: CMat,
    /// `L_lambda` from the weak traction functional.
    pub l: CMat,
}

impl BeamOperators {
    pub fn new(lambda: C64, sys: &StokesSystem) -> Result<Self> {
        let res = sys.factor(lambda)?;
        let correction = res.lifted_coefficients();
        let w = &sys.lift + &sys.z * &correction;
        let inv_l = C64::new(1.0 / sys.grid.cfg.length, 0.0);
        let wh = w.adjoint();
        let mw = &sys.mass * &w;
        let aw = &sys.visc * &w;
        let k = linalg::scale(&(wh * &mw), inv_l);
        let g = linalg::scale(&(wh * &aw), inv_l);
        let eh = sys.lift.adjoint();
        let l = linalg::scale(&(eh * linalg::axpby(lambda, &mw, linalg::ONE, &aw)), inv_l);
        Ok(BeamOperators {
            lambda,
            w,
            correction,
            k,
            g,
            l,
        })
    }

    pub fn beam_dim(&self) -> usize {
        self.k.nrows()
    }
}

fn tagged(name: &str, entries: CMat, lambda: C64, domain: f64, codomain: f64) -> OperatorMatrix {
    OperatorMatrix::new(name, entries, beam_space(domain), beam_space(codomain)).with_lambda(lambda)
}

/// `K_lambda` from the Gram form `<K eta, zeta> = int w_eta . conj(w_zeta)`.
pub fn assemble_k(lambda: C64, rd: &ReferenceDomain) -> Result<OperatorMatrix> {
    let ops = BeamOperators::new(lambda, &rd.sys)?;
    let mut m = tagged("K", ops.k, lambda, 0.0, 0.0);
    m.check_hermitian(1e-8);
    Ok(m)
}

/// `G_lambda` from `<G eta, zeta> = 2 nu int D w_eta : conj(D w_zeta)`.
pub fn assemble_g(lambda: C64, rd: &ReferenceDomain) -> Result<OperatorMatrix> {
    let ops = BeamOperators::new(lambda, &rd.sys)?;
    let mut m = tagged("G", ops.g, lambda, 0.0, 0.0);
    m.check_hermitian(1e-8);
    Ok(m)
}

/// `K_lambda eta = -Lambda*(T(phi, pi) n)` where `(phi, pi)` solves the forced
/// problem at `conj(lambda)` with right-hand side `W_lambda eta`; the traction
/// is evaluated in strong form.
pub fn assemble_k_adjoint(lambda: C64, rd: &ReferenceDomain) -> Result<OperatorMatrix> {
    let sys = &rd.sys;
    let ops = BeamOperators::new(lambda, sys)?;
    let res = sys.factor(lambda.conj())?;
    let nb = ops.beam_dim();
    let mw = &sys.mass * &ops.w;
    let rhs = sys.z.adjoint() * &mw;
    let coeffs = res.solve_reduced(&rhs);
    let phi = &sys.z * &coeffs;
    let mut k = linalg::zeros(nb, nb);
    for col in 0..nb {
        let v = linalg::col_to_vec(phi.as_ref(), col);
        let mf = linalg::col_to_vec(mw.as_ref(), col);
        let sol = sys.complete_solution(lambda.conj(), v, Some(&mf))?;
        let t = strong_traction(&rd.tf, &sol.w, &sol.q)?.beam_vector();
        for (row, x) in t.iter().enumerate() {
            k[(row, col)] = -x;
        }
    }
    Ok(tagged("K (adjoint traction)", k, lambda, 0.0, 0.0))
}

/// `L_lambda eta = Lambda*(T(W_lambda eta, Q_lambda eta) n)` with the traction
/// evaluated in strong form.
pub fn assemble_l_strong(lambda: C64, rd: &ReferenceDomain) -> Result<OperatorMatrix> {
    let sys = &rd.sys;
    let ops = BeamOperators::new(lambda, sys)?;
    let nb = ops.beam_dim();
    let mut l = linalg::zeros(nb, nb);
    for col in 0..nb {
        let v = linalg::col_to_vec(ops.w.as_ref(), col);
        let sol = sys.complete_solution(lambda, v, None)?;
        let t = strong_traction(&rd.tf, &sol.w, &sol.q)?.beam_vector();
        for (row, x) in t.iter().enumerate() {
            l[(row, col)] = *x;
        }
    }
    Ok(tagged("L (strong traction)", l, lambda, 1.0, 0.0))
}

/// `L_lambda` from the weak traction functional.
pub fn assemble_l(lambda: C64, rd: &ReferenceDomain) -> Result<OperatorMatrix> {
    let ops = BeamOperators::new(lambda, &rd.sys)?;
    Ok(tagged("L", ops.l, lambda, 1.0, 0.0))
}

/// Beam basis indices with `|k| <= frac * kmax`.
pub fn resolved_beam_indices(cfg: &SpectralConfig, frac: f64) -> Vec<usize> {
    let cut = frac * cfg.kmax() as f64;
    cfg.beam_slots()
        .iter()
        .enumerate()
        .filter(|(_, &slot)| (cfg.mode_index(slot).unsigned_abs() as f64) <= cut)
        .map(|(i, _)| i)
        .collect()
}

/// Restriction of a beam operator to the given basis indices.
pub fn restrict(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Empirical coercivity constants of `G_lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoConstants {
    /// `min <G eta, eta> / ||A1^{1/8} eta||^2` at the reference frequency.
    pub rho1: f64,
    /// `max <G eta, eta> / (||A1^{1/8} eta||^2 + |lambda| ||A1^{-1/8} eta||^2)`
    /// over the sampled frequencies.
    pub rho2: f64,
    /// Parameter of the approximate operator, `rho1 / 8`.
    pub rho: f64,
    pub lambda_ref: C64,
}

/// `min <G eta, eta> / ||A1^{1/8} eta||^2`.
pub fn coercivity_constant(g: &CMat, cfg: &SpectralConfig) -> Result<f64> {
    let d = a1_power_matrix(cfg, -0.125);
    let ev = linalg::hermitian_eigenvalues(&(&d * g * &d))?;
    Ok(ev.first().copied().unwrap_or(0.0))
}

/// `max <G eta, eta> / (||A1^{1/8} eta||^2 + |lambda| ||A1^{-1/8} eta||^2)`.
pub fn upper_constant(g: &CMat, lambda: C64, cfg: &SpectralConfig) -> Result<f64> {
    let w: Vec<f64> = cfg
        .beam_symbol_powers(0.25)
        .iter()
        .map(|s| (s + lambda.norm() / s).powf(-0.5))
        .collect();
    let d = linalg::from_real_diag(&w);
    let ev = linalg::hermitian_eigenvalues(&(&d * g * &d))?;
    Ok(ev.last().copied().unwrap_or(0.0))
}

impl RhoConstants {
    /// `rho1` at `lambda_ref`, `rho2` over `lambda_ref` and `others`.
    pub fn estimate(sys: &StokesSystem, lambda_ref: C64, others: &[C64]) -> Result<Self> {
        let cfg = &sys.grid.cfg;
        let g = BeamOperators::new(lambda_ref, sys)?.g;
        let rho1 = coercivity_constant(&g, cfg)?;
        let mut rho2 = upper_constant(&g, lambda_ref, cfg)?;
        for &lam in others {
            let g = BeamOperators::new(lam, sys)?.g;
            rho2 = rho2.max(upper_constant(&g, lam, cfg)?);
        }
        Self::from_parts(rho1, rho2, lambda_ref)
    }

    pub fn from_parts(rho1: f64, rho2: f64, lambda_ref: C64) -> Result<Self> {
        if !(rho1 > 0.0 && rho1.is_finite()) {
            return Err(FsiError::Numerical(format!(
                "damping operator is not coercive: rho1 = {rho1:e}"
            )));
        }
        Ok(RhoConstants {
            rho1,
            rho2,
            rho: rho1 / 8.0,
            lambda_ref,
        })
    }
}

/// `V_lambda`, its approximation `V~_lambda` and `S_lambda = G - 2 rho A1^{1/4}`.
#[derive(Clone, Debug)]
pub struct VOperators {
    pub v: OperatorMatrix,
    pub vtilde: OperatorMatrix,
    pub s: CMat,
}

/// `V = lambda^2 (I + K) + lambda G + A1`, `V~ = lambda^2 (I + K) + 2 rho lambda A1^{1/4} + A1`.
pub fn v_operators(ops: &BeamOperators, rho: f64, cfg: &SpectralConfig) -> VOperators {
    let lambda = ops.lambda;
    let nb = ops.beam_dim();
    let ipk = &linalg::identity(nb) + &ops.k;
    let a1 = a1_power_matrix(cfg, 1.0);
    let a14 = a1_power_matrix(cfg, 0.25);
    let inertia = linalg::scale(&ipk, lambda * lambda);
    let v = &inertia + linalg::scale(&ops.g, lambda) + &a1;
    let vtilde = &inertia + linalg::scale(&a14, 2.0 * rho * lambda) + &a1;
    let s = &ops.g - linalg::scale(&a14, C64::new(2.0 * rho, 0.0));
    VOperators {
        v: tagged("V", v, lambda, 1.0, 0.0),
        vtilde: tagged("V~", vtilde, lambda, 1.0, 0.0),
        s,
    }
}

/// Assemble `(V_lambda, V~_lambda)`.
pub fn assemble_v(
    lambda: C64,
    rd: &ReferenceDomain,
    rho: &RhoConstants,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let ops = BeamOperators::new(lambda, &rd.sys)?;
    let v = v_operators(&ops, rho.rho, rd.cfg());
    Ok((v.v, v.vtilde))
}

/// LU of `V_lambda` with its smallest singular value and condition number.
pub struct FactoredV {
    pub lu: Lu,
    pub min_singular: f64,
    pub condition: f64,
}

pub fn factor_v(v: &CMat) -> Result<FactoredV> {
    let sv = linalg::singular_values(v)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    if !(smin > 0.0) || smax / smin > 1e14 {
        return Err(FsiError::Numerical(format!(
            "V is numerically singular: sigma_min = {smin:e}, cond = {:e}",
            smax / smin
        )));
    }
    Ok(FactoredV {
        lu: Lu::new(v)?,
        min_singular: smin,
        condition: smax / smin,
    })
}

/// `(V_lambda eta)` applied to beam data (for checks).
pub fn apply_beam(m: &CMat, eta: &BeamFunction) -> BeamFunction {
    BeamFunction::from_beam_vector(eta.kmax(), &linalg::matvec(m, &eta.beam_vector()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn domain(amp: f64) -> ReferenceDomain {
        let cfg = SpectralConfig::new(8, 10);
        let eta = BeamFunction::from_fn(&cfg, |s| amp * s.sin());
        ReferenceDomain::new(&cfg, &eta).unwrap()
    }

    #[test]
    fn v_at_zero_is_beam_operator() {
        let rd = domain(0.2);
        let ops = BeamOperators::new(C64::new(0.0, 0.0), &rd.sys).unwrap();
        let v = v_operators(&ops, 0.1, rd.cfg());
        let a1 = a1_power_matrix(rd.cfg(), 1.0);
        assert!(linalg::frobenius(&(&v.v.entries - &a1)) < 1e-12 * linalg::frobenius(&a1));
    }

    #[test]
    fn v_minus_vtilde_is_lambda_s() {
        let rd = domain(0.2);
        let lam = C64::new(2.0, 3.0);
        let ops = BeamOperators::new(lam, &rd.sys).unwrap();
        let v = v_operators(&ops, 0.05, rd.cfg());
        let d = &v.v.entries - &v.vtilde.entries - linalg::scale(&v.s, lam);
        assert!(linalg::frobenius(&d) < 1e-12 * linalg::frobenius(&v.v.entries));
    }

    #[test]
    fn k_and_g_hermitian_semidefinite() {
        let rd = domain(0.2);
        let ops = BeamOperators::new(C64::new(1.0, 4.0), &rd.sys).unwrap();
        assert!(linalg::hermitian_defect(&ops.k) < 1e-10);
        assert!(linalg::hermitian_defect(&ops.g) < 1e-10);
        assert!(linalg::hermitian_eigenvalues(&ops.k).unwrap()[0] > -1e-12);
        assert!(coercivity_constant(&ops.g, rd.cfg()).unwrap() > 0.0);
    }
}
