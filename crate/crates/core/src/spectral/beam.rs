//! Beam-side objects: Fourier series on the period, the beam operator and
//! its powers, the mean-zero projection and the boundary lifting with its
//! adjoint.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::config::SpectralConfig;
use super::fourier;
use crate::error::{FsiError, Result};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Oversampling factor of the boundary quadrature grid.
pub const BOUNDARY_OVERSAMPLING: usize = 4;

/// Fourier series on the period `[0, L)`; slot `k + kmax` holds `c_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamFunction {
    pub coeffs: Vec<C64>,
}

impl BeamFunction {
    pub fn zeros(kmax: usize) -> Self {
        BeamFunction {
            coeffs: vec![ZERO; 2 * kmax + 1],
        }
    }

    pub fn kmax(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    /// Sample `f` on the `ns`-point grid and transform.
    pub fn from_fn(cfg: &SpectralConfig, f: impl Fn(f64) -> f64) -> Self {
        let pts = fourier::grid_points(cfg.ns, cfg.length);
        let vals: Vec<f64> = pts.iter().map(|&s| f(s)).collect();
        BeamFunction {
            coeffs: fourier::coeffs_from_real(&vals, cfg.kmax()),
        }
    }

    /// Build from `(k, c_k)` pairs.
    pub fn from_modes(kmax: usize, modes: &[(isize, C64)]) -> Self {
        let mut f = Self::zeros(kmax);
        for &(k, c) in modes {
            f.coeffs[(k + kmax as isize) as usize] += c;
        }
        f
    }

    /// Build from coordinates in the mean-zero beam basis (nonzero modes in storage order).
    pub fn from_beam_vector(kmax: usize, v: &[C64]) -> Self {
        assert_eq!(v.len(), 2 * kmax);
        let mut f = Self::zeros(kmax);
        for (i, c) in v.iter().enumerate() {
            let slot = if i < kmax { i } else { i + 1 };
            f.coeffs[slot] = *c;
        }
        f
    }

    /// Coordinates in the mean-zero beam basis (drops `c_0`).
    pub fn beam_vector(&self) -> Vec<C64> {
        let kmax = self.kmax();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(slot, _)| *slot != kmax)
            .map(|(_, c)| *c)
            .collect()
    }

    pub fn coeff(&self, k: isize) -> C64 {
        let kmax = self.kmax() as isize;
        if k.abs() > kmax {
            ZERO
        } else {
            self.coeffs[(k + kmax) as usize]
        }
    }

    pub fn mean(&self) -> C64 {
        self.coeffs[self.kmax()]
    }

    pub fn is_mean_zero(&self, tol: f64) -> bool {
        self.mean().norm() <= tol
    }

    pub fn eval(&self, length: f64, s: f64) -> C64 {
        fourier::eval_at(&self.coeffs, length, s)
    }

    /// Real values on `n` equispaced points.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        fourier::real_samples_from_coeffs(&self.coeffs, n)
    }

    pub fn derivative(&self, length: f64, order: u32) -> Self {
        BeamFunction {
            coeffs: fourier::differentiate(&self.coeffs, length, order),
        }
    }

    pub fn scale(&self, a: C64) -> Self {
        BeamFunction {
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        BeamFunction {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Re-impose conjugate symmetry (real-valued data).
    pub fn symmetrized(mut self) -> Self {
        fourier::symmetrize(&mut self.coeffs);
        self
    }

    /// `L^2(I)` inner product `L sum_k a_k conj(b_k)`.
    pub fn inner(&self, other: &Self, length: f64) -> C64 {
        length
            * self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a * b.conj())
                .sum::<C64>()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Deflection and deflection velocity of the beam.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamState {
    pub eta1: BeamFunction,
    pub eta2: BeamFunction,
}

impl BeamState {
    /// Checks mean-zero data and `1 + eta1 > tol` on an oversampled grid.
    pub fn validate(&self, cfg: &SpectralConfig, tol: f64) -> Result<()> {
        if !self.eta1.is_mean_zero(1e-12) || !self.eta2.is_mean_zero(1e-12) {
            return Err(FsiError::Rejected("beam state must be mean-zero".into()));
        }
        check_no_contact(&self.eta1, cfg, tol, None)
    }
}

/// Error if `1 + eta` drops below `tol` on the boundary quadrature grid.
pub fn check_no_contact(
    eta: &BeamFunction,
    cfg: &SpectralConfig,
    tol: f64,
    time: Option<f64>,
) -> Result<()> {
    let (min_gap, at_s) = min_gap(eta, cfg);
    if min_gap < tol {
        return Err(FsiError::Contact {
            min_gap,
            at_s,
            time,
        });
    }
    Ok(())
}

/// `min_s (1 + eta(s))` over the oversampled grid, with its location.
pub fn min_gap(eta: &BeamFunction, cfg: &SpectralConfig) -> (f64, f64) {
    let n = BOUNDARY_OVERSAMPLING * cfg.ns;
    let vals = eta.samples(n);
    let (j, v) = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(j, v)| (j, *v))
        .unwrap();
    (1.0 + v, cfg.length * j as f64 / n as f64)
}

/// Multiply each coefficient by the beam symbol to the power `theta`.
///
/// Negative powers are rejected on data with a nonzero mean, since the
/// symbol vanishes on constants.
pub fn apply_a1_power(f: &BeamFunction, theta: f64, cfg: &SpectralConfig) -> Result<BeamFunction> {
    if !(-1.0..=1.0).contains(&theta) {
        return Err(FsiError::Rejected(format!(
            "A1 power {theta} outside [-1, 1]"
        )));
    }
    if theta == 0.0 {
        return Ok(f.clone());
    }
    if theta < 0.0 && !f.is_mean_zero(1e-14 * f.max_abs_coeff().max(1.0)) {
        return Err(FsiError::Rejected(
            "negative A1 power applied to data with nonzero mean".into(),
        ));
    }
    Ok(apply_a1_power_unchecked(f, theta, cfg))
}

/// Same as [`apply_a1_power`] without range checks; the mean is dropped.
pub fn apply_a1_power_unchecked(
    f: &BeamFunction,
    theta: f64,
    cfg: &SpectralConfig,
) -> BeamFunction {
    let kmax = f.kmax() as isize;
    BeamFunction {
        coeffs: f
            .coeffs
            .iter()
            .enumerate()
            .map(|(slot, c)| {
                let k = slot as isize - kmax;
                if k == 0 {
                    ZERO
                } else {
                    c * cfg.beam_symbol(k).powf(theta)
                }
            })
            .collect(),
    }
}

/// Orthogonal projection onto mean-zero functions.
pub fn project_mean_zero(f: &BeamFunction) -> BeamFunction {
    let mut g = f.clone();
    let k0 = g.kmax();
    g.coeffs[k0] = ZERO;
    g
}

/// Vector boundary data on the top (parametrized by `s`) and bottom walls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryField {
    pub top: [BeamFunction; 2],
    pub bottom: [BeamFunction; 2],
}

impl BoundaryField {
    pub fn zeros(kmax: usize) -> Self {
        let z = BeamFunction::zeros(kmax);
        BoundaryField {
            top: [z.clone(), z.clone()],
            bottom: [z.clone(), z],
        }
    }

    /// Net flux `int f.n dgamma` through the boundary of the reference domain.
    pub fn flux(&self, eta10: &BeamFunction, cfg: &SpectralConfig) -> f64 {
        let n = BOUNDARY_OVERSAMPLING * cfg.ns;
        let slope = eta10.derivative(cfg.length, 1).samples(n);
        let t1 = self.top[0].samples(n);
        let t2 = self.top[1].samples(n);
        let b2 = self.bottom[1].samples(n);
        let h = cfg.length / n as f64;
        (0..n)
            .map(|j| (-slope[j] * t1[j] + t2[j] - b2[j]) * h)
            .sum()
    }

    /// `L^2(dF)` inner product with arclength weight on the top wall.
    pub fn inner(&self, other: &Self, eta10: &BeamFunction, cfg: &SpectralConfig) -> C64 {
        let n = BOUNDARY_OVERSAMPLING * cfg.ns;
        let arc = arclength_weight(eta10, cfg, n);
        let h = cfg.length / n as f64;
        let mut acc = ZERO;
        for c in 0..2 {
            let a = fourier::samples_from_coeffs(&self.top[c].coeffs, n);
            let b = fourier::samples_from_coeffs(&other.top[c].coeffs, n);
            let ab = fourier::samples_from_coeffs(&self.bottom[c].coeffs, n);
            let bb = fourier::samples_from_coeffs(&other.bottom[c].coeffs, n);
            for j in 0..n {
                acc += (a[j] * b[j].conj() * arc[j] + ab[j] * bb[j].conj()) * h;
            }
        }
        acc
    }
}

/// `(1 + |eta10'|^2)^(1/2)` on `n` equispaced points.
pub fn arclength_weight(eta10: &BeamFunction, cfg: &SpectralConfig, n: usize) -> Vec<f64> {
    eta10
        .derivative(cfg.length, 1)
        .samples(n)
        .into_iter()
        .map(|d| (1.0 + d * d).sqrt())
        .collect()
}

/// Lifting of beam data: `(0, M eta)` on the top wall, zero at the bottom.
pub fn lift_lambda(eta: &BeamFunction, _eta10: &BeamFunction) -> BoundaryField {
    let kmax = eta.kmax();
    let mut g = BoundaryField::zeros(kmax);
    g.top[1] = project_mean_zero(eta);
    g
}

/// Adjoint of [`lift_lambda`]: `M((1 + |eta10'|^2)^(1/2) g_top . e2)`.
pub fn adjoint_lambda_star(
    g: &BoundaryField,
    eta10: &BeamFunction,
    cfg: &SpectralConfig,
) -> BeamFunction {
    let n = BOUNDARY_OVERSAMPLING * cfg.ns;
    let arc = arclength_weight(eta10, cfg, n);
    let vals: Vec<C64> = fourier::samples_from_coeffs(&g.top[1].coeffs, n)
        .into_iter()
        .zip(arc)
        .map(|(v, a)| v * a)
        .collect();
    let coeffs = fourier::coeffs_from_samples(&vals, g.top[1].kmax());
    project_mean_zero(&BeamFunction { coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> SpectralConfig {
        SpectralConfig::new(16, 8)
    }

    #[test]
    fn a1_power_examples() {
        let c = cfg();
        let f = BeamFunction::from_fn(&c, |s| (2.0 * s).cos());
        let g = apply_a1_power(&f, 1.0, &c).unwrap();
        let want = f.scale(C64::new(16.0, 0.0));
        assert!(g.sub(&want).max_abs_coeff() < 1e-12);

        let c2 = SpectralConfig {
            alpha2: 1.0,
            ..c.clone()
        };
        let f = BeamFunction::from_fn(&c2, f64::sin);
        let g = apply_a1_power(&f, 0.5, &c2).unwrap();
        assert!(g.sub(&f.scale(C64::new(2f64.sqrt(), 0.0))).max_abs_coeff() < 1e-12);

        let one = BeamFunction::from_fn(&c, |_| 1.0);
        assert!(apply_a1_power(&one, -0.5, &c).is_err());
        assert_eq!(apply_a1_power(&one, 0.0, &c).unwrap(), one);
    }

    #[test]
    fn projection_examples() {
        let c = cfg();
        let f = BeamFunction::from_fn(&c, |s| 2.0 + (3.0 * s).sin());
        let g = project_mean_zero(&f);
        let want = BeamFunction::from_fn(&c, |s| (3.0 * s).sin());
        assert!(g.sub(&want).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn lambda_star_flat_and_composition() {
        let c = cfg();
        let flat = BeamFunction::zeros(c.kmax());
        let eta = BeamFunction::from_fn(&c, |s| s.cos() + 0.3);
        let g = lift_lambda(&eta, &flat);
        let back = adjoint_lambda_star(&g, &flat, &c);
        assert!(back.sub(&project_mean_zero(&eta)).max_abs_coeff() < 1e-14);

        let mut only_e1 = BoundaryField::zeros(c.kmax());
        only_e1.top[0] = BeamFunction::from_fn(&c, |s| (s).sin() + 2.0);
        assert!(adjoint_lambda_star(&only_e1, &flat, &c).max_abs_coeff() < 1e-15);
        let _ = PI;
    }
}
