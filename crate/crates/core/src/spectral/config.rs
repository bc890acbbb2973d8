use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{FsiError, Result};

/// Discretization and physical parameters of the strip.
///
/// Fourier modes in `s` use the indices `k = -kmax..=kmax` with
/// `kmax = ns/2 - 1`; the Nyquist mode of the `ns`-point grid is not stored.
/// The vertical direction uses `ny` Chebyshev–Gauss–Lobatto nodes on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralConfig {
    /// Period of the strip in `s`.
    #[serde(rename = "L")]
    pub length: f64,
    pub ns: usize,
    pub ny: usize,
    pub nu: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    #[serde(default)]
    pub dealias: bool,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            length: 2.0 * PI,
            ns: 16,
            ny: 16,
            nu: 1.0,
            alpha1: 1.0,
            alpha2: 0.0,
            dealias: false,
        }
    }
}

impl SpectralConfig {
    pub fn new(ns: usize, ny: usize) -> Self {
        SpectralConfig {
            ns,
            ny,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(FsiError::Config(m.to_string()));
        if !(self.length.is_finite() && self.length > 0.0) {
            return bad("L must be positive");
        }
        if self.ns < 8 || self.ns % 2 != 0 {
            return bad("Ns must be even and >= 8");
        }
        if self.ny < 8 {
            return bad("Ny must be >= 8");
        }
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return bad("nu must be positive");
        }
        if !(self.alpha1.is_finite() && self.alpha1 > 0.0) {
            return bad("alpha1 must be positive");
        }
        if !(self.alpha2.is_finite() && self.alpha2 >= 0.0) {
            return bad("alpha2 must be nonnegative");
        }
        Ok(())
    }

    /// Largest stored wavenumber index.
    pub fn kmax(&self) -> usize {
        self.ns / 2 - 1
    }

    /// Number of stored Fourier modes, `2*kmax + 1`.
    pub fn n_modes(&self) -> usize {
        2 * self.kmax() + 1
    }

    /// Dimension of the mean-zero beam space.
    pub fn beam_dim(&self) -> usize {
        2 * self.kmax()
    }

    /// Signed wavenumber index of storage slot `idx`.
    pub fn mode_index(&self, idx: usize) -> isize {
        idx as isize - self.kmax() as isize
    }

    /// Storage slot of signed wavenumber index `k`.
    pub fn mode_slot(&self, k: isize) -> usize {
        (k + self.kmax() as isize) as usize
    }

    /// Angular wavenumber `2 pi k / L`.
    pub fn xi(&self, k: isize) -> f64 {
        2.0 * PI * k as f64 / self.length
    }

    /// Fourier symbol of the beam operator: `alpha1 xi^4 + alpha2 xi^2`.
    pub fn beam_symbol(&self, k: isize) -> f64 {
        let x2 = self.xi(k).powi(2);
        self.alpha1 * x2 * x2 + self.alpha2 * x2
    }

    /// Slots of the nonzero modes, in storage order (the beam basis).
    pub fn beam_slots(&self) -> Vec<usize> {
        (0..self.n_modes())
            .filter(|&i| self.mode_index(i) != 0)
            .collect()
    }

    /// Beam symbol raised to `theta` for each beam basis slot.
    pub fn beam_symbol_powers(&self, theta: f64) -> Vec<f64> {
        self.beam_slots()
            .into_iter()
            .map(|i| self.beam_symbol(self.mode_index(i)).powf(theta))
            .collect()
    }

    /// Same parameters on a different grid.
    pub fn with_resolution(&self, ns: usize, ny: usize) -> Self {
        SpectralConfig {
            ns,
            ny,
            ..self.clone()
        }
    }
}
