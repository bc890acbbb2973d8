//! Run configuration, initial data and time-sampled forcing.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::coupling::CoupledState;
use crate::error::{FsiError, Result};
use crate::geometry::{velocity_sobolev_gram, FluidField, StripGrid, CONTACT_TOL};
use crate::linalg::{self, Lu};
use crate::spectral::{min_gap, BeamFunction, SpectralConfig};
use crate::stokes::ReferenceDomain;

/// Regularity offset in the data norms of the linear estimate.
pub const DATA_EPSILON: f64 = 0.1;
/// Largest admissible residual of the initial-data constraints.
pub const INITIAL_DATA_TOL: f64 = 1e-8;

/// Time discretization of the linear step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    ImplicitEuler,
    CrankNicolson,
}

/// Whether the fixed point evaluates the nonlinear terms or replaces them by
/// zero (which reduces the run to a linear solve).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearTerms {
    #[default]
    Full,
    Zeroed,
}

/// Time stepping and fixed-point parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub dt: f64,
    /// Final time `T`.
    pub horizon: f64,
    pub scheme: Scheme,
    /// Relative update below which the fixed point is accepted.
    pub fp_tol: f64,
    pub fp_max_iter: usize,
    /// Radius `R` of the forcing ball of the fixed point.
    pub radius: f64,
    /// Maximum number of horizon halvings on non-contraction.
    pub halving: usize,
    #[serde(default)]
    pub nonlinear: NonlinearTerms,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            dt: 1e-2,
            horizon: 0.1,
            scheme: Scheme::CrankNicolson,
            fp_tol: 1e-8,
            fp_max_iter: 15,
            radius: 2.0,
            halving: 6,
            nonlinear: NonlinearTerms::Full,
        }
    }
}

impl EvolutionConfig {
    /// Check the parameter ranges; with `data_norm`, also `R >= 1 + data_norm`.
    pub fn validate(&self, data_norm: Option<f64>) -> Result<()> {
        let bad = |m: String| Err(FsiError::Config(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if self.dt > self.horizon {
            return bad(format!("dt = {} exceeds the horizon {}", self.dt, self.horizon));
        }
        if !(self.fp_tol > 0.0 && self.fp_tol < 1.0) {
            return bad(format!("fp_tol must lie in (0, 1), got {}", self.fp_tol));
        }
        if self.fp_max_iter == 0 {
            return bad("fp_max_iter must be at least 1".into());
        }
        if let Some(n) = data_norm {
            if self.radius < 1.0 + n {
                return bad(format!(
                    "radius {} is below 1 + data norm = {}",
                    self.radius,
                    1.0 + n
                ));
            }
        } else if self.radius < 1.0 {
            return bad(format!("radius must be at least 1, got {}", self.radius));
        }
        Ok(())
    }

    /// Number of steps and the step actually used to reach `horizon` exactly.
    pub fn steps_for(&self, horizon: f64) -> (usize, f64) {
        let n = ((horizon / self.dt).round() as usize).max(1);
        (n, horizon / n as f64)
    }
}

/// Initial velocity (flat-strip Piola representation), deflection and
/// deflection rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub w0: FluidField,
    pub eta1: BeamFunction,
    pub eta2: BeamFunction,
}

impl InitialData {
    pub fn zeros(grid: &StripGrid) -> Self {
        let kmax = grid.cfg.kmax();
        InitialData {
            w0: FluidField::zeros(grid),
            eta1: BeamFunction::zeros(kmax),
            eta2: BeamFunction::zeros(kmax),
        }
    }

    /// Beam data with the compatible velocity `W_1 eta2`: the lifted Stokes
    /// solution at `lambda = 1`, divergence-free with top trace `eta2 e2`.
    pub fn with_lifted_velocity(
        rd: &ReferenceDomain,
        eta1: BeamFunction,
        eta2: BeamFunction,
    ) -> Result<Self> {
        let w0 = crate::stokes::solve_lifted(linalg::ONE, &eta2, &rd.sys)?.w;
        Ok(InitialData { w0, eta1, eta2 })
    }

    /// `||w0||_{H1} + ||eta1||_{D(A1^{3/4+eps})} + ||eta2||_{D(A1^{1/4+eps})}`.
    pub fn norm(&self, grid: &StripGrid) -> f64 {
        let cfg = &grid.cfg;
        let w = self.w0.to_vector(grid);
        let h1 = velocity_sobolev_gram(grid, 1);
        let wn = linalg::dot(&w, &linalg::matvec(&h1, &w)).re.max(0.0).sqrt();
        wn + beam_power_norm(cfg, &self.eta1.beam_vector(), 0.75 + DATA_EPSILON)
            + beam_power_norm(cfg, &self.eta2.beam_vector(), 0.25 + DATA_EPSILON)
    }
}

/// `||A1^theta eta||` for beam basis coordinates.
pub fn beam_power_norm(cfg: &SpectralConfig, v: &[C64], theta: f64) -> f64 {
    let sym = cfg.beam_symbol_powers(2.0 * theta);
    let s: f64 = v.iter().zip(&sym).map(|(x, w)| x.norm_sqr() * w).sum();
    (cfg.length * s).sqrt()
}

/// Constraint residuals of initial data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDiagnostics {
    pub mean_eta1: f64,
    pub mean_eta2: f64,
    /// `min (1 + eta1)`.
    pub min_gap: f64,
    pub divergence: f64,
    /// `max |w0(s, 1) - eta2 e2|` over the Fourier coefficients.
    pub top_trace: f64,
    /// `max |w0(s, 0)|` over the Fourier coefficients.
    pub bottom_trace: f64,
}

impl InitialDiagnostics {
    fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |name: &str, v: f64| {
            if !(v <= INITIAL_DATA_TOL) {
                out.push(format!("{name} = {v:.3e}"));
            }
        };
        push("mean(eta1)", self.mean_eta1);
        push("mean(eta2)", self.mean_eta2);
        push("divergence", self.divergence);
        push("top trace", self.top_trace);
        push("bottom trace", self.bottom_trace);
        out
    }
}

/// Check mean-zero beam data, no contact, a divergence-free velocity, the
/// top trace `w0(s, 1) = eta2 e2` and `w0 = 0` on the bottom.
pub fn validate_initial_data(rd: &ReferenceDomain, data: &InitialData) -> Result<InitialDiagnostics> {
    let grid = rd.grid();
    let cfg = rd.cfg();
    let (gap, at_s) = min_gap(&data.eta1, cfg);
    if gap < CONTACT_TOL {
        return Err(FsiError::Contact {
            min_gap: gap,
            at_s,
            time: Some(0.0),
        });
    }
    let w = data.w0.to_vector(grid);
    let divergence = rd
        .sys
        .divergence(&w)
        .iter()
        .map(|x| x.norm())
        .fold(0.0, f64::max);
    let kmax = cfg.kmax();
    let top = [grid.trace(&data.w0.comps[0], true), grid.trace(&data.w0.comps[1], true)];
    let bottom = [grid.trace(&data.w0.comps[0], false), grid.trace(&data.w0.comps[1], false)];
    let target = crate::spectral::fourier::resize(&data.eta2.coeffs, kmax);
    let top_trace = top[0]
        .max_abs_coeff()
        .max(BeamFunction { coeffs: target }.sub(&top[1]).max_abs_coeff());
    let bottom_trace = bottom[0].max_abs_coeff().max(bottom[1].max_abs_coeff());
    let diag = InitialDiagnostics {
        mean_eta1: data.eta1.mean().norm(),
        mean_eta2: data.eta2.mean().norm(),
        min_gap: gap,
        divergence,
        top_trace,
        bottom_trace,
    };
    let bad = diag.violations();
    if bad.is_empty() {
        Ok(diag)
    } else {
        Err(FsiError::Rejected(format!(
            "initial data violates constraints: {}",
            bad.join(", ")
        )))
    }
}

/// State coordinates of validated data: `c` solves the Galerkin projection
/// of `w0 - E eta2` onto the divergence-free basis.
pub fn initial_state(rd: &ReferenceDomain, data: &InitialData) -> Result<CoupledState> {
    let sys = &rd.sys;
    let kmax = rd.cfg().kmax();
    let eta2 = BeamFunction {
        coeffs: crate::spectral::fourier::resize(&data.eta2.coeffs, kmax),
    };
    let eta1 = BeamFunction {
        coeffs: crate::spectral::fourier::resize(&data.eta1.coeffs, kmax),
    };
    let mut r = data.w0.to_vector(rd.grid());
    for (a, b) in r.iter_mut().zip(sys.lift_vector(&eta2)) {
        *a -= b;
    }
    let rhs = linalg::matvec(&sys.z.adjoint().to_owned(), &linalg::matvec(&sys.mass, &r));
    let fluid = Lu::new(&sys.mzz)?.solve_vec(&rhs);
    Ok(CoupledState {
        fluid,
        eta1: eta1.beam_vector(),
        eta2: eta2.beam_vector(),
    })
}

/// Time samples of the fluid force density `F` and the beam forcing `G`,
/// linearly interpolated in between. An empty pair is identically zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ForcingPair {
    pub times: Vec<f64>,
    pub fluid: Vec<FluidField>,
    pub beam: Vec<BeamFunction>,
}

impl ForcingPair {
    pub fn zero() -> Self {
        ForcingPair::default()
    }

    pub fn is_zero(&self) -> bool {
        self.times.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.fluid.len() != self.times.len() || self.beam.len() != self.times.len() {
            return Err(FsiError::Rejected(
                "forcing samples and times differ in length".into(),
            ));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(FsiError::Rejected(
                "forcing times must be strictly increasing".into(),
            ));
        }
        if let Some(i) = self.beam.iter().position(|g| !g.is_mean_zero(1e-12)) {
            return Err(FsiError::Rejected(format!(
                "beam forcing at t = {} is not mean-zero",
                self.times[i]
            )));
        }
        Ok(())
    }

    /// Ambient fluid vector and beam coordinates at time `t`, clamped to the
    /// sampled interval.
    pub fn at(&self, t: f64, grid: &StripGrid) -> Option<(Vec<C64>, Vec<C64>)> {
        if self.times.is_empty() {
            return None;
        }
        let n = self.times.len();
        let j = self.times.partition_point(|&s| s <= t);
        let (i0, i1, th) = if j == 0 {
            (0, 0, 0.0)
        } else if j >= n {
            (n - 1, n - 1, 0.0)
        } else {
            let (a, b) = (self.times[j - 1], self.times[j]);
            (j - 1, j, (t - a) / (b - a))
        };
        let kmax = grid.cfg.kmax();
        let mix = |a: Vec<C64>, b: Vec<C64>| -> Vec<C64> {
            a.iter().zip(&b).map(|(x, y)| x * (1.0 - th) + y * th).collect()
        };
        let beam = |i: usize| {
            BeamFunction {
                coeffs: crate::spectral::fourier::resize(&self.beam[i].coeffs, kmax),
            }
            .beam_vector()
        };
        Some((
            mix(self.fluid[i0].to_vector(grid), self.fluid[i1].to_vector(grid)),
            mix(beam(i0), beam(i1)),
        ))
    }
}
