//! Strict TOML scenario files.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FsiError, Result};
use crate::evolution::EvolutionConfig;
use crate::geometry::CONTACT_TOL;
use crate::lab::{Band, BatteryParams, BeamOperatorKind, Line, COMMUTATOR_EPSILON};
use crate::spectral::{min_gap, BeamFunction, SpectralConfig};
use crate::C64;

/// What a scenario computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunKind {
    SimulateLinear,
    SimulateNonlinear,
    SweepGevrey,
    #[serde(rename = "sweep-V")]
    SweepV,
    #[serde(rename = "sweep-Vtilde")]
    SweepVtilde,
    CheckCommutator,
    Battery,
    Spectrum,
}

impl RunKind {
    pub const ALL: [RunKind; 8] = [
        RunKind::SimulateLinear,
        RunKind::SimulateNonlinear,
        RunKind::SweepGevrey,
        RunKind::SweepV,
        RunKind::SweepVtilde,
        RunKind::CheckCommutator,
        RunKind::Battery,
        RunKind::Spectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RunKind::SimulateLinear => "simulate-linear",
            RunKind::SimulateNonlinear => "simulate-nonlinear",
            RunKind::SweepGevrey => "sweep-gevrey",
            RunKind::SweepV => "sweep-V",
            RunKind::SweepVtilde => "sweep-Vtilde",
            RunKind::CheckCommutator => "check-commutator",
            RunKind::Battery => "battery",
            RunKind::Spectrum => "spectrum",
        }
    }

    pub fn is_simulation(self) -> bool {
        matches!(self, RunKind::SimulateLinear | RunKind::SimulateNonlinear)
    }

    pub fn is_sweep(self) -> bool {
        matches!(
            self,
            RunKind::SweepGevrey
                | RunKind::SweepV
                | RunKind::SweepVtilde
                | RunKind::CheckCommutator
                | RunKind::Battery
        )
    }
}

impl std::fmt::Display for RunKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for RunKind {
    type Err = FsiError;

    fn from_str(s: &str) -> Result<Self> {
        RunKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| FsiError::Config(format!("unknown run kind `{s}`")))
    }
}

/// Named beam profiles.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapePreset {
    #[default]
    Flat,
    /// `amplitude * sin(2 pi mode s / L)`.
    Sin { amplitude: f64, mode: u32 },
    /// Mean-zero random Fourier series with `|c_k| ~ k^-decay`, rescaled so
    /// that `max |eta| = amplitude`. Without `seed` the scenario seed is used.
    RandomSmooth {
        amplitude: f64,
        decay: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
}

impl ShapePreset {
    pub fn validate(&self, cfg: &SpectralConfig, what: &str) -> Result<()> {
        let bad = |m: String| Err(FsiError::Config(format!("{what}: {m}")));
        match *self {
            ShapePreset::Flat => Ok(()),
            ShapePreset::Sin { amplitude, mode } => {
                if !amplitude.is_finite() {
                    return bad(format!("amplitude {amplitude} is not finite"));
                }
                if mode == 0 || mode as usize > cfg.kmax() {
                    return bad(format!("mode {mode} outside 1..={}", cfg.kmax()));
                }
                Ok(())
            }
            ShapePreset::RandomSmooth { amplitude, decay, .. } => {
                if !(amplitude.is_finite() && amplitude >= 0.0) {
                    return bad(format!("amplitude {amplitude} must be finite and nonnegative"));
                }
                if !(decay.is_finite() && decay >= 0.0) {
                    return bad(format!("decay {decay} must be finite and nonnegative"));
                }
                Ok(())
            }
        }
    }

    pub fn build(&self, cfg: &SpectralConfig, default_seed: u64) -> BeamFunction {
        let kmax = cfg.kmax();
        match *self {
            ShapePreset::Flat => BeamFunction::zeros(kmax),
            ShapePreset::Sin { amplitude, mode } => {
                let w = 2.0 * PI * mode as f64 / cfg.length;
                BeamFunction::from_fn(cfg, |s| amplitude * (w * s).sin())
            }
            ShapePreset::RandomSmooth { amplitude, decay, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(default_seed));
                let mut modes = Vec::with_capacity(2 * kmax);
                for k in 1..=kmax as isize {
                    let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                        * (k as f64).powf(-decay);
                    modes.push((k, c));
                    modes.push((-k, c.conj()));
                }
                let f = BeamFunction::from_modes(kmax, &modes);
                let peak = f
                    .samples(4 * cfg.ns)
                    .iter()
                    .fold(0.0f64, |m, v| m.max(v.abs()));
                if peak == 0.0 {
                    f
                } else {
                    f.scale(C64::new(amplitude / peak, 0.0))
                }
            }
        }
    }
}

/// How the initial velocity is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VelocityPreset {
    /// Divergence-free extension of the beam rate.
    #[default]
    Lifted,
    /// Zero velocity; only compatible with a zero beam rate.
    Zero,
}

/// Initial beam deflection, rate and velocity.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    /// Defaults to the reference deflection.
    #[serde(default)]
    pub eta1: Option<ShapePreset>,
    #[serde(default)]
    pub eta2: ShapePreset,
    #[serde(default)]
    pub velocity: VelocityPreset,
    /// Beam forcing held constant in time (linear runs only).
    #[serde(default)]
    pub beam_forcing: Option<ShapePreset>,
}

/// Sampling and estimate parameters of the sweep kinds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    #[serde(default = "default_line")]
    pub line: Line,
    #[serde(default = "default_band")]
    pub band: Band,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// `(theta, beta)` exponent pairs of the V / V~ sweeps.
    #[serde(default = "default_pairs")]
    pub pairs: Vec<[f64; 2]>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Reference frequency `Im lambda` of the coercivity estimate.
    #[serde(default = "default_rho_tau")]
    pub rho_tau: f64,
    #[serde(default)]
    pub battery: BatteryParams,
}

fn default_line() -> Line {
    Line::Imaginary
}

fn default_band() -> Band {
    Band { lo: 1.0, hi: 100.0 }
}

fn default_samples() -> usize {
    24
}

fn default_pairs() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0], [0.5, 0.5]]
}

fn default_epsilon() -> f64 {
    COMMUTATOR_EPSILON
}

fn default_rho_tau() -> f64 {
    1.0
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            line: default_line(),
            band: default_band(),
            samples: default_samples(),
            pairs: default_pairs(),
            epsilon: default_epsilon(),
            rho_tau: default_rho_tau(),
            battery: BatteryParams::default(),
        }
    }
}

impl SweepParams {
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.pairs.iter().map(|p| (p[0], p[1])).collect()
    }
}

/// A complete run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: RunKind,
    #[serde(default)]
    pub seed: u64,
    /// Root under which the run directory is created.
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub config: SpectralConfig,
    /// Reference deflection of the upper wall.
    #[serde(default)]
    pub eta10: ShapePreset,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub sweep: SweepParams,
    #[serde(default)]
    pub evolution: EvolutionConfig,
}

impl Scenario {
    pub fn new(kind: RunKind) -> Self {
        Scenario {
            kind,
            seed: 0,
            out: None,
            config: SpectralConfig::default(),
            eta10: ShapePreset::Flat,
            initial: InitialSpec::default(),
            sweep: SweepParams::default(),
            evolution: EvolutionConfig::default(),
        }
    }

    /// Parse and validate.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let sc: Scenario = toml::from_str(text).map_err(|e| FsiError::Parse(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| FsiError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| FsiError::Parse(e.to_string()))
    }

    /// Every check that does not need an assembled operator.
    pub fn validate(&self) -> Result<()> {
        let cfg = &self.config;
        cfg.validate()?;
        self.eta10.validate(cfg, "eta10")?;
        let eta10 = self.reference_deflection();
        let (gap, at) = min_gap(&eta10, cfg);
        if gap < CONTACT_TOL {
            return Err(FsiError::Contact {
                min_gap: gap,
                at_s: at,
                time: None,
            });
        }
        if self.kind.is_simulation() {
            self.validate_simulation()?;
        }
        if self.kind.is_sweep() {
            self.validate_sweep()?;
        }
        Ok(())
    }

    fn validate_simulation(&self) -> Result<()> {
        let cfg = &self.config;
        let init = &self.initial;
        if let Some(p) = &init.eta1 {
            p.validate(cfg, "initial.eta1")?;
        }
        init.eta2.validate(cfg, "initial.eta2")?;
        if let Some(p) = &init.beam_forcing {
            p.validate(cfg, "initial.beam_forcing")?;
            if self.kind == RunKind::SimulateNonlinear {
                return Err(FsiError::Config(
                    "initial.beam_forcing is only supported by simulate-linear".into(),
                ));
            }
        }
        if self.kind == RunKind::SimulateNonlinear
            && init.eta1.as_ref().is_some_and(|p| *p != self.eta10)
        {
            return Err(FsiError::Config(
                "simulate-nonlinear starts from the reference deflection; omit initial.eta1".into(),
            ));
        }
        if init.velocity == VelocityPreset::Zero && init.eta2 != ShapePreset::Flat {
            return Err(FsiError::Config(
                "zero initial velocity requires a flat initial.eta2".into(),
            ));
        }
        self.evolution.validate(None)
    }

    fn validate_sweep(&self) -> Result<()> {
        let sw = &self.sweep;
        sw.line.validate()?;
        sw.band.validate()?;
        if sw.samples < 4 {
            return Err(FsiError::Config(format!(
                "sweep.samples must be at least 4, got {}",
                sw.samples
            )));
        }
        match self.kind {
            RunKind::SweepV | RunKind::SweepVtilde => {
                let op = if self.kind == RunKind::SweepV {
                    BeamOperatorKind::V
                } else {
                    BeamOperatorKind::Vtilde
                };
                if sw.pairs.is_empty() {
                    return Err(FsiError::Config("sweep.pairs is empty".into()));
                }
                for &(t, b) in &sw.pairs() {
                    op.check_exponents(t, b)
                        .map_err(|e| FsiError::Config(format!("sweep.pairs: {e}")))?;
                }
                if !(sw.rho_tau > 0.0 && sw.rho_tau.is_finite()) {
                    return Err(FsiError::Config("sweep.rho_tau must be positive".into()));
                }
            }
            RunKind::CheckCommutator => {
                if !(sw.epsilon > 0.0 && sw.epsilon < 0.25) {
                    return Err(FsiError::Config(format!(
                        "sweep.epsilon = {} outside (0, 1/4)",
                        sw.epsilon
                    )));
                }
            }
            RunKind::Battery => {
                let p = &sw.battery;
                if let Some(t) = p.k_thetas.iter().find(|t| !(0.25..0.5).contains(*t)) {
                    return Err(FsiError::Config(format!("battery k_theta {t} outside [1/4, 1/2)")));
                }
                if let Some(t) = p.inverse_thetas.iter().find(|t| !(**t > -0.5 && **t < 0.5)) {
                    return Err(FsiError::Config(format!(
                        "battery inverse_theta {t} outside (-1/2, 1/2)"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn reference_deflection(&self) -> BeamFunction {
        self.eta10.build(&self.config, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_uses_defaults() {
        let sc = Scenario::from_toml_str("kind = \"sweep-gevrey\"\n").unwrap();
        assert_eq!(sc.kind, RunKind::SweepGevrey);
        assert_eq!(sc.config, SpectralConfig::default());
        assert_eq!(sc.sweep, SweepParams::default());
    }

    #[test]
    fn unknown_keys_rejected_at_every_level() {
        for text in [
            "kind = \"spectrum\"\nsed = 3\n",
            "kind = \"spectrum\"\n[config]\nL = 6.0\nns = 16\nny = 16\nnu = 1.0\nalpha1 = 1.0\nalpha2 = 0.0\nalpah = 1\n",
            "kind = \"spectrum\"\n[eta10]\npreset = \"sin\"\namplitude = 0.1\nmode = 1\nphase = 0.0\n",
            "kind = \"sweep-gevrey\"\n[sweep]\nbnad = { lo = 1.0, hi = 2.0 }\n",
            "kind = \"simulate-linear\"\n[evolution]\ndt = 0.01\nhorizon = 0.1\nscheme = \"crank-nicolson\"\nfp_tol = 1e-8\nfp_max_iter = 10\nradius = 2.0\nhalving = 2\nstep = 1\n",
        ] {
            let err = Scenario::from_toml_str(text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}: {err}");
        }
    }

    #[test]
    fn run_kind_names_round_trip() {
        for k in RunKind::ALL {
            assert_eq!(k.name().parse::<RunKind>().unwrap(), k);
            let text = format!("kind = \"{}\"\n", k.name());
            assert_eq!(Scenario::from_toml_str(&text).unwrap().kind, k);
        }
    }

    #[test]
    fn random_smooth_is_seeded_and_scaled() {
        let cfg = SpectralConfig::new(16, 8);
        let p = ShapePreset::RandomSmooth {
            amplitude: 0.2,
            decay: 2.0,
            seed: None,
        };
        let a = p.build(&cfg, 7);
        assert_eq!(a, p.build(&cfg, 7));
        assert_ne!(a, p.build(&cfg, 8));
        assert!(a.is_mean_zero(1e-14));
        let peak = a.samples(64).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((peak - 0.2).abs() < 1e-12);
    }

    #[test]
    fn contact_in_reference_shape_is_reported() {
        let mut sc = Scenario::new(RunKind::Spectrum);
        sc.eta10 = ShapePreset::Sin {
            amplitude: 1.5,
            mode: 1,
        };
        assert_eq!(sc.validate().unwrap_err().exit_code(), 3);
    }

    #[test]
    fn toml_round_trip() {
        let mut sc = Scenario::new(RunKind::SweepV);
        sc.eta10 = ShapePreset::RandomSmooth {
            amplitude: 0.1,
            decay: 3.0,
            seed: Some(4),
        };
        let text = sc.to_toml_string().unwrap();
        assert_eq!(Scenario::from_toml_str(&text).unwrap(), sc);
    }
}
