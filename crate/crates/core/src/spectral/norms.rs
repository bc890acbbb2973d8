use serde::{Deserialize, Serialize};

use super::beam::{apply_a1_power, BeamFunction};
use super::config::SpectralConfig;
use crate::error::{FsiError, Result};

/// Which norm to evaluate.
///
/// Beam spaces `D(A1^theta)` use `||A1^theta f||`; their duals use negative
/// powers on mean-zero data. Fluid Sobolev norms are taken on the flat strip
/// after the Piola pull-back (an equivalent norm for smooth `eta10`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormSpec {
    L2Fluid,
    HFluid(f64),
    L2Beam,
    DomA1(f64),
    DomA1Dual(f64),
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NormSpec::HFluid(s) if !(0.0..=4.0).contains(&s) => Err(FsiError::Rejected(format!(
                "fluid Sobolev exponent {s} outside [0, 4]"
            ))),
            NormSpec::DomA1(t) | NormSpec::DomA1Dual(t) if !(-1.0..=1.0).contains(&t) => Err(
                FsiError::Rejected(format!("A1 exponent {t} outside [-1, 1]")),
            ),
            _ => Ok(()),
        }
    }

    pub fn is_beam(&self) -> bool {
        matches!(
            self,
            NormSpec::L2Beam | NormSpec::DomA1(_) | NormSpec::DomA1Dual(_)
        )
    }
}

/// Norm of beam data.
pub fn beam_norm(f: &BeamFunction, spec: NormSpec, cfg: &SpectralConfig) -> Result<f64> {
    spec.validate()?;
    let theta = match spec {
        NormSpec::L2Beam => 0.0,
        NormSpec::DomA1(t) => t,
        NormSpec::DomA1Dual(t) => -t,
        _ => {
            return Err(FsiError::Rejected(
                "fluid norm requested for beam data".into(),
            ))
        }
    };
    let g = apply_a1_power(f, theta, cfg)?;
    Ok(g.inner(&g, cfg.length).re.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn beam_norm_examples() {
        let cfg = SpectralConfig::new(16, 8);
        let z = BeamFunction::zeros(cfg.kmax());
        assert_eq!(beam_norm(&z, NormSpec::DomA1(0.5), &cfg).unwrap(), 0.0);
        let f = BeamFunction::from_fn(&cfg, |s| (2.0 * s).cos());
        let n = beam_norm(&f, NormSpec::DomA1(0.5), &cfg).unwrap();
        assert!((n - 4.0 * PI.sqrt()).abs() < 1e-12);
        let one = BeamFunction::from_fn(&cfg, |_| 1.0);
        assert!(beam_norm(&one, NormSpec::DomA1Dual(0.25), &cfg).is_err());
    }
}
