//! Sweep reports, sampling bands and log-log slope fits.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{FsiError, Result};
use crate::spectral::{BeamFunction, SpectralConfig};

/// Version tag written into every serialized report.
pub const REPORT_SCHEMA: &str = "fsi-sweep/1";

/// Sampling line in the closed right half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "kebab-case")]
pub enum Line {
    /// `lambda = i tau`.
    Imaginary,
    /// `lambda = sigma + i tau` with `sigma >= 0`.
    Vertical { sigma: f64 },
}

impl Line {
    pub fn point(&self, tau: f64) -> C64 {
        match *self {
            Line::Imaginary => C64::new(0.0, tau),
            Line::Vertical { sigma } => C64::new(sigma, tau),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Line::Vertical { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => Err(
                FsiError::Config(format!("vertical line needs sigma >= 0, got {sigma}")),
            ),
            _ => Ok(()),
        }
    }
}

/// Range `[lo, hi]` of `Im lambda` (log-spaced samples).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let b = Band { lo, hi };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite()) {
            return Err(FsiError::Config(format!(
                "band must satisfy 0 < lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    /// `n` log-spaced values of `tau` from `lo` to `hi`.
    pub fn taus(&self, n: usize) -> Vec<f64> {
        if n <= 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo * (1.0 - 1e-12) && x <= self.hi * (1.0 + 1e-12)
    }
}

/// Largest `|lambda|` treated as resolved: the beam frequency
/// `sqrt(symbol)` of the highest dealiased mode `|k| = 2 kmax / 3`.
pub fn resolved_cutoff(cfg: &SpectralConfig) -> f64 {
    let kc = ((2 * cfg.kmax()) / 3).max(1) as isize;
    cfg.beam_symbol(kc).sqrt()
}

/// Largest `|lambda|` at which the viscous boundary layer
/// `sqrt(nu / |lambda|)` still spans four vertical nodes.
pub fn fluid_cutoff(cfg: &SpectralConfig) -> f64 {
    let n = cfg.ny.max(5) as f64;
    let y4 = 0.5 * (1.0 - (4.0 * std::f64::consts::PI / (n - 1.0)).cos());
    cfg.nu / (y4 * y4)
}

/// Which resolution limit applies to a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cutoff {
    /// Beam frequencies (anything involving `A1` or the coupled generator).
    Beam,
    /// Fluid boundary layer (operators built from `W_lambda` alone).
    Fluid,
}

impl Cutoff {
    pub fn value(self, cfg: &SpectralConfig) -> f64 {
        match self {
            Cutoff::Beam => resolved_cutoff(cfg),
            Cutoff::Fluid => fluid_cutoff(cfg),
        }
    }
}

/// Clip `band` to `cut`, with a warning when truncated.
pub fn resolved_band(band: Band, cut: f64) -> Result<(Band, Option<String>)> {
    band.validate()?;
    if band.hi <= cut {
        return Ok((band, None));
    }
    if band.lo >= cut {
        return Err(FsiError::Config(format!(
            "band [{}, {}] lies beyond the resolution cutoff {cut:.4e}",
            band.lo, band.hi
        )));
    }
    let msg = format!(
        "band upper end {} exceeds resolution cutoff {cut:.6e}; truncated",
        band.hi
    );
    Ok((Band { lo: band.lo, hi: cut }, Some(msg)))
}

/// Least-squares line through `(ln |lambda|, ln value)` of binned maxima.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    /// `|lambda|` window the fit was restricted to.
    pub window: Band,
    /// Number of points entering the regression (non-empty bins).
    pub points: usize,
}

impl SlopeFit {
    /// `[slope - 2 stderr, slope + 2 stderr]`.
    pub fn confidence(&self) -> [f64; 2] {
        [self.slope - 2.0 * self.stderr, self.slope + 2.0 * self.stderr]
    }
}

/// Plain least-squares fit of `ln y` against `ln x`.
pub fn fit_loglog(x: &[f64], y: &[f64], window: Band) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| window.contains(**a) && **b > 0.0 && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    regress(&pts, window)
}

/// Fit of the upper envelope: the window is split into `bins` equal bins in
/// `ln |lambda|` and the largest value in each bin enters the regression.
pub fn fit_envelope(x: &[f64], y: &[f64], window: Band, bins: usize) -> Option<SlopeFit> {
    let (a, b) = (window.lo.ln(), window.hi.ln());
    let mut best: Vec<Option<(f64, f64)>> = vec![None; bins.max(1)];
    for (&xi, &yi) in x.iter().zip(y) {
        if !window.contains(xi) || !(yi > 0.0 && yi.is_finite()) {
            continue;
        }
        let t = ((xi.ln() - a) / (b - a)).clamp(0.0, 1.0 - 1e-12);
        let slot = (t * best.len() as f64) as usize;
        if best[slot].map_or(true, |(_, v)| yi > v) {
            best[slot] = Some((xi, yi));
        }
    }
    let pts: Vec<(f64, f64)> = best.into_iter().flatten().map(|(p, q)| (p.ln(), q.ln())).collect();
    regress(&pts, window)
}

/// Fit through the local maxima of the samples ordered by `|lambda|`
/// (resonance peaks); falls back to binned maxima when fewer than three
/// peaks lie in the window.
pub fn fit_peaks(x: &[f64], y: &[f64], window: Band, bins: usize) -> Option<SlopeFit> {
    let mut idx: Vec<usize> = (0..x.len())
        .filter(|&i| window.contains(x[i]) && y[i] > 0.0 && y[i].is_finite())
        .collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let pts: Vec<(f64, f64)> = (1..idx.len().saturating_sub(1))
        .filter(|&p| y[idx[p]] > y[idx[p - 1]] && y[idx[p]] >= y[idx[p + 1]])
        .map(|p| (x[idx[p]].ln(), y[idx[p]].ln()))
        .collect();
    if pts.len() >= 3 {
        regress(&pts, window)
    } else {
        fit_envelope(x, y, window, bins)
    }
}

/// How a series' slope is fitted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum FitMode {
    /// Every sample.
    Plain,
    /// Largest sample per log bin.
    Envelope { bins: usize },
    /// Local maxima (resonance peaks).
    Peaks { bins: usize },
}

fn regress(pts: &[(f64, f64)], window: Band) -> Option<SlopeFit> {
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = (rss / (n - 2.0) / sxx).sqrt();
    Some(SlopeFit {
        slope,
        intercept,
        stderr,
        window,
        points: pts.len(),
    })
}

/// What a series is compared against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Expectation {
    /// Fitted slope equal to `exponent` within `tol`.
    Slope { exponent: f64, tol: f64 },
    /// Fitted slope over the upper log-half of the window at most
    /// `max_slope` (no asymptotic growth beyond the tolerance).
    Bounded { max_slope: f64 },
    /// Every sample at most `limit`.
    AtMost { limit: f64 },
    /// Every sample at least `limit`.
    AtLeast { limit: f64 },
    /// Reported only.
    None,
}

/// One measured quantity along the sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    /// Measured values, one per entry of the report's `lambdas`.
    pub norms: Vec<f64>,
    /// `|lambda|^{-weight_exponent} * norm` (the quantity whose sup is bounded).
    pub weighted: Vec<f64>,
    pub weight_exponent: f64,
    pub sup_weighted: f64,
    pub fit_mode: FitMode,
    pub fit: Option<SlopeFit>,
    pub expected: Expectation,
    pub pass: bool,
}

impl Series {
    /// Build a series; the fit is restricted to `window` (in `|lambda|`).
    pub fn new(
        label: impl Into<String>,
        lambdas: &[C64],
        norms: Vec<f64>,
        weight_exponent: f64,
        expected: Expectation,
        window: Band,
        mode: FitMode,
    ) -> Self {
        let abs: Vec<f64> = lambdas.iter().map(|l| l.norm()).collect();
        let weighted: Vec<f64> = abs
            .iter()
            .zip(&norms)
            .map(|(a, n)| n * a.powf(-weight_exponent))
            .collect();
        let sup_weighted = abs
            .iter()
            .zip(&weighted)
            .filter(|(a, _)| window.contains(**a))
            .map(|(_, w)| *w)
            .fold(0.0, f64::max);
        let fit_window = match expected {
            Expectation::Bounded { .. } => Band {
                lo: (window.lo * window.hi).sqrt(),
                hi: window.hi,
            },
            _ => window,
        };
        let fit = match mode {
            FitMode::Plain => fit_loglog(&abs, &norms, fit_window),
            FitMode::Envelope { bins } => fit_envelope(&abs, &norms, fit_window, bins),
            FitMode::Peaks { bins } => fit_peaks(&abs, &norms, fit_window, bins),
        };
        let pass = match &expected {
            Expectation::Slope { exponent, tol } => {
                fit.as_ref().is_some_and(|f| (f.slope - exponent).abs() <= *tol)
            }
            Expectation::Bounded { max_slope } => {
                fit.as_ref().is_some_and(|f| f.slope <= *max_slope) && sup_weighted.is_finite()
            }
            Expectation::AtMost { limit } => norms.iter().all(|v| v <= limit),
            Expectation::AtLeast { limit } => norms.iter().all(|v| v >= limit),
            Expectation::None => true,
        };
        Series {
            label: label.into(),
            norms,
            weighted,
            weight_exponent,
            sup_weighted,
            fit_mode: mode,
            fit,
            expected,
            pass,
        }
    }
}

/// Scalar check recorded next to the series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        CheckRecord {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        CheckRecord {
            name: name.into(),
            value,
            threshold,
            pass: value >= threshold,
        }
    }
}

/// Grid and domain description stored with a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub ns: usize,
    pub ny: usize,
    pub eta10: String,
    /// Lower cutoff of `|lambda|` (the band's lower end).
    pub alpha: f64,
    pub band: Band,
    pub line: Line,
    pub resolution_cutoff: f64,
    pub samples: usize,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
}

impl SweepMeta {
    pub fn new(
        cfg: &SpectralConfig,
        eta10: &BeamFunction,
        band: Band,
        line: Line,
        samples: usize,
        cutoff: f64,
    ) -> Self {
        SweepMeta {
            ns: cfg.ns,
            ny: cfg.ny,
            eta10: describe_shape(eta10, cfg),
            alpha: band.lo,
            band,
            line,
            resolution_cutoff: cutoff,
            samples,
            seed: None,
            warnings: vec![],
        }
    }
}

/// Short description of a beam shape: amplitude and highest active mode.
pub fn describe_shape(eta: &BeamFunction, cfg: &SpectralConfig) -> String {
    let amp = eta
        .samples(4 * cfg.ns)
        .into_iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if amp == 0.0 {
        return "flat".into();
    }
    let kmax = (1..=eta.kmax() as isize)
        .filter(|&k| eta.coeff(k).norm() > 1e-14 * amp || eta.coeff(-k).norm() > 1e-14 * amp)
        .max()
        .unwrap_or(0);
    format!("max|eta10| = {amp:.6e}, highest mode {kmax}")
}

/// Result of one sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: String,
    pub kind: String,
    pub lambdas: Vec<C64>,
    pub series: Vec<Series>,
    pub checks: Vec<CheckRecord>,
    pub verdict: bool,
    pub meta: SweepMeta,
}

impl SweepReport {
    pub fn new(kind: &str, lambdas: Vec<C64>, series: Vec<Series>, checks: Vec<CheckRecord>, meta: SweepMeta) -> Self {
        let verdict = series.iter().all(|s| s.pass) && checks.iter().all(|c| c.pass);
        SweepReport {
            schema: REPORT_SCHEMA.into(),
            kind: kind.into(),
            lambdas,
            series,
            checks,
            verdict,
            meta,
        }
    }

    pub fn series(&self, label: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.label == label)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn refresh_verdict(&mut self) {
        self.verdict = self.series.iter().all(|s| s.pass) && self.checks.iter().all(|c| c.pass);
    }

    /// Append a check and update the verdict.
    pub fn push_check(&mut self, c: CheckRecord) {
        self.checks.push(c);
        self.refresh_verdict();
    }
}

/// `max(a, b) / min(a, b)` of the weighted sups of equally labelled series.
pub fn refinement_ratios(coarse: &SweepReport, fine: &SweepReport) -> Vec<(String, f64)> {
    coarse
        .series
        .iter()
        .filter_map(|s| {
            let t = fine.series(&s.label)?;
            let (a, b) = (s.sup_weighted, t.sup_weighted);
            let r = if a > 0.0 && b > 0.0 { a.max(b) / a.min(b) } else if a == b { 1.0 } else { f64::INFINITY };
            Some((s.label.clone(), r))
        })
        .collect()
}

/// Record refinement stability (`ratio < limit` for every series) on `fine`.
pub fn attach_refinement(coarse: &SweepReport, fine: &mut SweepReport, limit: f64) {
    for (label, r) in refinement_ratios(coarse, fine) {
        fine.push_check(CheckRecord {
            name: format!("refinement {label}"),
            value: r,
            threshold: limit,
            pass: r < limit,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_fit_recovers_power_law_under_dips() {
        let band = Band::new(1.0, 100.0).unwrap();
        let x = band.taus(200);
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, t)| t.powf(-0.5) * if i % 3 == 0 { 1.0 } else { 0.1 })
            .collect();
        let f = fit_envelope(&x, &y, band, 20).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-10, "{}", f.slope);
        let p = fit_peaks(&x, &y, band, 20).unwrap();
        assert!((p.slope + 0.5).abs() < 1e-10);
        let g = fit_loglog(&x, &x.iter().map(|t| 3.0 * t * t).collect::<Vec<_>>(), band).unwrap();
        assert!((g.slope - 2.0).abs() < 1e-12 && g.stderr < 1e-10);
    }

    #[test]
    fn fits_ignore_points_outside_window() {
        let window = Band::new(1.0, 10.0).unwrap();
        let x = [0.1, 1.0, 2.0, 5.0, 10.0, 1000.0];
        let y = [1e9, 1.0, 2.0, 5.0, 10.0, 1e-9];
        let f = fit_loglog(&x, &y, window).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert_eq!(f.points, 4);
    }

    #[test]
    fn band_truncated_at_cutoff() {
        let cfg = SpectralConfig::new(16, 8);
        let cut = resolved_cutoff(&cfg);
        let (b, w) = resolved_band(Band::new(1.0, 10.0 * cut).unwrap(), cut).unwrap();
        assert_eq!(b.hi, cut);
        assert!(w.is_some());
        assert!(resolved_band(Band::new(2.0 * cut, 3.0 * cut).unwrap(), cut).is_err());
        assert!(fluid_cutoff(&SpectralConfig::new(16, 32)) > fluid_cutoff(&cfg));
    }
}
