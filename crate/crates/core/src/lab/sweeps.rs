//! Resolvent and estimate sweeps over `lambda` in the closed right
//! half-plane.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{
    resolved_band, Band, CheckRecord, Cutoff, Expectation, FitMode, Line, Series, SweepMeta, SweepReport,
};
use crate::coupling::{a1_power_matrix, v_operators, BeamOperators, CoupledGenerator, RhoConstants};
use crate::error::{FsiError, Result};
use crate::geometry::velocity_sobolev_gram;
use crate::linalg::{self, CMat};
use crate::stokes::ReferenceDomain;

/// Slope tolerance for the resolvent decay fit.
pub const GEVREY_SLOPE_TOL: f64 = 0.15;
/// Slope tolerance for the beam-operator estimates.
pub const V_SLOPE_TOL: f64 = 0.25;
/// Largest fitted slope still read as "bounded".
pub const BOUNDED_SLOPE: f64 = 0.15;
/// Exponent offset in the commutator bound.
pub const COMMUTATOR_EPSILON: f64 = 0.1;

fn par_map<T: Send>(lams: &[C64], f: impl Fn(C64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    lams.par_iter().map(|&l| f(l)).collect()
}

fn abs_window(line: Line, band: Band) -> Band {
    Band {
        lo: line.point(band.lo).norm(),
        hi: line.point(band.hi).norm(),
    }
}

fn bins_for(n: usize) -> usize {
    (n / 4).max(4)
}

fn prepare(
    rd: &ReferenceDomain,
    line: Line,
    band: Band,
    n: usize,
    cutoff: Cutoff,
) -> Result<(Band, Vec<C64>, SweepMeta)> {
    line.validate()?;
    if n < 3 {
        return Err(FsiError::Config(format!("a sweep needs at least 3 samples, got {n}")));
    }
    let cut = cutoff.value(rd.cfg());
    let (band, warn) = resolved_band(band, cut)?;
    let lambdas = band.taus(n).into_iter().map(|t| line.point(t)).collect();
    let mut meta = SweepMeta::new(rd.cfg(), &rd.sys.eta10, band, line, n, cut);
    meta.warnings.extend(warn);
    Ok((band, lambdas, meta))
}

fn sort_dedup(lams: &mut Vec<C64>) {
    lams.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    lams.dedup_by(|a, b| (*a - *b).norm() <= 1e-12 * b.norm());
}

/// Energy-norm resolvent `||(lambda - A0)^{-1}||` along a line, with the
/// eigenvalue frequencies inside the band added to the samples so that the
/// resonance peaks enter the envelope fit.
pub fn sweep_gevrey(
    gen: &CoupledGenerator,
    rd: &ReferenceDomain,
    line: Line,
    band: Band,
    n: usize,
) -> Result<SweepReport> {
    let (band, mut lambdas, meta) = prepare(rd, line, band, n, Cutoff::Beam)?;
    let spec = gen.spectrum()?;
    lambdas.extend(
        spec.iter()
            .filter(|m| m.im > 0.0 && band.contains(m.im))
            .map(|m| line.point(m.im)),
    );
    sort_dedup(&mut lambdas);
    let norms = par_map(&lambdas, |l| gen.resolvent_norm(l))?;
    let window = abs_window(line, band);
    let mut checks = vec![CheckRecord::at_most(
        "spectral abscissa",
        spec.first().map_or(f64::NEG_INFINITY, |m| m.re),
        0.0,
    )];
    let lower = lambdas
        .iter()
        .zip(&norms)
        .map(|(l, r)| r * spec.iter().map(|m| (l - m).norm()).fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min);
    checks.push(CheckRecord::at_least("min ||R|| dist(lambda, spec)", lower, 1.0 - 1e-8));
    if let Line::Vertical { sigma } = line {
        if sigma > 0.0 {
            let upper = norms.iter().fold(0.0f64, |m, r| m.max(r * sigma));
            checks.push(CheckRecord::at_most("max ||R|| Re(lambda)", upper, 1.0 + 1e-8));
        }
    }
    let series = Series::new(
        "resolvent",
        &lambdas,
        norms,
        -0.5,
        Expectation::Slope {
            exponent: -0.5,
            tol: GEVREY_SLOPE_TOL,
        },
        window,
        FitMode::Peaks { bins: bins_for(n) },
    );
    Ok(SweepReport::new("sweep-gevrey", lambdas, vec![series], checks, meta))
}

/// Norm of `T^H R S^{-H}` for Gram factors `S` (source) and `T` (target).
fn weighted_norm(r: &CMat, src: &CMat, tgt: &CMat) -> Result<f64> {
    let x = linalg::solve_lower(src, &r.adjoint().to_owned()).adjoint().to_owned();
    linalg::op_norm(&(tgt.adjoint() * x))
}

/// Resolvent between the regularity-weighted spaces:
/// `(L2, A1^{5/8}, A1^{1/8}) -> (H2, A1^{7/8}, A1^{3/8})` and
/// `|lambda|` times `(L2, A1^{5/8}, A1^{1/8}) -> (L2, A1^{3/8}, A1^{-1/8})`.
pub fn sweep_regularity(
    gen: &CoupledGenerator,
    rd: &ReferenceDomain,
    line: Line,
    band: Band,
    n: usize,
) -> Result<SweepReport> {
    let (band, lambdas, meta) = prepare(rd, line, band, n, Cutoff::Beam)?;
    let grid = rd.grid();
    let h2 = velocity_sobolev_gram(grid, 2);
    let chol = |g: &CMat| linalg::cholesky(g);
    let src = chol(&gen.weighted_gram(rd, &rd.sys.mass, 5.0 / 8.0, 1.0 / 8.0))?;
    let t_strong = chol(&gen.weighted_gram(rd, &h2, 7.0 / 8.0, 3.0 / 8.0))?;
    let t_weak = chol(&gen.weighted_gram(rd, &rd.sys.mass, 3.0 / 8.0, -1.0 / 8.0))?;
    let pairs = par_map(&lambdas, |l| {
        let r = gen.resolvent_dense(l)?;
        Ok((weighted_norm(&r, &src, &t_strong)?, l.norm() * weighted_norm(&r, &src, &t_weak)?))
    })?;
    let window = abs_window(line, band);
    let bounded = Expectation::Bounded {
        max_slope: BOUNDED_SLOPE,
    };
    let fit = FitMode::Envelope { bins: bins_for(n) };
    let series = vec![
        Series::new("H2 target", &lambdas, pairs.iter().map(|p| p.0).collect(), 0.0, bounded.clone(), window, fit),
        Series::new("lambda * dual target", &lambdas, pairs.iter().map(|p| p.1).collect(), 0.0, bounded, window, fit),
    ];

    // first column: fluid-only data through blocks and through the dense inverse
    let lam = lambdas[lambdas.len() / 2];
    let c0: Vec<C64> = (0..gen.nz)
        .map(|i| C64::new(((i * 7 + 3) % 11) as f64 / 11.0 - 0.5, ((i * 5 + 1) % 13) as f64 / 13.0 - 0.5))
        .collect();
    let f = linalg::matvec(&rd.sys.z, &c0);
    let nb = gen.nb;
    let zero = vec![linalg::ZERO; nb];
    let blocks = crate::coupling::BlockResolvent::new(lam, rd)?.apply_ambient(&f, &zero, &zero);
    let mut z = c0.clone();
    z.extend(std::iter::repeat(linalg::ZERO).take(2 * nb));
    let dense = linalg::matvec(&gen.resolvent_dense(lam)?, &z);
    let dense = crate::coupling::CoupledState::unpack(&dense, gen.nz, nb);
    let h2n = |v: &[C64]| linalg::dot(v, &linalg::matvec(&h2, v)).re.max(0.0).sqrt();
    let a = h2n(&blocks.velocity_vector(rd));
    let b = h2n(&dense.velocity_vector(rd));
    let checks = vec![CheckRecord::at_most(
        "first column H2 norm, blocks vs dense (relative)",
        (a - b).abs() / b.max(f64::MIN_POSITIVE),
        1e-8,
    )];
    Ok(SweepReport::new("sweep-regularity", lambdas, series, checks, meta))
}

/// Which beam operator a sweep inverts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeamOperatorKind {
    V,
    Vtilde,
}

impl BeamOperatorKind {
    fn label(self) -> &'static str {
        match self {
            BeamOperatorKind::V => "V",
            BeamOperatorKind::Vtilde => "V~",
        }
    }

    /// Admissible `(theta, beta)`.
    pub fn check_exponents(self, theta: f64, beta: f64) -> Result<()> {
        let hi = match self {
            BeamOperatorKind::V => 7.0 / 8.0,
            BeamOperatorKind::Vtilde => 1.0,
        };
        let ok = |x: f64| (-0.125 - 1e-12..=hi + 1e-12).contains(&x);
        if ok(theta) && ok(beta) && theta + beta <= 1.0 + 1e-12 {
            Ok(())
        } else {
            Err(FsiError::Rejected(format!(
                "(theta, beta) = ({theta}, {beta}) outside the admissible range for {}: [-1/8, {hi}]^2 with theta + beta <= 1",
                self.label()
            )))
        }
    }
}

struct BeamSample {
    /// `||A1^theta X^{-1} A1^beta||` per requested pair.
    norms: Vec<f64>,
    smin: f64,
    cond: f64,
    other_gap: f64,
}

fn beam_sample(
    rd: &ReferenceDomain,
    lambda: C64,
    rho: f64,
    kind: BeamOperatorKind,
    pairs: &[(f64, f64)],
) -> Result<BeamSample> {
    let cfg = rd.cfg();
    let ops = BeamOperators::new(lambda, &rd.sys)?;
    let v = v_operators(&ops, rho, cfg);
    let (main, other) = match kind {
        BeamOperatorKind::V => (&v.v.entries, &v.vtilde.entries),
        BeamOperatorKind::Vtilde => (&v.vtilde.entries, &v.v.entries),
    };
    let sv = linalg::singular_values(main)?;
    let smin = *sv.last().unwrap_or(&0.0);
    if !(smin > 0.0) {
        return Err(FsiError::Numerical(format!("{} singular at lambda = {lambda}", kind.label())));
    }
    let inv = linalg::Lu::new(main)?.inverse();
    let inv_other = linalg::Lu::new(other)?.inverse();
    let norms = pairs
        .iter()
        .map(|&(t, b)| {
            let m = a1_power_matrix(cfg, t) * &inv * a1_power_matrix(cfg, b);
            linalg::op_norm(&m)
        })
        .collect::<Result<Vec<_>>>()?;
    let other_gap = linalg::op_norm(&(&inv - &inv_other))? / linalg::op_norm(&inv)?;
    Ok(BeamSample {
        norms,
        smin,
        cond: sv[0] / smin,
        other_gap,
    })
}

fn pair_label(kind: BeamOperatorKind, t: f64, b: f64) -> String {
    format!("A1^{t} {}^-1 A1^{b}", kind.label())
}

fn sweep_beam(
    kind: BeamOperatorKind,
    rd: &ReferenceDomain,
    rho: &RhoConstants,
    pairs: &[(f64, f64)],
    line: Line,
    band: Band,
    n: usize,
) -> Result<SweepReport> {
    for &(t, b) in pairs {
        kind.check_exponents(t, b)?;
    }
    let (band, lambdas, meta) = prepare(rd, line, band, n, Cutoff::Beam)?;
    let samples = par_map(&lambdas, |l| beam_sample(rd, l, rho.rho, kind, pairs))?;
    let window = abs_window(line, band);
    let fit = FitMode::Peaks { bins: bins_for(n) };
    let mut series: Vec<Series> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(t, b))| {
            let e = 2.0 * t + 2.0 * b - 1.5;
            Series::new(
                pair_label(kind, t, b),
                &lambdas,
                samples.iter().map(|s| s.norms[i]).collect(),
                e,
                Expectation::Slope {
                    exponent: e,
                    tol: V_SLOPE_TOL,
                },
                window,
                fit,
            )
        })
        .collect();
    series.push(Series::new(
        format!("sigma_min({})", kind.label()),
        &lambdas,
        samples.iter().map(|s| s.smin).collect(),
        0.0,
        Expectation::AtLeast { limit: f64::MIN_POSITIVE },
        window,
        FitMode::Plain,
    ));
    series.push(Series::new(
        format!("cond({})", kind.label()),
        &lambdas,
        samples.iter().map(|s| s.cond).collect(),
        0.0,
        Expectation::None,
        window,
        FitMode::Plain,
    ));
    let gap_label = "||V^-1 - V~^-1|| / ||own inverse||";
    series.push(Series::new(
        gap_label,
        &lambdas,
        samples.iter().map(|s| s.other_gap).collect(),
        0.0,
        Expectation::None,
        window,
        FitMode::Plain,
    ));
    let mut checks = vec![];
    if kind == BeamOperatorKind::V {
        let grid = invertibility_grid(rd, rho.rho, band)?;
        let smin = grid.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
        let cond = grid.iter().map(|g| g.2).fold(0.0f64, f64::max);
        checks.push(CheckRecord::at_least("min sigma_min(V) on right half-plane grid", smin, f64::MIN_POSITIVE));
        checks.push(CheckRecord {
            name: "max cond(V) on right half-plane grid".into(),
            value: cond,
            threshold: f64::INFINITY,
            pass: cond.is_finite(),
        });
    }
    let kind_name = match kind {
        BeamOperatorKind::V => "sweep-V",
        BeamOperatorKind::Vtilde => "sweep-Vtilde",
    };
    Ok(SweepReport::new(kind_name, lambdas, series, checks, meta))
}

/// `(lambda, sigma_min(V), cond(V))` on a grid of the closed right
/// half-plane: `Re lambda in {0, lo, sqrt(lo hi), hi}`, `Im lambda` in
/// `{0, +-tau}` with `tau` log-spaced over the band.
pub fn invertibility_grid(rd: &ReferenceDomain, rho: f64, band: Band) -> Result<Vec<(C64, f64, f64)>> {
    let res = [0.0, band.lo, (band.lo * band.hi).sqrt(), band.hi];
    let mut pts = vec![];
    for &re in &res {
        if re > 0.0 {
            pts.push(C64::new(re, 0.0));
        }
        for t in band.taus(6) {
            pts.push(C64::new(re, t));
            pts.push(C64::new(re, -t));
        }
    }
    par_map(&pts, |l| {
        let ops = BeamOperators::new(l, &rd.sys)?;
        let v = v_operators(&ops, rho, rd.cfg());
        let sv = linalg::singular_values(&v.v.entries)?;
        let smin = *sv.last().unwrap_or(&0.0);
        Ok((l, smin, sv[0] / smin))
    })
}

/// `||A1^theta V~^{-1} A1^beta||` along a line; expected exponent
/// `2 theta + 2 beta - 3/2`.
pub fn sweep_vtilde(
    rd: &ReferenceDomain,
    rho: &RhoConstants,
    pairs: &[(f64, f64)],
    line: Line,
    band: Band,
    n: usize,
) -> Result<SweepReport> {
    sweep_beam(BeamOperatorKind::Vtilde, rd, rho, pairs, line, band, n)
}

/// `||A1^theta V^{-1} A1^beta||` along a line, plus invertibility of `V` on
/// a right half-plane grid.
pub fn sweep_v(
    rd: &ReferenceDomain,
    rho: &RhoConstants,
    pairs: &[(f64, f64)],
    line: Line,
    band: Band,
    n: usize,
) -> Result<SweepReport> {
    sweep_beam(BeamOperatorKind::V, rd, rho, pairs, line, band, n)
}

/// Seeded random mean-zero beam vectors with coefficients decaying like
/// `|k|^{-2}`.
pub fn random_beam_vectors(rd: &ReferenceDomain, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let cfg = rd.cfg();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            cfg.beam_slots()
                .iter()
                .map(|&slot| {
                    let k = cfg.mode_index(slot).unsigned_abs() as f64;
                    let re: f64 = rng.gen_range(-1.0..1.0);
                    let im: f64 = rng.gen_range(-1.0..1.0);
                    C64::new(re, im) / (k * k)
                })
                .collect()
        })
        .collect()
}

/// `[A1^{3/8}, K_lambda]`.
pub fn commutator(ops: &BeamOperators, rd: &ReferenceDomain) -> CMat {
    let p = a1_power_matrix(rd.cfg(), 0.375);
    &p * &ops.k - &ops.k * &p
}

/// Commutator bound: per `lambda` the ratio
/// `||[A1^{3/8}, K] eta|| / (|lambda|^{-1} ||A1^{1/2+eps} eta|| + |lambda|^eps ||eta||)`
/// for seeded random `eta`, and its sup over all `eta` through the diagonal
/// weight `(|lambda|^{-2} s^{1+2 eps} + |lambda|^{2 eps})^{1/2}`.
pub fn check_commutator(
    rd: &ReferenceDomain,
    line: Line,
    band: Band,
    n: usize,
    epsilon: f64,
    seed: u64,
) -> Result<SweepReport> {
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(FsiError::Rejected(format!("epsilon = {epsilon} outside (0, 1/4)")));
    }
    let (band, lambdas, mut meta) = prepare(rd, line, band, n, Cutoff::Fluid)?;
    meta.seed = Some(seed);
    let cfg = rd.cfg();
    let vecs = random_beam_vectors(rd, 16, seed);
    let sym = cfg.beam_symbol_powers(1.0);
    let len = cfg.length;
    let bnorm = |v: &[C64]| (len * v.iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt();
    let rows = par_map(&lambdas, |l| {
        let ops = BeamOperators::new(l, &rd.sys)?;
        let c = commutator(&ops, rd);
        let a = l.norm();
        let mut ratio = 0.0f64;
        for v in &vecs {
            let cv = linalg::matvec(&c, v);
            let hi: Vec<C64> = v.iter().zip(&sym).map(|(x, s)| x * s.powf(0.5 + epsilon)).collect();
            let den = bnorm(&hi) / a + a.powf(epsilon) * bnorm(v);
            ratio = ratio.max(bnorm(&cv) / den);
        }
        let w: Vec<f64> = sym
            .iter()
            .map(|s| (s.powf(1.0 + 2.0 * epsilon) / (a * a) + a.powf(2.0 * epsilon)).powf(-0.5))
            .collect();
        let weighted = linalg::op_norm(&(&c * linalg::from_real_diag(&w)))?;
        let raw = linalg::op_norm(&c)?;
        let kn = linalg::op_norm(&ops.k)?;
        // linearity on the first two vectors
        let sum: Vec<C64> = vecs[0].iter().zip(&vecs[1]).map(|(x, y)| x + y).collect();
        let lhs = linalg::matvec(&c, &sum);
        let r0 = linalg::matvec(&c, &vecs[0]);
        let r1 = linalg::matvec(&c, &vecs[1]);
        let lin = lhs
            .iter()
            .zip(r0.iter().zip(&r1))
            .map(|(a, (b, c))| (a - b - c).norm())
            .fold(0.0f64, f64::max)
            / lhs.iter().map(|x| x.norm()).fold(f64::MIN_POSITIVE, f64::max);
        Ok((ratio, weighted, raw / kn.max(f64::MIN_POSITIVE), lin))
    })?;
    let window = abs_window(line, band);
    let bounded = Expectation::Bounded {
        max_slope: BOUNDED_SLOPE,
    };
    let fit = FitMode::Plain;
    let series = vec![
        Series::new("random ratio", &lambdas, rows.iter().map(|r| r.0).collect(), 0.0, bounded.clone(), window, fit),
        Series::new("weighted operator norm", &lambdas, rows.iter().map(|r| r.1).collect(), 0.0, bounded, window, fit),
        Series::new(
            "||[A1^3/8, K]|| / ||K||",
            &lambdas,
            rows.iter().map(|r| r.2).collect(),
            0.0,
            Expectation::None,
            window,
            fit,
        ),
    ];
    let lin = rows.iter().map(|r| r.3).fold(0.0f64, f64::max);
    let checks = vec![CheckRecord::at_most("linearity defect", lin, 1e-12)];
    Ok(SweepReport::new("check-commutator", lambdas, series, checks, meta))
}

/// Admissible exponents used by the battery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryParams {
    /// `theta` in `||A1^{theta/2} K A1^{1/4 - theta/2}||`, within `[1/4, 1/2)`.
    pub k_thetas: Vec<f64>,
    /// `theta` in `||A1^{theta/2} (I + K)^{-1} A1^{-theta/2}||`, within `(-1/2, 1/2)`.
    pub inverse_thetas: Vec<f64>,
}

impl Default for BatteryParams {
    fn default() -> Self {
        BatteryParams {
            k_thetas: vec![0.25, 0.375],
            inverse_thetas: vec![-0.25, 0.0, 0.25],
        }
    }
}

/// Estimates on `W_lambda`, `K_lambda` and `(I + K_lambda)^{-1}`, each as a
/// weighted operator norm per `lambda`.
pub fn battery_wkp(
    rd: &ReferenceDomain,
    params: &BatteryParams,
    line: Line,
    band: Band,
    n: usize,
) -> Result<SweepReport> {
    for &t in &params.k_thetas {
        if !(0.25..0.5).contains(&t) {
            return Err(FsiError::Rejected(format!("K estimate theta = {t} outside [1/4, 1/2)")));
        }
    }
    for &t in &params.inverse_thetas {
        if !(t > -0.5 && t < 0.5) {
            return Err(FsiError::Rejected(format!("(I + K)^-1 estimate theta = {t} outside (-1/2, 1/2)")));
        }
    }
    let (band, lambdas, meta) = prepare(rd, line, band, n, Cutoff::Fluid)?;
    let cfg = rd.cfg();
    let grid = rd.grid();
    let h1 = linalg::cholesky(&velocity_sobolev_gram(grid, 1))?;
    let h2 = linalg::cholesky(&velocity_sobolev_gram(grid, 2))?;
    let l2 = linalg::cholesky(&rd.sys.mass)?;
    let sym = cfg.beam_symbol_powers(1.0);
    let inv_sqrt_len = C64::new(cfg.length.sqrt().recip(), 0.0);
    let id = linalg::identity(cfg.beam_dim());
    let rows = par_map(&lambdas, |l| {
        let ops = BeamOperators::new(l, &rd.sys)?;
        let a = l.norm();
        let fluid = |chol: &CMat, w: Vec<f64>| -> Result<f64> {
            let m = chol.adjoint() * &ops.w * linalg::from_real_diag(&w);
            linalg::op_norm(&linalg::scale(&m, inv_sqrt_len))
        };
        let mut out = vec![];
        // H^0: ||W eta|| <= C ||A1^{-1/8} eta||
        out.push(fluid(&l2, sym.iter().map(|s| s.powf(0.125)).collect())?);
        // H^1: ||W eta|| <= C (||A1^{1/8} eta|| + |lambda|^{1/2} ||A1^{-1/8} eta||)
        out.push(fluid(&h1, sym.iter().map(|s| (s.powf(0.25) + a / s.powf(0.25)).powf(-0.5)).collect())?);
        // H^2: ||W eta|| <= C (||A1^{3/8} eta|| + |lambda| ||A1^{-1/8} eta||)
        out.push(fluid(&h2, sym.iter().map(|s| (s.powf(0.75) + a * a / s.powf(0.25)).powf(-0.5)).collect())?);
        for &t in &params.k_thetas {
            let m = a1_power_matrix(cfg, t / 2.0) * &ops.k * a1_power_matrix(cfg, 0.25 - t / 2.0);
            out.push(linalg::op_norm(&m)?);
        }
        let inv = linalg::Lu::new(&(&id + &ops.k))?.inverse();
        for &t in &params.inverse_thetas {
            let m = a1_power_matrix(cfg, t / 2.0) * &inv * a1_power_matrix(cfg, -t / 2.0);
            out.push(linalg::op_norm(&m)?);
        }
        Ok(out)
    })?;
    let window = abs_window(line, band);
    let bounded = Expectation::Bounded {
        max_slope: BOUNDED_SLOPE,
    };
    let mut labels = vec![
        "W: L2 vs A1^-1/8".to_string(),
        "W: H1 vs (A1^1/8, |lambda|^1/2 A1^-1/8)".to_string(),
        "W: H2 vs (A1^3/8, |lambda| A1^-1/8)".to_string(),
    ];
    labels.extend(params.k_thetas.iter().map(|t| format!("K: theta = {t}")));
    labels.extend(params.inverse_thetas.iter().map(|t| format!("(I+K)^-1: theta = {t}")));
    let series = labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let expected = if label == "(I+K)^-1: theta = 0" {
                Expectation::AtMost { limit: 1.0 + 1e-10 }
            } else {
                bounded.clone()
            };
            Series::new(label, &lambdas, rows.iter().map(|r| r[i]).collect(), 0.0, expected, window, FitMode::Plain)
        })
        .collect();
    Ok(SweepReport::new("battery", lambdas, series, vec![], meta))
}
