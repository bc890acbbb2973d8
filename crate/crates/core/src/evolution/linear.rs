//! Time stepping of the linear coupled system `z' = A0 z + P0 [F; 0; G]`.
//!
//! Steps are taken on the Galerkin form `M_H z' = B z + J^H G_x [F; 0; G]`,
//! so one implicit Euler step solves `(M_H - dt B) z1 = M_H z0 + dt p1` and a
//! Crank–Nicolson step solves
//! `(M_H - dt/2 B) z1 = (M_H + dt/2 B) z0 + dt (p0 + p1) / 2`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::data::{
    beam_power_norm, initial_state, validate_initial_data, EvolutionConfig, ForcingPair,
    InitialData, Scheme, DATA_EPSILON,
};
use crate::coupling::{CoupledGenerator, CoupledState};
use crate::error::Result;
use crate::geometry::{scalar_sobolev_gram, velocity_sobolev_gram, PressureField};
use crate::linalg::{self, CMat, Lu};
use crate::spectral::{min_gap, BeamFunction};
use crate::stokes::ReferenceDomain;

/// Factorized step matrices, shared read-only across a run.
pub struct LinearStepper<'a> {
    pub rd: &'a ReferenceDomain,
    pub gen: &'a CoupledGenerator,
    pub scheme: Scheme,
    pub dt: f64,
    step: Lu,
    explicit: CMat,
    mass: Lu,
}

impl<'a> LinearStepper<'a> {
    pub fn new(rd: &'a ReferenceDomain, gen: &'a CoupledGenerator, scheme: Scheme, dt: f64) -> Result<Self> {
        let theta = match scheme {
            Scheme::ImplicitEuler => 1.0,
            Scheme::CrankNicolson => 0.5,
        };
        let a = C64::new(-theta * dt, 0.0);
        let step = Lu::new(&linalg::axpby(linalg::ONE, &gen.mass_h, a, &gen.dynamics))?;
        let b = C64::new((1.0 - theta) * dt, 0.0);
        let explicit = linalg::axpby(linalg::ONE, &gen.mass_h, b, &gen.dynamics);
        Ok(LinearStepper {
            rd,
            gen,
            scheme,
            dt,
            step,
            explicit,
            mass: Lu::new(&gen.mass_h)?,
        })
    }

    /// Energy pairing of forcing at `t`, or zero.
    fn pairing(&self, forcing: &ForcingPair, t: f64) -> Option<Vec<C64>> {
        let nb = self.gen.nb;
        forcing.at(t, self.rd.grid()).map(|(f, g)| {
            self.gen
                .ambient_pairing(self.rd, &f, &vec![linalg::ZERO; nb], &g)
        })
    }

    /// Packed state after one step from `t` to `t + dt`.
    pub fn advance(&self, z: &[C64], forcing: &ForcingPair, t: f64) -> Vec<C64> {
        let mut rhs = linalg::matvec(&self.explicit, z);
        let dt = self.dt;
        let (w0, w1) = match self.scheme {
            Scheme::ImplicitEuler => (0.0, dt),
            Scheme::CrankNicolson => (0.5 * dt, 0.5 * dt),
        };
        if w0 > 0.0 {
            if let Some(p) = self.pairing(forcing, t) {
                rhs.iter_mut().zip(&p).for_each(|(r, x)| *r += x * w0);
            }
        }
        if let Some(p) = self.pairing(forcing, t + dt) {
            rhs.iter_mut().zip(&p).for_each(|(r, x)| *r += x * w1);
        }
        self.step.solve_vec(&rhs)
    }

    /// `z' = M_H^{-1} (B z + p(t))` of the semi-discrete system.
    pub fn rate(&self, z: &[C64], forcing: &ForcingPair, t: f64) -> Vec<C64> {
        let mut r = linalg::matvec(&self.gen.dynamics, z);
        if let Some(p) = self.pairing(forcing, t) {
            r.iter_mut().zip(&p).for_each(|(a, b)| *a += b);
        }
        self.mass.solve_vec(&r)
    }

    /// Pressure of the semi-discrete momentum equation at a node:
    /// the interior residual `M w' + A w - M F` is a discrete gradient.
    pub fn pressure(&self, z: &[C64], zdot: &[C64], forcing: &ForcingPair, t: f64) -> Result<PressureField> {
        let (nz, nb) = (self.gen.nz, self.gen.nb);
        let sys = &self.rd.sys;
        let w = CoupledState::unpack(z, nz, nb).velocity_vector(self.rd);
        let wt = CoupledState::unpack(zdot, nz, nb).velocity_vector(self.rd);
        let mut x = wt;
        if let Some((f, _)) = forcing.at(t, self.rd.grid()) {
            x.iter_mut().zip(&f).for_each(|(a, b)| *a -= b);
        }
        let mx = linalg::matvec(&sys.mass, &x);
        let aw = linalg::matvec(&sys.visc, &w);
        let r: Vec<C64> = mx.iter().zip(&aw).map(|(a, b)| a + b).collect();
        Ok(sys.recover_pressure(&r)?.0)
    }

    /// One step of the linear system from `state` at time `t`, with the
    /// pressure recovered at `t + dt`.
    pub fn step_linear(
        &self,
        state: &CoupledState,
        forcing: &ForcingPair,
        t: f64,
    ) -> Result<(CoupledState, PressureField)> {
        let z1 = self.advance(&state.pack(), forcing, t);
        let zd = self.rate(&z1, forcing, t + self.dt);
        let q = self.pressure(&z1, &zd, forcing, t + self.dt)?;
        Ok((CoupledState::unpack(&z1, self.gen.nz, self.gen.nb), q))
    }
}

/// Norms at one time node entering the linear estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub w_h1: f64,
    pub w_h2: f64,
    pub w_t_l2: f64,
    pub q_h1: f64,
    pub eta_58: f64,
    pub eta_78: f64,
    pub eta_38: f64,
    pub eta_t_18: f64,
    pub eta_t_38: f64,
    /// `||eta_tt||` in the dual of `D(A1^{1/8})`.
    pub eta_tt_dual18: f64,
    /// `||F||_{L2}` and `||G||_{D(A1^{1/8})}` of the forcing at the node.
    pub f_l2: f64,
    pub g_18: f64,
}

/// Linear or nonlinear trajectory with per-node diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<CoupledState>,
    pub pressures: Vec<PressureField>,
    pub norms: Vec<NormSample>,
    /// `||z||_H^2 / 2`.
    pub energy: Vec<f64>,
    /// `int eta1 ds`.
    pub mass: Vec<f64>,
    /// `min (1 + eta1)` over the boundary grid.
    pub min_gap: Vec<f64>,
    /// `max |div w|` of the discrete divergence.
    pub divergence: Vec<f64>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &CoupledState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Gram matrices for the per-node norms.
pub(crate) struct NormGrams {
    h1: CMat,
    h2: CMat,
    q1: CMat,
}

impl NormGrams {
    pub(crate) fn new(rd: &ReferenceDomain) -> Self {
        let grid = rd.grid();
        NormGrams {
            h1: velocity_sobolev_gram(grid, 1),
            h2: velocity_sobolev_gram(grid, 2),
            q1: scalar_sobolev_gram(grid, 1),
        }
    }
}

fn quad(g: &CMat, v: &[C64]) -> f64 {
    linalg::dot(v, &linalg::matvec(g, v)).re.max(0.0).sqrt()
}

/// Diagnostics of one node; `zdot` is the semi-discrete rate.
fn sample_norms(
    st: &LinearStepper<'_>,
    grams: &NormGrams,
    z: &[C64],
    zdot: &[C64],
    q: &PressureField,
    forcing: &ForcingPair,
    t: f64,
) -> NormSample {
    let rd = st.rd;
    let cfg = rd.cfg();
    let (nz, nb) = (st.gen.nz, st.gen.nb);
    let s = CoupledState::unpack(z, nz, nb);
    let sd = CoupledState::unpack(zdot, nz, nb);
    let w = s.velocity_vector(rd);
    let wt = sd.velocity_vector(rd);
    let (f_l2, g_18) = match forcing.at(t, rd.grid()) {
        Some((f, g)) => (quad(&rd.sys.mass, &f), beam_power_norm(cfg, &g, 0.125)),
        None => (0.0, 0.0),
    };
    NormSample {
        w_h1: quad(&grams.h1, &w),
        w_h2: quad(&grams.h2, &w),
        w_t_l2: quad(&rd.sys.mass, &wt),
        q_h1: quad(&grams.q1, &q.values),
        eta_58: beam_power_norm(cfg, &s.eta1, 0.625),
        eta_78: beam_power_norm(cfg, &s.eta1, 0.875),
        eta_38: beam_power_norm(cfg, &s.eta1, 0.375),
        eta_t_18: beam_power_norm(cfg, &s.eta2, 0.125),
        eta_t_38: beam_power_norm(cfg, &s.eta2, 0.375),
        eta_tt_dual18: beam_power_norm(cfg, &sd.eta2, -0.125),
        f_l2,
        g_18,
    }
}

fn push_node(
    rec: &mut TrajectoryRecord,
    st: &LinearStepper<'_>,
    grams: &NormGrams,
    z: Vec<C64>,
    q: PressureField,
    forcing: &ForcingPair,
    t: f64,
) {
    let rd = st.rd;
    let cfg = rd.cfg();
    let zd = st.rate(&z, forcing, t);
    let s = CoupledState::unpack(&z, st.gen.nz, st.gen.nb);
    let eta1 = BeamFunction::from_beam_vector(cfg.kmax(), &s.eta1);
    let div = rd
        .sys
        .divergence(&s.velocity_vector(rd))
        .iter()
        .map(|x| x.norm())
        .fold(0.0, f64::max);
    rec.norms.push(sample_norms(st, grams, &z, &zd, &q, forcing, t));
    rec.energy.push(0.5 * st.gen.energy(&z));
    rec.mass.push(eta1.mean().re * cfg.length);
    rec.min_gap.push(min_gap(&eta1, cfg).0);
    rec.divergence.push(div);
    rec.times.push(t);
    rec.states.push(s);
    rec.pressures.push(q);
}

/// Trajectory of the linear system from validated data over `[0, horizon]`.
pub fn run_linear(
    st: &LinearStepper<'_>,
    z0: &CoupledState,
    forcing: &ForcingPair,
    steps: usize,
) -> Result<TrajectoryRecord> {
    let grams = NormGrams::new(st.rd);
    let mut rec = TrajectoryRecord {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        pressures: Vec::with_capacity(steps + 1),
        norms: Vec::with_capacity(steps + 1),
        energy: Vec::with_capacity(steps + 1),
        mass: Vec::with_capacity(steps + 1),
        min_gap: Vec::with_capacity(steps + 1),
        divergence: Vec::with_capacity(steps + 1),
    };
    let mut z = z0.pack();
    let zd = st.rate(&z, forcing, 0.0);
    let q = st.pressure(&z, &zd, forcing, 0.0)?;
    push_node(&mut rec, st, &grams, z.clone(), q, forcing, 0.0);
    for n in 0..steps {
        let t = n as f64 * st.dt;
        z = st.advance(&z, forcing, t);
        let t1 = (n + 1) as f64 * st.dt;
        let zd = st.rate(&z, forcing, t1);
        let q = st.pressure(&z, &zd, forcing, t1)?;
        push_node(&mut rec, st, &grams, z.clone(), q, forcing, t1);
    }
    Ok(rec)
}

/// Validate the data, then integrate the linear system with `cfg.scheme`.
pub fn solve_linear(
    rd: &ReferenceDomain,
    gen: &CoupledGenerator,
    data: &InitialData,
    forcing: &ForcingPair,
    cfg: &EvolutionConfig,
) -> Result<TrajectoryRecord> {
    cfg.validate(None)?;
    forcing.validate()?;
    validate_initial_data(rd, data)?;
    let z0 = initial_state(rd, data)?;
    let (steps, dt) = cfg.steps_for(cfg.horizon);
    let st = LinearStepper::new(rd, gen, cfg.scheme, dt)?;
    run_linear(&st, &z0, forcing, steps)
}

/// Both sides of the linear estimate over the computed horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearEstimate {
    /// Solution norms, summed over the intersection spaces.
    pub lhs: f64,
    /// Data and forcing norms.
    pub rhs: f64,
    pub ratio: f64,
    pub lhs_terms: Vec<(String, f64)>,
    pub rhs_terms: Vec<(String, f64)>,
}

fn l2_time(times: &[f64], vals: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = vals.map(|x| x * x).collect();
    let s: f64 = times
        .windows(2)
        .zip(v.windows(2))
        .map(|(t, x)| 0.5 * (t[1] - t[0]) * (x[0] + x[1]))
        .sum();
    s.max(0.0).sqrt()
}

fn sup(vals: impl Iterator<Item = f64>) -> f64 {
    vals.fold(0.0, f64::max)
}

/// Evaluate both sides of the estimate for a trajectory and its data.
pub fn linear_estimate(rd: &ReferenceDomain, traj: &TrajectoryRecord, data: &InitialData) -> LinearEstimate {
    let t = &traj.times;
    let n = &traj.norms;
    let it = |f: fn(&NormSample) -> f64| n.iter().map(f);
    let lhs_terms: Vec<(String, f64)> = vec![
        ("w in L2(H2)".into(), l2_time(t, it(|x| x.w_h2))),
        ("w in C(H1)".into(), sup(it(|x| x.w_h1))),
        ("w in H1(L2)".into(), l2_time(t, it(|x| x.w_t_l2))),
        ("q in L2(H1)".into(), l2_time(t, it(|x| x.q_h1))),
        ("eta in L2(D(A1^7/8))".into(), l2_time(t, it(|x| x.eta_78))),
        ("eta in C(D(A1^5/8))".into(), sup(it(|x| x.eta_58))),
        (
            "eta in H1(D(A1^3/8))".into(),
            l2_time(t, it(|x| x.eta_38.hypot(x.eta_t_38))),
        ),
        ("eta_t in L2(D(A1^3/8))".into(), l2_time(t, it(|x| x.eta_t_38))),
        ("eta_t in C(D(A1^1/8))".into(), sup(it(|x| x.eta_t_18))),
        (
            "eta_t in H1(D(A1^1/8)')".into(),
            l2_time(t, it(|x| x.eta_t_18.hypot(x.eta_tt_dual18))),
        ),
    ];
    let grid = rd.grid();
    let cfg = rd.cfg();
    let w0 = data.w0.to_vector(grid);
    let h1 = velocity_sobolev_gram(grid, 1);
    let rhs_terms: Vec<(String, f64)> = vec![
        ("w0 in H1".into(), quad(&h1, &w0)),
        (
            "eta1 in D(A1^{3/4+eps})".into(),
            beam_power_norm(cfg, &data.eta1.beam_vector(), 0.75 + DATA_EPSILON),
        ),
        (
            "eta2 in D(A1^{1/4+eps})".into(),
            beam_power_norm(cfg, &data.eta2.beam_vector(), 0.25 + DATA_EPSILON),
        ),
        ("F in L2(L2)".into(), l2_time(t, it(|x| x.f_l2))),
        ("G in L2(D(A1^1/8))".into(), l2_time(t, it(|x| x.g_18))),
    ];
    let lhs: f64 = lhs_terms.iter().map(|x| x.1).sum();
    let rhs: f64 = rhs_terms.iter().map(|x| x.1).sum();
    LinearEstimate {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { f64::NAN },
        lhs_terms,
        rhs_terms,
    }
}
