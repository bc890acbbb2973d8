//! Nonlinear terms of the transformed system and the fixed point on the
//! forcing pair.
//!
//! Fields live on the flat strip in the Piola representation of the
//! reference domain. With `X_t` the map from the flat strip onto the current
//! domain (`eta_ref = 0`, target `eta(t)`) and `X_0` the one onto the
//! reference domain, the nonlinear fluid term is
//! `nu (L_t - L_0) w - (G_t - G_0) q - b_t [(v . grad) v](X_t)
//!  - b_t (d_t a_t)(X_t) w - grad w (d_t Y_t)(X_t)`,
//! where `L`, `G` are the transformed Laplacian and gradient and
//! `v = a_t w(Y_t)` is the physical velocity. The beam term is the mean-zero
//! difference of the viscous boundary stress on the reference and on the
//! current top wall.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::data::{
    beam_power_norm, initial_state, validate_initial_data, EvolutionConfig, ForcingPair,
    InitialData, NonlinearTerms,
};
use super::linear::{run_linear, LinearStepper, TrajectoryRecord};
use crate::coupling::{CoupledGenerator, CoupledState};
use crate::error::{FsiError, Result};
use crate::geometry::flat_ops::{apply_d_trace_samples, apply_g_grid, apply_l_grid, field_derivs};
use crate::geometry::{build_transform_on, FluidField, PressureField, TransformOps, CONTACT_TOL};
use crate::linalg;
use crate::spectral::{fourier, project_mean_zero, BeamFunction, BeamState};
use crate::stokes::ReferenceDomain;

/// Transform from the flat strip onto the domain under `1 + eta.eta1`,
/// moving with rate `eta.eta2`, on the grid of `reference`.
pub fn current_transform(eta: &BeamState, reference: &TransformOps) -> Result<TransformOps> {
    let grid = &reference.grid;
    let zero = BeamFunction::zeros(grid.cfg.kmax());
    build_transform_on(&eta.eta1, Some(&eta.eta2), &zero, grid, reference.n1())
}

/// Nonlinear fluid term for the current beam state `eta`, the velocity `w`
/// and pressure `q`; `reference` is the flat-to-reference transform.
pub fn evaluate_fhat(
    eta: &BeamState,
    w: &FluidField,
    q: &PressureField,
    reference: &TransformOps,
) -> Result<FluidField> {
    let cur = current_transform(eta, reference)?;
    fhat_with(&cur, w, q, reference)
}

fn fhat_with(
    cur: &TransformOps,
    w: &FluidField,
    q: &PressureField,
    reference: &TransformOps,
) -> Result<FluidField> {
    let grid = &reference.grid;
    let nu = grid.cfg.nu;
    let n1 = reference.n1();
    let ny = grid.ny();
    let lt = apply_l_grid(cur, w)?;
    let l0 = apply_l_grid(reference, w)?;
    let gt = apply_g_grid(cur, q)?;
    let g0 = apply_g_grid(reference, q)?;
    let dv = field_derivs(grid, w, n1);
    let mut out = [vec![0.0; n1 * ny], vec![0.0; n1 * ny]];
    for i1 in 0..n1 {
        for j in 0..ny {
            let p = cur.at(i1, j);
            let idx = i1 * ny + j;
            let wv = [dv.v[0][idx], dv.v[1][idx]];
            let vel: [f64; 2] =
                std::array::from_fn(|i| p.a[i][0] * wv[0] + p.a[i][1] * wv[1]);
            // physical derivative d v_i / d x_jj at X_t(y)
            let dphys = |i: usize, jj: usize| -> f64 {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += p.da[jj][i][k] * wv[k];
                    for l in 0..2 {
                        acc += p.a[i][k] * dv.d[k][l][idx] * p.grad_y[l][jj];
                    }
                }
                acc
            };
            let conv: [f64; 2] =
                std::array::from_fn(|i| vel[0] * dphys(i, 0) + vel[1] * dphys(i, 1));
            let rate: [f64; 2] =
                std::array::from_fn(|i| p.dt_a[i][0] * wv[0] + p.dt_a[i][1] * wv[1]);
            for (alpha, o) in out.iter_mut().enumerate() {
                let mut acc = nu * (lt[alpha][idx] - l0[alpha][idx]) - (gt[alpha][idx] - g0[alpha][idx]);
                for i in 0..2 {
                    acc -= p.b[alpha][i] * (conv[i] + rate[i]);
                }
                for l in 0..2 {
                    acc -= dv.d[alpha][l][idx] * p.dt_y[l];
                }
                o[idx] = acc;
            }
        }
    }
    Ok(FluidField {
        comps: [grid.from_grid(&out[0], n1), grid.from_grid(&out[1], n1)],
    })
}

/// Nonlinear beam term: `2 nu M{[D(w)(-eta10', 1)] . e2 - [D(v)(-eta', 1)] . e2}`
/// with the first stress on the reference wall and the second on the current one.
pub fn evaluate_ghat(eta: &BeamState, w: &FluidField, reference: &TransformOps) -> Result<BeamFunction> {
    let cur = current_transform(eta, reference)?;
    ghat_with(&cur, w, reference)
}

fn ghat_with(cur: &TransformOps, w: &FluidField, reference: &TransformOps) -> Result<BeamFunction> {
    let cfg = &reference.grid.cfg;
    let d0 = apply_d_trace_samples(reference, w)?;
    let dt = apply_d_trace_samples(cur, w)?;
    let vals: Vec<f64> = d0
        .iter()
        .zip(&dt)
        .map(|(a, b)| 2.0 * cfg.nu * (a - b))
        .collect();
    Ok(project_mean_zero(&BeamFunction {
        coeffs: fourier::coeffs_from_real(&vals, cfg.kmax()),
    }))
}

/// Beam state `(eta, eta_t)` of a packed coupled state.
fn beam_state(s: &CoupledState, kmax: usize) -> BeamState {
    let (eta1, eta2) = s.beam(kmax);
    BeamState { eta1, eta2 }
}

fn contact_at(e: FsiError, t: f64) -> FsiError {
    match e {
        FsiError::Contact { min_gap, at_s, .. } => FsiError::Contact {
            min_gap,
            at_s,
            time: Some(t),
        },
        other => other,
    }
}

/// Nonlinear terms at one state, or zero when they are switched off.
fn z_map_state(
    rd: &ReferenceDomain,
    s: &CoupledState,
    q: &PressureField,
    mode: NonlinearTerms,
    t: f64,
) -> Result<(FluidField, BeamFunction)> {
    let grid = rd.grid();
    let kmax = rd.cfg().kmax();
    if mode == NonlinearTerms::Zeroed {
        return Ok((FluidField::zeros(grid), BeamFunction::zeros(kmax)));
    }
    let eta = beam_state(s, kmax);
    let cur = current_transform(&eta, &rd.tf).map_err(|e| contact_at(e, t))?;
    let w = s.velocity(rd);
    Ok((fhat_with(&cur, &w, q, &rd.tf)?, ghat_with(&cur, &w, &rd.tf)?))
}

/// The fixed-point map: nonlinear terms sampled along a trajectory.
pub fn z_map(rd: &ReferenceDomain, traj: &TrajectoryRecord, mode: NonlinearTerms) -> Result<ForcingPair> {
    let mut out = ForcingPair {
        times: traj.times.clone(),
        fluid: Vec::with_capacity(traj.len()),
        beam: Vec::with_capacity(traj.len()),
    };
    for ((s, q), &t) in traj.states.iter().zip(&traj.pressures).zip(&traj.times) {
        let (f, g) = z_map_state(rd, s, q, mode, t)?;
        out.fluid.push(f);
        out.beam.push(g);
    }
    Ok(out)
}

/// `||F||_{L2(0,T; L2)} + ||G||_{L2(0,T; D(A1^{1/8}))}` by the trapezoid rule.
pub fn forcing_norm(rd: &ReferenceDomain, f: &ForcingPair) -> f64 {
    let grid = rd.grid();
    let cfg = rd.cfg();
    let fl: Vec<f64> = f
        .fluid
        .iter()
        .map(|x| {
            let v = x.to_vector(grid);
            linalg::dot(&v, &linalg::matvec(&rd.sys.mass, &v)).re.max(0.0)
        })
        .collect();
    let gl: Vec<f64> = f
        .beam
        .iter()
        .map(|g| beam_power_norm(cfg, &g.beam_vector(), 0.125).powi(2))
        .collect();
    let trap = |v: &[f64]| -> f64 {
        f.times
            .windows(2)
            .zip(v.windows(2))
            .map(|(t, x)| 0.5 * (t[1] - t[0]) * (x[0] + x[1]))
            .sum::<f64>()
            .max(0.0)
            .sqrt()
    };
    trap(&fl) + trap(&gl)
}

fn forcing_diff(a: &ForcingPair, b: &ForcingPair) -> ForcingPair {
    ForcingPair {
        times: a.times.clone(),
        fluid: a.fluid.iter().zip(&b.fluid).map(|(x, y)| x.sub(y)).collect(),
        beam: a.beam.iter().zip(&b.beam).map(|(x, y)| x.sub(y)).collect(),
    }
}

/// Outcome of the fixed point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonlinearOutcome {
    pub trajectory: TrajectoryRecord,
    /// Horizon actually reached after halvings.
    pub horizon: f64,
    pub halvings: usize,
    pub iterations: usize,
    /// Relative forcing updates of every iteration at the final horizon.
    pub history: Vec<f64>,
    /// The forcing pair at the fixed point.
    pub forcing: ForcingPair,
    /// `||Z(F, G)||` at the fixed point.
    pub forcing_norm: f64,
}

enum Attempt {
    Converged(NonlinearOutcome),
    NotContracting(Vec<f64>),
}

fn attempt(
    rd: &ReferenceDomain,
    st: &LinearStepper<'_>,
    z0: &CoupledState,
    steps: usize,
    cfg: &EvolutionConfig,
    halvings: usize,
) -> Result<Attempt> {
    let mut forcing = ForcingPair::zero();
    let mut history = Vec::new();
    for it in 1..=cfg.fp_max_iter {
        let traj = run_linear(st, z0, &forcing, steps)?;
        if let Some((i, g)) = traj
            .min_gap
            .iter()
            .enumerate()
            .find(|(_, g)| **g < CONTACT_TOL)
        {
            return Err(FsiError::Contact {
                min_gap: *g,
                at_s: f64::NAN,
                time: Some(traj.times[i]),
            });
        }
        let next = z_map(rd, &traj, cfg.nonlinear)?;
        let nn = forcing_norm(rd, &next);
        let update = if forcing.is_zero() {
            if nn == 0.0 {
                0.0
            } else {
                1.0
            }
        } else {
            forcing_norm(rd, &forcing_diff(&next, &forcing)) / nn.max(f64::MIN_POSITIVE)
        };
        history.push(update);
        if nn > cfg.radius {
            return Ok(Attempt::NotContracting(history));
        }
        if update < cfg.fp_tol {
            return Ok(Attempt::Converged(NonlinearOutcome {
                horizon: *traj.times.last().unwrap(),
                trajectory: traj,
                halvings,
                iterations: it,
                history,
                forcing_norm: nn,
                forcing: next,
            }));
        }
        let n = history.len();
        if n >= 3 && history[n - 1] >= history[n - 2] {
            return Ok(Attempt::NotContracting(history));
        }
        forcing = next;
    }
    Ok(Attempt::NotContracting(history))
}

/// Fixed point on the forcing pair: solve the linear system with the current
/// `(F, G)`, evaluate the nonlinear terms along the trajectory and repeat
/// until the relative update drops below `fp_tol`. The horizon is halved
/// when the iteration leaves the ball of radius `R` or stops contracting.
pub fn solve_nonlinear(
    rd: &ReferenceDomain,
    gen: &CoupledGenerator,
    data: &InitialData,
    cfg: &EvolutionConfig,
) -> Result<NonlinearOutcome> {
    validate_initial_data(rd, data)?;
    let kmax = rd.cfg().kmax();
    let reference = BeamFunction {
        coeffs: fourier::resize(&rd.sys.eta10.coeffs, kmax),
    };
    let start = BeamFunction {
        coeffs: fourier::resize(&data.eta1.coeffs, kmax),
    };
    if reference.sub(&start).max_abs_coeff() > 1e-12 {
        return Err(FsiError::Rejected(
            "the nonlinear problem starts from the reference deflection".into(),
        ));
    }
    cfg.validate(Some(data.norm(rd.grid())))?;
    let z0 = initial_state(rd, data)?;
    let (_, dt) = cfg.steps_for(cfg.horizon);
    let st = LinearStepper::new(rd, gen, cfg.scheme, dt)?;
    let mut all = Vec::new();
    for h in 0..=cfg.halving {
        let horizon = cfg.horizon / f64::powi(2.0, h as i32);
        let steps = ((horizon / dt).round() as usize).max(1);
        match attempt(rd, &st, &z0, steps, cfg, h)? {
            Attempt::Converged(out) => return Ok(out),
            Attempt::NotContracting(hist) => all.extend(hist),
        }
    }
    Err(FsiError::NonConvergence {
        iterations: all.len(),
        last: all.last().copied().unwrap_or(f64::NAN),
        history: all,
    })
}

/// `||Z(0, 0)||`: nonlinear terms along the linear trajectory without forcing.
pub fn z_map_norm_at_zero(
    rd: &ReferenceDomain,
    gen: &CoupledGenerator,
    data: &InitialData,
    cfg: &EvolutionConfig,
    horizon: f64,
) -> Result<f64> {
    validate_initial_data(rd, data)?;
    let z0 = initial_state(rd, data)?;
    let (_, dt) = cfg.steps_for(cfg.horizon);
    let steps = ((horizon / dt).round() as usize).max(1);
    let st = LinearStepper::new(rd, gen, cfg.scheme, dt)?;
    let traj = run_linear(&st, &z0, &ForcingPair::zero(), steps)?;
    Ok(forcing_norm(rd, &z_map(rd, &traj, NonlinearTerms::Full)?))
}

/// Residual of the transformed nonlinear system along a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearResidual {
    /// `||r||_{L2(0,T; H)}` of the midpoint residual.
    pub absolute: f64,
    /// Reference scale `||z'|| + ||P0 [F^, 0, G^]||` in the same norm.
    pub scale: f64,
    pub relative: f64,
}

/// Midpoint residual `(z_{n+1} - z_n)/dt - A0 z_m - P0 [F^(z_m); 0; G^(z_m)]`
/// with `z_m = (z_n + z_{n+1})/2`, the nonlinear terms evaluated at the
/// midpoint state and midpoint pressure, measured in the energy norm.
pub fn nonlinear_residual(
    rd: &ReferenceDomain,
    gen: &CoupledGenerator,
    traj: &TrajectoryRecord,
    mode: NonlinearTerms,
) -> Result<NonlinearResidual> {
    let n = gen.dim();
    let (nz, nb) = (gen.nz, gen.nb);
    let zero_beam = vec![linalg::ZERO; nb];
    let mut abs2 = 0.0;
    let mut rate2 = 0.0;
    let mut force2 = 0.0;
    for k in 0..traj.len().saturating_sub(1) {
        let dt = traj.times[k + 1] - traj.times[k];
        let z0 = traj.states[k].pack();
        let z1 = traj.states[k + 1].pack();
        let zm: Vec<C64> = z0.iter().zip(&z1).map(|(a, b)| (a + b) * 0.5).collect();
        let zt: Vec<C64> = z0.iter().zip(&z1).map(|(a, b)| (b - a) / dt).collect();
        let qm = PressureField {
            values: traj.pressures[k]
                .values
                .iter()
                .zip(&traj.pressures[k + 1].values)
                .map(|(a, b)| (a + b) * 0.5)
                .collect(),
        };
        let tm = 0.5 * (traj.times[k] + traj.times[k + 1]);
        let sm = CoupledState::unpack(&zm, nz, nb);
        let (f, g) = z_map_state(rd, &sm, &qm, mode, tm)?;
        let pf = gen.ambient_pairing(rd, &f.to_vector(rd.grid()), &zero_beam, &g.beam_vector());
        let bz = linalg::matvec(&gen.dynamics, &zm);
        let mzt = linalg::matvec(&gen.mass_h, &zt);
        let r: Vec<C64> = (0..n).map(|i| mzt[i] - bz[i] - pf[i]).collect();
        // dual energy norm of a pairing vector p: ||R^{-1} p||
        let dual = |p: &[C64]| {
            let y = linalg::solve_lower(&gen.chol, &linalg::column(p));
            linalg::vec_norm(&linalg::col_to_vec(y.as_ref(), 0))
        };
        abs2 += dt * dual(&r).powi(2);
        rate2 += dt * gen.energy(&zt);
        force2 += dt * dual(&pf).powi(2);
    }
    let absolute = abs2.sqrt();
    let scale = rate2.sqrt() + force2.sqrt();
    Ok(NonlinearResidual {
        absolute,
        scale,
        relative: if scale > 0.0 { absolute / scale } else { 0.0 },
    })
}
