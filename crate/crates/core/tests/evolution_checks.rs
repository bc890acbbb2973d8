//! Linear stepping against eigen-decomposition oracles, and the nonlinear
//! terms against manufactured moving-domain fields.

mod common;

use std::sync::OnceLock;

use fsi_strip::coupling::{assemble_a0, CoupledGenerator, CoupledState};
use fsi_strip::evolution::{
    evaluate_fhat, evaluate_ghat, initial_state, run_linear, solve_linear, solve_nonlinear,
    validate_initial_data, z_map_norm_at_zero, EvolutionConfig, ForcingPair, InitialData,
    LinearStepper, NonlinearTerms, Scheme,
};
use fsi_strip::geometry::{apply_g, apply_l, FluidField, PressureField};
use fsi_strip::linalg;
use fsi_strip::spectral::{project_mean_zero, BeamFunction, BeamState};
use fsi_strip::stokes::ReferenceDomain;
use fsi_strip::{FsiError, C64};
use proptest::prelude::*;

fn curved() -> &'static (ReferenceDomain, CoupledGenerator) {
    static CELL: OnceLock<(ReferenceDomain, CoupledGenerator)> = OnceLock::new();
    CELL.get_or_init(|| {
        let rd = common::domain(12, 12, 0.2);
        let gen = assemble_a0(&rd).unwrap();
        (rd, gen)
    })
}

fn cfg(dt: f64, horizon: f64, scheme: Scheme) -> EvolutionConfig {
    EvolutionConfig {
        dt,
        horizon,
        scheme,
        ..EvolutionConfig::default()
    }
}

fn diff_norm(a: &[C64], b: &[C64]) -> f64 {
    linalg::vec_norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
}

#[test]
fn zero_data_is_valid_and_stays_zero() {
    let (rd, gen) = curved();
    let data = InitialData::zeros(rd.grid());
    let d = validate_initial_data(rd, &data).unwrap();
    assert_eq!(d.divergence, 0.0);
    assert_eq!(d.top_trace, 0.0);
    let traj = solve_linear(rd, gen, &data, &ForcingPair::zero(), &cfg(0.05, 0.2, Scheme::ImplicitEuler)).unwrap();
    assert_eq!(traj.len(), 5);
    assert!(traj.states.iter().all(|s| s.pack().iter().all(|x| x.norm() == 0.0)));
}

#[test]
fn lifted_velocity_has_compatible_trace() {
    let (rd, _) = curved();
    let cfg = rd.cfg();
    let eta2 = BeamFunction::from_fn(cfg, |s| s.cos());
    let data = InitialData::with_lifted_velocity(rd, BeamFunction::zeros(cfg.kmax()), eta2).unwrap();
    let d = validate_initial_data(rd, &data).unwrap();
    assert!(d.top_trace < 1e-10, "{}", d.top_trace);
    assert!(d.bottom_trace < 1e-10);
    // the state reproduces the velocity
    let z = initial_state(rd, &data).unwrap();
    let w = z.velocity(rd);
    assert!(w.sub(&data.w0).max_abs() < 1e-9);
}

#[test]
fn contact_and_incompatible_data_are_rejected() {
    let (rd, _) = curved();
    let cfg = rd.cfg();
    let mut data = InitialData::zeros(rd.grid());
    data.eta1 = BeamFunction::from_fn(cfg, |s| 1.2 * s.sin());
    assert!(matches!(validate_initial_data(rd, &data), Err(FsiError::Contact { .. })));
    let mut data = InitialData::zeros(rd.grid());
    data.eta2 = BeamFunction::from_fn(cfg, |s| s.cos());
    match validate_initial_data(rd, &data) {
        Err(FsiError::Rejected(m)) => assert!(m.contains("top trace")),
        other => panic!("expected rejection, got {other:?}"),
    }
}

/// Eigenpair of `A0` with the smallest modulus among oscillatory modes.
fn slow_mode(gen: &CoupledGenerator) -> (C64, Vec<C64>) {
    let (vals, vecs) = linalg::eigen(&gen.a0.entries).unwrap();
    let i = (0..vals.len())
        .filter(|&i| vals[i].im.abs() > 1e-6)
        .min_by(|&a, &b| vals[a].norm().total_cmp(&vals[b].norm()))
        .unwrap();
    (vals[i], linalg::col_to_vec(vecs.as_ref(), i))
}

#[test]
fn implicit_step_of_eigenvector_is_scalar_multiple() {
    let (rd, gen) = curved();
    let (mu, v) = slow_mode(gen);
    let dt = 0.01;
    let st = LinearStepper::new(rd, gen, Scheme::ImplicitEuler, dt).unwrap();
    let z1 = st.advance(&v, &ForcingPair::zero(), 0.0);
    let want: Vec<C64> = v.iter().map(|x| x / (1.0 - dt * mu)).collect();
    assert!(diff_norm(&z1, &want) < 1e-8 * linalg::vec_norm(&v));
    let st = LinearStepper::new(rd, gen, Scheme::CrankNicolson, dt).unwrap();
    let z1 = st.advance(&v, &ForcingPair::zero(), 0.0);
    let f = (1.0 + 0.5 * dt * mu) / (1.0 - 0.5 * dt * mu);
    let want: Vec<C64> = v.iter().map(|x| x * f).collect();
    assert!(diff_norm(&z1, &want) < 1e-8 * linalg::vec_norm(&v));
}

fn order(scheme: Scheme) -> f64 {
    let (rd, gen) = curved();
    let (mu, v) = slow_mode(gen);
    let horizon = 0.4;
    let errs: Vec<(f64, f64)> = [0.04, 0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| {
            let st = LinearStepper::new(rd, gen, scheme, dt).unwrap();
            let n = (horizon / dt as f64).round() as usize;
            let mut z = v.clone();
            for k in 0..n {
                z = st.advance(&z, &ForcingPair::zero(), k as f64 * dt);
            }
            let exact: Vec<C64> = v.iter().map(|x| x * (mu * horizon).exp()).collect();
            (dt, diff_norm(&z, &exact))
        })
        .collect();
    let (a, b) = (errs[0], errs[errs.len() - 1]);
    (a.1 / b.1).ln() / (a.0 / b.0).ln()
}

#[test]
fn scheme_orders() {
    let ie = order(Scheme::ImplicitEuler);
    let cn = order(Scheme::CrankNicolson);
    assert!((ie - 1.0).abs() < 0.2, "implicit Euler order {ie}");
    assert!((cn - 2.0).abs() < 0.2, "Crank-Nicolson order {cn}");
}

#[test]
fn mass_is_conserved_and_divergence_vanishes() {
    let (rd, gen) = curved();
    let cfg = rd.cfg();
    let data = InitialData::with_lifted_velocity(
        rd,
        BeamFunction::from_fn(cfg, |s| 0.1 * (2.0 * s).cos()),
        BeamFunction::from_fn(cfg, |s| 0.2 * s.sin()),
    )
    .unwrap();
    let traj = solve_linear(rd, gen, &data, &ForcingPair::zero(), &cfg_ie()).unwrap();
    assert!(traj.mass.iter().all(|m| m.abs() < 1e-12));
    assert!(traj.divergence.iter().all(|d| *d < 1e-10));
    assert!(traj.energy.windows(2).all(|e| e[1] <= e[0] * (1.0 + 1e-12)));
}

fn cfg_ie() -> EvolutionConfig {
    cfg(0.02, 0.2, Scheme::ImplicitEuler)
}

/// Manufactured physical velocity and pressure with all derivatives used.
struct Manufactured;

impl Manufactured {
    fn v(x1: f64, x2: f64) -> [f64; 2] {
        [x1.sin() * x2 * x2, x1.cos() * x2 + x2.powi(3) / 3.0]
    }
    /// `grad[i][j] = d v_i / d x_j`.
    fn grad(x1: f64, x2: f64) -> [[f64; 2]; 2] {
        [
            [x1.cos() * x2 * x2, 2.0 * x1.sin() * x2],
            [-x1.sin() * x2, x1.cos() + x2 * x2],
        ]
    }
    fn lap(x1: f64, x2: f64) -> [f64; 2] {
        [-x1.sin() * x2 * x2 + 2.0 * x1.sin(), -x1.cos() * x2 + 2.0 * x2]
    }
    fn p(x1: f64, x2: f64) -> f64 {
        x1.cos() * x2 * x2
    }
    fn grad_p(x1: f64, x2: f64) -> [f64; 2] {
        [-x1.sin() * x2 * x2, 2.0 * x1.cos() * x2]
    }
}

type M = Manufactured;

/// Deflection `h`, slope and rate of the current beam.
fn beam_jet(s: f64) -> (f64, f64, f64, f64) {
    (0.1 * s.sin(), 0.1 * s.cos(), 0.3 * (2.0 * s).cos(), -0.6 * (2.0 * s).sin())
}

/// Piola representation `b_t v(X_t)` of the manufactured velocity.
fn piola(s: f64, y: f64) -> [f64; 2] {
    let (h, h1, _, _) = beam_jet(s);
    let g = 1.0 + h;
    let v = M::v(s, y * g);
    [g * v[0], -y * h1 * v[0] + v[1]]
}

fn piola_rate(s: f64, y: f64) -> [f64; 2] {
    let (h, h1, r, r1) = beam_jet(s);
    let g = 1.0 + h;
    let x2 = y * g;
    let v = M::v(s, x2);
    let d = M::grad(s, x2);
    [
        r * v[0] + g * d[0][1] * y * r,
        -y * r1 * v[0] - y * h1 * d[0][1] * y * r + d[1][1] * y * r,
    ]
}

#[test]
fn fluid_nonlinearity_matches_manufactured_moving_domain() {
    let reference = common::transform(32, 12, 0.05);
    let grid = &reference.grid;
    let cfg = &grid.cfg;
    let nu = cfg.nu;
    let eta = BeamState {
        eta1: BeamFunction::from_fn(cfg, |s| beam_jet(s).0),
        eta2: BeamFunction::from_fn(cfg, |s| beam_jet(s).2),
    };
    let w = FluidField::from_fn(grid, piola);
    let q = PressureField::from_fn(grid, |s, y| M::p(s, y * (1.0 + beam_jet(s).0)));
    let got = evaluate_fhat(&eta, &w, &q, &reference).unwrap();

    // d_t w - b_t [(v.grad)v - nu Lap v + grad p](X_t) - nu L_0 w + G_0 q
    let physical = FluidField::from_fn(grid, |s, y| {
        let (h, h1, _, _) = beam_jet(s);
        let x2 = y * (1.0 + h);
        let v = M::v(s, x2);
        let d = M::grad(s, x2);
        let l = M::lap(s, x2);
        let gp = M::grad_p(s, x2);
        let r: [f64; 2] = std::array::from_fn(|i| v[0] * d[i][0] + v[1] * d[i][1] - nu * l[i] + gp[i]);
        let bt = [[1.0 + h, 0.0], [-y * h1, 1.0]];
        let wt = piola_rate(s, y);
        std::array::from_fn(|a| wt[a] - bt[a][0] * r[0] - bt[a][1] * r[1])
    });
    let want = physical
        .sub(&apply_l(&reference, &w).unwrap().scale(C64::new(nu, 0.0)))
        .add(&apply_g(&reference, &q).unwrap());
    let err = got.sub(&want).max_abs();
    assert!(err < 1e-9 * want.max_abs(), "{err:e} vs {:e}", want.max_abs());
}

#[test]
fn fluid_nonlinearity_reduces_to_convection_at_reference() {
    let reference = common::transform(16, 10, 0.0);
    let grid = &reference.grid;
    let kmax = grid.cfg.kmax();
    let eta = BeamState {
        eta1: BeamFunction::zeros(kmax),
        eta2: BeamFunction::zeros(kmax),
    };
    let w = FluidField::from_fn(grid, |s, y| M::v(s, y));
    let q = PressureField::from_fn(grid, M::p);
    let got = evaluate_fhat(&eta, &w, &q, &reference).unwrap();
    let want = FluidField::from_fn(grid, |s, y| {
        let v = M::v(s, y);
        let d = M::grad(s, y);
        std::array::from_fn(|i| -(v[0] * d[i][0] + v[1] * d[i][1]))
    });
    assert!(got.sub(&want).max_abs() < 1e-10);
    // no velocity, static reference: nothing left
    let zero = evaluate_fhat(&eta, &FluidField::zeros(grid), &q, &reference).unwrap();
    assert!(zero.max_abs() < 1e-12);
}

#[test]
fn fluid_nonlinearity_is_first_order_in_the_deflection_change() {
    let reference = common::transform(16, 10, 0.1);
    let grid = &reference.grid;
    let cfg = &grid.cfg;
    let eta0 = reference.eta_target.clone();
    let w = FluidField::from_fn(grid, |s, y| M::v(s, y)).scale(C64::new(1e-3, 0.0));
    let q = PressureField::from_fn(grid, M::p);
    let at = |d: f64| {
        let eta = BeamState {
            eta1: eta0.add(&BeamFunction::from_fn(cfg, |s| d * (2.0 * s).cos())),
            eta2: BeamFunction::zeros(cfg.kmax()),
        };
        evaluate_fhat(&eta, &w, &q, &reference).unwrap()
    };
    let base = at(0.0);
    let pts: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&d| (d, at(d).sub(&base).max_abs()))
        .collect();
    let slope = (pts[0].1 / pts[2].1).ln() / (pts[0].0 / pts[2].0).ln();
    assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
}

#[test]
fn beam_nonlinearity_matches_manufactured_traction() {
    let reference = common::transform(32, 12, 0.0);
    let grid = &reference.grid;
    let cfg = &grid.cfg;
    let nu = cfg.nu;
    let eta = BeamState {
        eta1: BeamFunction::from_fn(cfg, |s| beam_jet(s).0),
        eta2: BeamFunction::from_fn(cfg, |s| beam_jet(s).2),
    };
    let w = FluidField::from_fn(grid, piola);
    let got = evaluate_ghat(&eta, &w, &reference).unwrap();
    let want = project_mean_zero(&BeamFunction::from_fn(cfg, |s| {
        let (h, h1, _, _) = beam_jet(s);
        let g = 1.0 + h;
        let v = M::v(s, g);
        let d = M::grad(s, g);
        let dw2 = -h1 * v[0] - h1 * d[0][1] * g + d[1][1] * g;
        let phys = -h1 * 0.5 * (d[1][0] + d[0][1]) + d[1][1];
        2.0 * nu * (dw2 - phys)
    }));
    let err = got.sub(&want).max_abs_coeff();
    assert!(err < 1e-10 * want.max_abs_coeff().max(1.0), "{err:e}");
    assert!(got.mean().norm() == 0.0);
}

#[test]
fn beam_nonlinearity_vanishes_at_reference_or_rest() {
    let reference = common::transform(16, 10, 0.15);
    let grid = &reference.grid;
    let cfg = &grid.cfg;
    let w = FluidField::from_fn(grid, |s, y| M::v(s, y));
    let at_ref = BeamState {
        eta1: reference.eta_target.clone(),
        eta2: BeamFunction::zeros(cfg.kmax()),
    };
    assert!(evaluate_ghat(&at_ref, &w, &reference).unwrap().max_abs_coeff() < 1e-12);
    let moved = BeamState {
        eta1: BeamFunction::from_fn(cfg, |s| 0.1 * (2.0 * s).sin()),
        eta2: BeamFunction::zeros(cfg.kmax()),
    };
    let zero = evaluate_ghat(&moved, &FluidField::zeros(grid), &reference).unwrap();
    assert_eq!(zero.max_abs_coeff(), 0.0);
}

fn small_flat() -> &'static (ReferenceDomain, CoupledGenerator) {
    static CELL: OnceLock<(ReferenceDomain, CoupledGenerator)> = OnceLock::new();
    CELL.get_or_init(|| {
        let rd = common::domain(12, 12, 0.02);
        let gen = assemble_a0(&rd).unwrap();
        (rd, gen)
    })
}

fn small_data(rd: &ReferenceDomain, amp: f64) -> InitialData {
    let cfg = rd.cfg();
    InitialData::with_lifted_velocity(
        rd,
        rd.sys.eta10.clone(),
        BeamFunction::from_fn(cfg, |s| amp * (2.0 * s).cos()),
    )
    .unwrap()
}

#[test]
fn fixed_point_with_zeroed_terms_is_the_linear_solve() {
    let (rd, gen) = small_flat();
    let data = small_data(rd, 0.01);
    let mut c = cfg(0.01, 0.05, Scheme::CrankNicolson);
    c.nonlinear = NonlinearTerms::Zeroed;
    let out = solve_nonlinear(rd, gen, &data, &c).unwrap();
    assert_eq!(out.iterations, 1);
    let lin = solve_linear(rd, gen, &data, &ForcingPair::zero(), &c).unwrap();
    for (a, b) in out.trajectory.states.iter().zip(&lin.states) {
        assert!(diff_norm(&a.pack(), &b.pack()) <= 1e-12 * (1.0 + linalg::vec_norm(&b.pack())));
    }
}

#[test]
fn fixed_point_at_rest_takes_one_iteration() {
    let flat = common::domain(12, 12, 0.0);
    let gen = assemble_a0(&flat).unwrap();
    let rest = InitialData::zeros(flat.grid());
    let out = solve_nonlinear(&flat, &gen, &rest, &cfg(0.01, 0.05, Scheme::CrankNicolson)).unwrap();
    assert_eq!(out.iterations, 1);
    assert_eq!(out.forcing_norm, 0.0);
}

#[test]
fn fixed_point_converges_for_small_data() {
    let (rd, gen) = small_flat();
    let data = small_data(rd, 0.01);
    let mut c = cfg(0.01, 0.1, Scheme::CrankNicolson);
    c.fp_tol = 1e-9;
    let out = solve_nonlinear(rd, gen, &data, &c).unwrap();
    assert!(out.iterations <= 15, "{:?}", out.history);
    assert!(out.history.last().unwrap() < &1e-9);
    assert!(out.trajectory.mass.iter().all(|m| m.abs() < 1e-12));
}

#[test]
fn zero_forcing_image_shrinks_with_horizon() {
    let (rd, gen) = small_flat();
    let data = small_data(rd, 0.01);
    let c = cfg(0.01, 0.2, Scheme::CrankNicolson);
    let n: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&t| z_map_norm_at_zero(rd, gen, &data, &c, t).unwrap())
        .collect();
    assert!(n[0] > n[1] && n[1] > n[2], "{n:?}");
}

#[test]
fn forcing_with_nonzero_mean_is_rejected() {
    let (rd, gen) = curved();
    let grid = rd.grid();
    let kmax = rd.cfg().kmax();
    let bad = ForcingPair {
        times: vec![0.0, 1.0],
        fluid: vec![FluidField::zeros(grid), FluidField::zeros(grid)],
        beam: vec![
            BeamFunction::from_modes(kmax, &[(0, C64::new(1.0, 0.0))]),
            BeamFunction::zeros(kmax),
        ],
    };
    let data = InitialData::zeros(grid);
    assert!(solve_linear(rd, gen, &data, &bad, &cfg_ie()).is_err());
}

fn random_state(gen: &CoupledGenerator, seed: &[f64]) -> CoupledState {
    let v: Vec<C64> = (0..gen.dim())
        .map(|i| {
            let a = seed[i % seed.len()];
            C64::new((a * (i as f64 + 1.0)).sin(), (a * (i as f64 + 3.0)).cos())
        })
        .collect();
    CoupledState::unpack(&v, gen.nz, gen.nb)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn unforced_energy_never_increases(
        seed in proptest::collection::vec(-3.0f64..3.0, 1..5),
        cn in any::<bool>(),
    ) {
        let (rd, gen) = curved();
        let scheme = if cn { Scheme::CrankNicolson } else { Scheme::ImplicitEuler };
        let st = LinearStepper::new(rd, gen, scheme, 0.02).unwrap();
        let z0 = random_state(gen, &seed);
        let traj = run_linear(&st, &z0, &ForcingPair::zero(), 10).unwrap();
        for e in traj.energy.windows(2) {
            prop_assert!(e[1] <= e[0] * (1.0 + 1e-12));
        }
    }
}
