//! Stokes solver against independent oracles: the closed-form flat-strip
//! solution per Fourier mode, a manufactured solution on a curved domain,
//! resolvent decay and Leray projection properties.

mod common;

use common::{flat_streamfunction, psi_derivs};
use fsi_strip::geometry::flat_ops::{apply_g, apply_l};
use fsi_strip::geometry::{FluidField, PressureField};
use fsi_strip::linalg::{self, Lu};
use fsi_strip::spectral::BeamFunction;
use fsi_strip::stokes::{leray_matrix, leray_project, solve_forced, solve_lifted};
use fsi_strip::C64;

#[test]
fn flat_lifted_solution_matches_closed_form() {
    let sys = common::stokes(16, 24, 0.0);
    let cfg = sys.grid.cfg.clone();
    let ny = cfg.ny;
    for &lambda in &[
        C64::new(1.0, 1.0),
        C64::new(10.0, 10.0),
        C64::new(0.0, 30.0),
    ] {
        let eta = BeamFunction::from_fn(&cfg, |s| (2.0 * s).cos());
        let sol = solve_lifted(lambda, &eta, &sys).unwrap();
        for k in [-2isize, 2] {
            let xi = cfg.xi(k);
            let (c, m) = flat_streamfunction(xi, lambda, cfg.nu);
            let slot = cfg.mode_slot(k);
            let amp = 0.5;
            for (j, &y) in sys.grid.vb.nodes.iter().enumerate() {
                let d = psi_derivs(&c, xi, m, y);
                let w1 = d[1] * amp;
                let w2 = -C64::new(0.0, xi) * d[0] * amp;
                let e1 = (sol.w.comps[0][slot * ny + j] - w1).norm();
                let e2 = (sol.w.comps[1][slot * ny + j] - w2).norm();
                assert!(
                    e1 < 1e-10 && e2 < 1e-10,
                    "lambda={lambda} k={k} y={y}: {e1:e} {e2:e}"
                );
                let q =
                    -(lambda * d[1] - cfg.nu * (d[3] - xi * xi * d[1])) / C64::new(0.0, xi) * amp;
                let eq = (sol.q.values[slot * ny + j] - q).norm();
                assert!(eq < 1e-8 * (1.0 + lambda.norm()), "pressure {eq:e}");
            }
            // top traction: 2 nu d_y w2 - q at y = 1
            let d = psi_derivs(&c, xi, m, 1.0);
            let q1 = -(lambda * d[1] - cfg.nu * (d[3] - xi * xi * d[1])) / C64::new(0.0, xi);
            let t = (2.0 * cfg.nu * (-C64::new(0.0, xi) * d[1]) - q1) * amp;
            let et = (sol.traction_top.coeff(k) - t).norm();
            assert!(et < 1e-8 * (1.0 + t.norm()), "traction {et:e} vs {t}");
        }
        // untouched modes stay zero
        let slot = cfg.mode_slot(1);
        assert!(sol.w.comps[1][slot * ny..(slot + 1) * ny]
            .iter()
            .all(|v| v.norm() < 1e-12));
        assert!(sol.div_residual < 1e-10);
    }
}

fn manufactured(grid: &fsi_strip::geometry::StripGrid) -> (FluidField, PressureField) {
    let g = |s: f64| s.sin() + 0.5 * (2.0 * s).cos();
    let dg = |s: f64| s.cos() - (2.0 * s).sin();
    let v = FluidField::from_fn(grid, |s, y| {
        let b = y * y * (1.0 - y) * (1.0 - y);
        let db = 2.0 * y * (1.0 - y) * (1.0 - 2.0 * y);
        [db * g(s), -b * dg(s)]
    });
    let p = PressureField::from_fn(grid, |s, y| s.cos() * y + 0.3 * (2.0 * s).sin() * y * y);
    (v, p)
}

#[test]
fn manufactured_solution_on_curved_domain() {
    let tf = common::transform(32, 32, 0.2);
    let sys = fsi_strip::stokes::StokesSystem::new(&tf).unwrap();
    let (v, p) = manufactured(&sys.grid);
    let nu = sys.grid.cfg.nu;
    for &lambda in &[C64::new(1.0, 0.0), C64::new(2.0, 5.0)] {
        let lv = apply_l(&tf, &v).unwrap();
        let gp = apply_g(&tf, &p).unwrap();
        let f = v.scale(lambda).sub(&lv.scale(C64::new(nu, 0.0))).add(&gp);
        let sol = solve_forced(lambda, &f, &sys).unwrap();
        let err = sol.w.sub(&v).max_abs();
        assert!(err < 1e-8, "lambda={lambda}: velocity error {err:e}");
        let shift = sys.pressure_mean(&p);
        let ny = sys.grid.ny();
        let k0 = sys.grid.cfg.mode_slot(0);
        let mut pe = 0.0f64;
        for (i, (a, b)) in sol.q.values.iter().zip(&p.values).enumerate() {
            let c = if i / ny == k0 { shift } else { 0.0 };
            pe = pe.max((a - (b - c)).norm());
        }
        assert!(pe < 1e-7, "pressure error {pe:e}");
    }
}

#[test]
fn forced_resolvent_decays_like_inverse_lambda() {
    let sys = common::stokes(16, 16, 0.2);
    let l = linalg::cholesky(&sys.mzz).unwrap();
    let mut pts = vec![];
    for j in 1..=4 {
        let lambda = C64::new(0.0, 10f64.powi(j));
        let s = linalg::axpby(lambda, &sys.mzz, linalg::ONE, &sys.azz);
        let inv = Lu::new(&s).unwrap().inverse();
        // M-weighted operator norm of the forced solution map g = Z^H M f -> c
        let weighted = l.adjoint() * &inv * &l;
        pts.push((
            (lambda.norm()).ln(),
            linalg::op_norm(&weighted).unwrap().ln(),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 1.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn leray_projection_properties() {
    let tf = common::transform(16, 16, 0.2);
    let sys = fsi_strip::stokes::StokesSystem::new(&tf).unwrap();
    let (v, _) = manufactured(&sys.grid);
    let pv = leray_project(&v, &sys).unwrap();
    assert!(pv.sub(&v).max_abs() < 1e-10);

    let phi = PressureField::from_fn(&sys.grid, |s, y| {
        (s.cos() + (2.0 * s).sin()) * y * y * (3.0 - 2.0 * y)
    });
    let grad = apply_g(&tf, &phi).unwrap();
    let pg = leray_project(&grad, &sys).unwrap();
    assert!(pg.max_abs() < 1e-8 * grad.max_abs(), "{:e}", pg.max_abs());

    let p = leray_matrix(&sys).unwrap();
    let p2 = &p * &p;
    assert!(linalg::frobenius(&(&p2 - &p)) < 1e-10 * linalg::frobenius(&p));
}
