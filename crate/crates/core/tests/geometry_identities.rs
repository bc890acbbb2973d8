//! The transformed operators reproduce physical Laplacian, gradient and
//! boundary stress evaluated at the image points of the flat grid.

use fsi_strip::geometry::flat_ops::{apply_d_trace_samples, apply_g_grid, apply_l_grid};
use fsi_strip::geometry::{build_transform, FluidField, PressureField, StripGrid};
use fsi_strip::spectral::{BeamFunction, SpectralConfig};
use proptest::prelude::*;

fn height(s: f64) -> f64 {
    1.0 + 0.2 * s.sin()
}

fn height_slope(s: f64) -> f64 {
    0.2 * s.cos()
}

fn w_phys(x1: f64, x2: f64) -> [f64; 2] {
    [
        x1.sin() * x2.cosh() + (2.0 * x1).cos() * x2 * x2,
        x1.cos() * x2 * x2.sinh(),
    ]
}

fn lap_w_phys(x1: f64, x2: f64) -> [f64; 2] {
    [
        (2.0 * x1).cos() * (2.0 - 4.0 * x2 * x2),
        2.0 * x1.cos() * x2.cosh(),
    ]
}

fn q_phys(x1: f64, x2: f64) -> f64 {
    x1.sin() * x2 * x2 + x2
}

fn grad_q_phys(x1: f64, x2: f64) -> [f64; 2] {
    [x1.cos() * x2 * x2, 2.0 * x1.sin() * x2 + 1.0]
}

/// `b w(X)` at a flat point.
fn piola(y1: f64, y2: f64, v: [f64; 2]) -> [f64; 2] {
    let h = height(y1);
    [h * v[0], -y2 * height_slope(y1) * v[0] + v[1]]
}

fn setup(n: usize) -> (StripGrid, fsi_strip::geometry::TransformOps) {
    let grid = StripGrid::new(&SpectralConfig::new(n, n));
    let zero = BeamFunction::zeros(grid.cfg.kmax());
    let eta = BeamFunction::from_fn(&grid.cfg, |s| height(s) - 1.0);
    let tf = build_transform(&eta, &zero, &grid).unwrap();
    (grid, tf)
}

#[test]
fn transformed_laplacian_matches_physical() {
    let (grid, tf) = setup(48);
    let w = FluidField::from_fn(&grid, |y1, y2| piola(y1, y2, w_phys(y1, y2 * height(y1))));
    let lw = apply_l_grid(&tf, &w).unwrap();
    let s = grid.s_points(tf.n1());
    let ny = grid.ny();
    let mut err: f64 = 0.0;
    for (i1, &y1) in s.iter().enumerate() {
        for (j, &y2) in grid.vb.nodes.iter().enumerate() {
            let want = piola(y1, y2, lap_w_phys(y1, y2 * height(y1)));
            for c in 0..2 {
                err = err.max((lw[c][i1 * ny + j] - want[c]).abs());
            }
        }
    }
    assert!(err < 1e-8, "max error {err:e}");
}

#[test]
fn transformed_gradient_matches_physical() {
    let (grid, tf) = setup(48);
    let q = PressureField::from_fn(&grid, |y1, y2| q_phys(y1, y2 * height(y1)));
    let gq = apply_g_grid(&tf, &q).unwrap();
    let s = grid.s_points(tf.n1());
    let ny = grid.ny();
    let mut err: f64 = 0.0;
    for (i1, &y1) in s.iter().enumerate() {
        for (j, &y2) in grid.vb.nodes.iter().enumerate() {
            let want = piola(y1, y2, grad_q_phys(y1, y2 * height(y1)));
            for c in 0..2 {
                err = err.max((gq[c][i1 * ny + j] - want[c]).abs());
            }
        }
    }
    assert!(err < 1e-8, "max error {err:e}");
}

#[test]
fn boundary_stress_matches_physical() {
    let (grid, tf) = setup(32);
    let w = FluidField::from_fn(&grid, |y1, y2| piola(y1, y2, w_phys(y1, y2 * height(y1))));
    let d = apply_d_trace_samples(&tf, &w).unwrap();
    let s = grid.s_points(tf.n1());
    for (i1, &x1) in s.iter().enumerate() {
        let x2 = height(x1);
        let d1w2 = -x1.sin() * x2 * x2.sinh();
        let d2w1 = x1.sin() * x2.sinh() + 2.0 * (2.0 * x1).cos() * x2;
        let d2w2 = x1.cos() * (x2.sinh() + x2 * x2.cosh());
        let want = 0.5 * (-height_slope(x1)) * (d1w2 + d2w1) + d2w2;
        assert!((d[i1] - want).abs() < 1e-9, "s={x1}: {} vs {want}", d[i1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transformed_laplacian_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, k in 1usize..4) {
        let (grid, tf) = setup(16);
        let w1 = FluidField::from_fn(&grid, |s, y| [(k as f64 * s).sin() * y, y * y * s.cos()]);
        let w2 = FluidField::from_fn(&grid, |s, y| [(1.0 - y) * s.cos(), (2.0 * s).sin() * y.powi(3)]);
        let combo = w1.scale(a.into()).add(&w2.scale(b.into()));
        let l = apply_l_grid(&tf, &combo).unwrap();
        let l1 = apply_l_grid(&tf, &w1).unwrap();
        let l2 = apply_l_grid(&tf, &w2).unwrap();
        for c in 0..2 {
            for i in 0..l[c].len() {
                prop_assert!((l[c][i] - a * l1[c][i] - b * l2[c][i]).abs() < 1e-10);
            }
        }
    }
}
