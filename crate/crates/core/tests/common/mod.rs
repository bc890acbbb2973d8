#![allow(dead_code)]

use fsi_strip::geometry::{build_transform, StripGrid, TransformOps};
use fsi_strip::linalg::{CMat, Lu};
use fsi_strip::spectral::{BeamFunction, SpectralConfig};
use fsi_strip::stokes::ReferenceDomain;
use fsi_strip::stokes::StokesSystem;
use fsi_strip::C64;

/// Flat-strip transform onto the domain under `1 + amp sin(s)`.
pub fn transform(ns: usize, ny: usize, amp: f64) -> TransformOps {
    let grid = StripGrid::new(&SpectralConfig::new(ns, ny));
    let zero = BeamFunction::zeros(grid.cfg.kmax());
    let eta = BeamFunction::from_fn(&grid.cfg, |s| amp * s.sin());
    build_transform(&eta, &zero, &grid).unwrap()
}

pub fn stokes(ns: usize, ny: usize, amp: f64) -> StokesSystem {
    StokesSystem::new(&transform(ns, ny, amp)).unwrap()
}

/// Reference domain under `1 + amp sin(s)`.
pub fn domain(ns: usize, ny: usize, amp: f64) -> ReferenceDomain {
    let cfg = SpectralConfig::new(ns, ny);
    let eta = BeamFunction::from_fn(&cfg, |s| amp * s.sin());
    ReferenceDomain::new(&cfg, &eta).unwrap()
}

/// Coefficients of `psi = a1 cosh(xi y) + a2 sinh(xi y) + a3 cosh(m y) + a4 sinh(m y)`
/// for the flat lifted problem with top data `exp(i xi s) e2`.
pub fn flat_streamfunction(xi: f64, lambda: C64, nu: f64) -> ([C64; 4], C64) {
    let xi_c = C64::new(xi, 0.0);
    let m = (xi_c * xi_c + lambda / nu).sqrt();
    let rows = [
        [
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
        [C64::new(0.0, 0.0), xi_c, C64::new(0.0, 0.0), m],
        [
            xi_c * xi_c.sinh(),
            xi_c * xi_c.cosh(),
            m * m.sinh(),
            m * m.cosh(),
        ],
        [xi_c.cosh(), xi_c.sinh(), m.cosh(), m.sinh()],
    ];
    let a = CMat::from_fn(4, 4, |i, j| rows[i][j]);
    let rhs = [
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 1.0 / xi),
    ];
    let x = Lu::new(&a).unwrap().solve_vec(&rhs);
    ([x[0], x[1], x[2], x[3]], m)
}

pub fn psi_derivs(c: &[C64; 4], xi: f64, m: C64, y: f64) -> [C64; 4] {
    let xy = C64::new(xi * y, 0.0);
    let my = m * y;
    let xi_c = C64::new(xi, 0.0);
    let (ch, sh, cm, sm) = (xy.cosh(), xy.sinh(), my.cosh(), my.sinh());
    [
        c[0] * ch + c[1] * sh + c[2] * cm + c[3] * sm,
        xi_c * (c[0] * sh + c[1] * ch) + m * (c[2] * sm + c[3] * cm),
        xi_c.powi(2) * (c[0] * ch + c[1] * sh) + m * m * (c[2] * cm + c[3] * sm),
        xi_c.powi(3) * (c[0] * sh + c[1] * ch) + m.powi(3) * (c[2] * sm + c[3] * cm),
    ]
}
