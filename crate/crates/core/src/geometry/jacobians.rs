//! Pointwise Jacobian fields of the vertical stretching
//! `X(y1, y2) = (y1, y2 (1 + zeta(y1)))` and of its inverse `Y`.
//!
//! Every field is evaluated at the image point `X(y)` and expressed through
//! `zeta` and its derivatives at `y1`. With `a = Cof(grad Y)^T` and
//! `b = Cof(grad X)^T` one has `b = a(X)^{-1}`.

use serde::{Deserialize, Serialize};

pub type M2 = [[f64; 2]; 2];

/// `zeta`, its first three `s`-derivatives, and its time derivative with one
/// `s`-derivative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZetaJet {
    pub z: f64,
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub zt: f64,
    pub zt1: f64,
}

/// All first and second order Jacobian quantities at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointJacobians {
    /// `grad X`.
    pub grad_x: M2,
    /// `det grad X = 1 + zeta`.
    pub det: f64,
    /// `b = Cof(grad X)^T`.
    pub b: M2,
    /// `a(X)`.
    pub a: M2,
    /// `grad Y(X)`; entry `[l][i] = dY_l/dx_i`.
    pub grad_y: M2,
    /// `da/dx_j (X)` for `j = 1, 2`.
    pub da: [M2; 2],
    /// `d^2 a/dx_j^2 (X)` for `j = 1, 2`.
    pub d2a: [M2; 2],
    /// `d^2 a/dx_1 dx_2 (X)`.
    pub d2a_mixed: M2,
    /// `d2y[l][i][j] = d^2 Y_l / dx_i dx_j (X)`.
    pub d2y: [M2; 2],
    /// `(d_t a)(X)`.
    pub dt_a: M2,
    /// `(d_t Y)(X)`.
    pub dt_y: [f64; 2],
}

/// Evaluate the Jacobian fields at `(y1, y2)` where `jet` holds `zeta(y1)`.
pub fn point_jacobians(y2: f64, jet: &ZetaJet) -> PointJacobians {
    let g = 1.0 + jet.z;
    let (z1, z2, z3) = (jet.z1, jet.z2, jet.z3);
    let g2 = g * g;
    let g3 = g2 * g;

    let grad_x = [[1.0, 0.0], [y2 * z1, g]];
    let b = [[g, 0.0], [-y2 * z1, 1.0]];
    let a = [[1.0 / g, 0.0], [y2 * z1 / g, 1.0]];
    let grad_y = [[1.0, 0.0], [-y2 * z1 / g, 1.0 / g]];

    let da1 = [[-z1 / g2, 0.0], [y2 * (z2 * g - 2.0 * z1 * z1) / g2, 0.0]];
    let da2 = [[0.0, 0.0], [z1 / g2, 0.0]];

    // Re-derived from a(x) = [[G, 0], [-x2 G', 1]], G = 1/(1 + zeta).
    let d2a11 = [
        [(-z2 * g + 2.0 * z1 * z1) / g3, 0.0],
        [
            y2 * (z3 * g2 - 6.0 * g * z1 * z2 + 6.0 * z1 * z1 * z1) / g3,
            0.0,
        ],
    ];
    let d2a22 = [[0.0, 0.0], [0.0, 0.0]];
    let d2a12 = [[0.0, 0.0], [(z2 * g - 2.0 * z1 * z1) / g3, 0.0]];

    let y2_11 = y2 * (-z2 * g + 2.0 * z1 * z1) / g2;
    let y2_12 = -z1 / g2;
    let d2y = [[[0.0, 0.0], [0.0, 0.0]], [[y2_11, y2_12], [y2_12, 0.0]]];

    let dt_a = [
        [-jet.zt / g2, 0.0],
        [y2 * (jet.zt1 * g - 2.0 * z1 * jet.zt) / g2, 0.0],
    ];
    let dt_y = [0.0, -y2 * jet.zt / g];

    PointJacobians {
        grad_x,
        det: g,
        b,
        a,
        grad_y,
        da: [da1, da2],
        d2a: [d2a11, d2a22],
        d2a_mixed: d2a12,
        d2y,
        dt_a,
        dt_y,
    }
}

pub fn matmul2(x: &M2, y: &M2) -> M2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

pub fn det2(x: &M2) -> f64 {
    x[0][0] * x[1][1] - x[0][1] * x[1][0]
}

/// Cofactor transpose (adjugate) of a 2x2 matrix.
pub fn adjugate(x: &M2) -> M2 {
    [[x[1][1], -x[0][1]], [-x[1][0], x[0][0]]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &M2, b: &M2, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).abs() <= tol))
    }

    #[test]
    fn identity_at_zero_deflection() {
        let p = point_jacobians(0.7, &ZetaJet::default());
        let id = [[1.0, 0.0], [0.0, 1.0]];
        assert!(close(&p.b, &id, 0.0));
        assert!(close(&p.grad_y, &id, 0.0));
        assert_eq!(p.det, 1.0);
        assert!(close(&p.da[0], &[[0.0; 2]; 2], 0.0));
    }

    #[test]
    fn constant_deflection() {
        let jet = ZetaJet {
            z: 0.25,
            ..Default::default()
        };
        let p = point_jacobians(0.3, &jet);
        assert!(close(&p.grad_y, &[[1.0, 0.0], [0.0, 0.8]], 1e-15));
        assert_eq!(p.dt_y, [0.0, 0.0]);
        assert!((p.det - 1.25).abs() < 1e-15);
    }

    #[test]
    fn inverse_and_cofactor_relations() {
        let jet = ZetaJet {
            z: 0.2,
            z1: -0.4,
            z2: 0.3,
            z3: 1.1,
            zt: 0.5,
            zt1: -0.2,
        };
        let p = point_jacobians(0.45, &jet);
        let id = [[1.0, 0.0], [0.0, 1.0]];
        assert!(close(&matmul2(&p.grad_y, &p.grad_x), &id, 1e-14));
        assert!(close(&matmul2(&p.a, &p.b), &id, 1e-14));
        assert!(close(&p.b, &adjugate(&p.grad_x), 1e-15));
        assert!((det2(&p.grad_x) - p.det).abs() < 1e-15);
    }

    /// Finite differences of `a(x)`, `Y(x)` in physical coordinates.
    #[test]
    fn derivatives_match_finite_differences() {
        let zeta = |s: f64| 0.3 * (1.3 * s).sin() + 0.1 * (0.7 * s).cos();
        let dz = |s: f64, n: u32| -> f64 {
            match n {
                0 => zeta(s),
                1 => 0.39 * (1.3 * s).cos() - 0.07 * (0.7 * s).sin(),
                2 => -0.507 * (1.3 * s).sin() - 0.049 * (0.7 * s).cos(),
                _ => -0.6591 * (1.3 * s).cos() + 0.0343 * (0.7 * s).sin(),
            }
        };
        let jet_at = |s: f64| ZetaJet {
            z: dz(s, 0),
            z1: dz(s, 1),
            z2: dz(s, 2),
            z3: dz(s, 3),
            ..Default::default()
        };
        // a(x) and Y(x) as functions of the physical point
        let a_phys = |x1: f64, x2: f64| -> M2 {
            let g = 1.0 + zeta(x1);
            let gp = dz(x1, 1);
            [[1.0 / g, 0.0], [x2 * gp / (g * g), 1.0]]
        };
        let y_phys = |x1: f64, x2: f64| -> [f64; 2] { [x1, x2 / (1.0 + zeta(x1))] };
        let (y1, y2) = (0.8, 0.6);
        let jet = jet_at(y1);
        let p = point_jacobians(y2, &jet);
        let x1 = y1;
        let x2 = y2 * (1.0 + jet.z);
        let h = 1e-4;
        for i in 0..2 {
            for k in 0..2 {
                let d1 = (a_phys(x1 + h, x2)[i][k] - a_phys(x1 - h, x2)[i][k]) / (2.0 * h);
                let d2 = (a_phys(x1, x2 + h)[i][k] - a_phys(x1, x2 - h)[i][k]) / (2.0 * h);
                assert!((d1 - p.da[0][i][k]).abs() < 1e-6, "da1 {i}{k}");
                assert!((d2 - p.da[1][i][k]).abs() < 1e-6, "da2 {i}{k}");
                let dd1 = (a_phys(x1 + h, x2)[i][k] - 2.0 * a_phys(x1, x2)[i][k]
                    + a_phys(x1 - h, x2)[i][k])
                    / (h * h);
                assert!((dd1 - p.d2a[0][i][k]).abs() < 1e-5, "d2a11 {i}{k}");
                let dm = (a_phys(x1 + h, x2 + h)[i][k]
                    - a_phys(x1 + h, x2 - h)[i][k]
                    - a_phys(x1 - h, x2 + h)[i][k]
                    + a_phys(x1 - h, x2 - h)[i][k])
                    / (4.0 * h * h);
                assert!((dm - p.d2a_mixed[i][k]).abs() < 1e-5, "d2a12 {i}{k}");
            }
        }
        for l in 0..2 {
            let g1 = (y_phys(x1 + h, x2)[l] - y_phys(x1 - h, x2)[l]) / (2.0 * h);
            let g2 = (y_phys(x1, x2 + h)[l] - y_phys(x1, x2 - h)[l]) / (2.0 * h);
            assert!((g1 - p.grad_y[l][0]).abs() < 1e-7);
            assert!((g2 - p.grad_y[l][1]).abs() < 1e-7);
            let yy =
                (y_phys(x1 + h, x2)[l] - 2.0 * y_phys(x1, x2)[l] + y_phys(x1 - h, x2)[l]) / (h * h);
            assert!((yy - p.d2y[l][0][0]).abs() < 1e-5);
        }
    }
}
