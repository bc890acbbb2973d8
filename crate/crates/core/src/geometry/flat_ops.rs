//! Transformed Laplacian, gradient and boundary stress operators on the flat
//! strip.
//!
//! For a transform from the flat strip onto a curved domain, with
//! `w~ = b w(X)` and `q~ = q(X)`:
//! `apply_l(w~) = b (Lap w)(X)`, `apply_g(q~) = b (grad q)(X)`, and
//! `apply_d_trace(w~)` is `[D(w)(-eta', 1)] . e2` on the curved top wall.

use num_complex::Complex64 as C64;

use super::fields::{FluidField, PressureField, StripGrid};
use super::transform::TransformOps;
use crate::error::{FsiError, Result};
use crate::spectral::{fourier, BeamFunction};

/// Grid values of a field and its first and second derivatives.
pub(crate) struct Derivs {
    /// `v[c][i1 * ny + j]`.
    pub v: [Vec<f64>; 2],
    /// `d[c][l]`: derivative in `y_l`.
    pub d: [[Vec<f64>; 2]; 2],
    /// `dd[c][l][m]`.
    pub dd: [[[Vec<f64>; 2]; 2]; 2],
}

pub(crate) fn scalar_derivs(
    grid: &StripGrid,
    c: &[C64],
    n1: usize,
) -> (Vec<f64>, [Vec<f64>; 2], [[Vec<f64>; 2]; 2]) {
    let c1 = grid.d1(c);
    let c2 = grid.d2(c);
    let c11 = grid.d1(&c1);
    let c12 = grid.d2(&c1);
    let c22 = grid.d2(&c2);
    let g12 = grid.to_grid(&c12, n1);
    (
        grid.to_grid(c, n1),
        [grid.to_grid(&c1, n1), grid.to_grid(&c2, n1)],
        [
            [grid.to_grid(&c11, n1), g12.clone()],
            [g12, grid.to_grid(&c22, n1)],
        ],
    )
}

pub(crate) fn field_derivs(grid: &StripGrid, w: &FluidField, n1: usize) -> Derivs {
    let (v0, d0, dd0) = scalar_derivs(grid, &w.comps[0], n1);
    let (v1, d1, dd1) = scalar_derivs(grid, &w.comps[1], n1);
    Derivs {
        v: [v0, v1],
        d: [d0, d1],
        dd: [dd0, dd1],
    }
}

fn require_flat(tf: &TransformOps) -> Result<()> {
    if tf.is_flat_source() {
        Ok(())
    } else {
        Err(FsiError::Rejected(
            "flat-strip operators need a transform with eta_ref = 0".into(),
        ))
    }
}

/// Grid values of the transformed Laplacian, `out[c][i1 * ny + j]`.
pub fn apply_l_grid(tf: &TransformOps, w: &FluidField) -> Result<[Vec<f64>; 2]> {
    require_flat(tf)?;
    let grid = &tf.grid;
    let n1 = tf.n1();
    let ny = grid.ny();
    let dv = field_derivs(grid, w, n1);
    let mut out = [vec![0.0; n1 * ny], vec![0.0; n1 * ny]];
    for i1 in 0..n1 {
        for j in 0..ny {
            let p = tf.at(i1, j);
            let idx = i1 * ny + j;
            let gy = &p.grad_y;
            for (alpha, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for i in 0..2 {
                    for jj in 0..2 {
                        for k in 0..2 {
                            acc += p.b[alpha][i] * p.d2a[jj][i][k] * dv.v[k][idx];
                            for l in 0..2 {
                                acc += 2.0
                                    * p.b[alpha][i]
                                    * p.da[jj][i][k]
                                    * dv.d[k][l][idx]
                                    * gy[l][jj];
                            }
                        }
                    }
                }
                for jj in 0..2 {
                    for l in 0..2 {
                        for m in 0..2 {
                            acc += dv.dd[alpha][l][m][idx] * gy[l][jj] * gy[m][jj];
                        }
                        acc += dv.d[alpha][l][idx] * p.d2y[l][jj][jj];
                    }
                }
                o[idx] = acc;
            }
        }
    }
    Ok(out)
}

/// Transformed Laplacian `b (Lap w)(X)` of a flat-strip field.
pub fn apply_l(tf: &TransformOps, w: &FluidField) -> Result<FluidField> {
    let g = apply_l_grid(tf, w)?;
    let n1 = tf.n1();
    Ok(FluidField {
        comps: [tf.grid.from_grid(&g[0], n1), tf.grid.from_grid(&g[1], n1)],
    })
}

/// Grid values of the transformed gradient.
pub fn apply_g_grid(tf: &TransformOps, q: &PressureField) -> Result<[Vec<f64>; 2]> {
    require_flat(tf)?;
    let grid = &tf.grid;
    let n1 = tf.n1();
    let ny = grid.ny();
    let dq = [
        grid.to_grid(&grid.d1(&q.values), n1),
        grid.to_grid(&grid.d2(&q.values), n1),
    ];
    let mut out = [vec![0.0; n1 * ny], vec![0.0; n1 * ny]];
    for i1 in 0..n1 {
        for j in 0..ny {
            let p = tf.at(i1, j);
            let idx = i1 * ny + j;
            for (alpha, o) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (k, dqk) in dq.iter().enumerate() {
                    for i in 0..2 {
                        acc += dqk[idx] * p.grad_y[alpha][i] * p.grad_y[k][i];
                    }
                }
                o[idx] = p.det * acc;
            }
        }
    }
    Ok(out)
}

/// Transformed gradient `b (grad q)(X)`.
pub fn apply_g(tf: &TransformOps, q: &PressureField) -> Result<FluidField> {
    let g = apply_g_grid(tf, q)?;
    let n1 = tf.n1();
    Ok(FluidField {
        comps: [tf.grid.from_grid(&g[0], n1), tf.grid.from_grid(&g[1], n1)],
    })
}

/// Values of the boundary stress expression at `y = 1` on the `n1` grid.
pub fn apply_d_trace_samples(tf: &TransformOps, phi: &FluidField) -> Result<Vec<f64>> {
    require_flat(tf)?;
    let grid = &tf.grid;
    let n1 = tf.n1();
    let ny = grid.ny();
    let j = ny - 1;
    let vals: [Vec<f64>; 2] = [
        grid.to_grid(&phi.comps[0], n1),
        grid.to_grid(&phi.comps[1], n1),
    ];
    let ders: [[Vec<f64>; 2]; 2] = [
        [
            grid.to_grid(&grid.d1(&phi.comps[0]), n1),
            grid.to_grid(&grid.d2(&phi.comps[0]), n1),
        ],
        [
            grid.to_grid(&grid.d1(&phi.comps[1]), n1),
            grid.to_grid(&grid.d2(&phi.comps[1]), n1),
        ],
    ];
    let mut out = vec![0.0; n1];
    for (i1, o) in out.iter_mut().enumerate() {
        let p = tf.at(i1, j);
        let idx = i1 * ny + j;
        let slope = tf.jets()[i1].z1;
        // physical derivative d phi_i / d x_jj
        let dphys = |i: usize, jj: usize| -> f64 {
            let mut acc = 0.0;
            for k in 0..2 {
                acc += p.da[jj][i][k] * vals[k][idx];
                for l in 0..2 {
                    acc += p.a[i][k] * ders[k][l][idx] * p.grad_y[l][jj];
                }
            }
            acc
        };
        *o = 0.5 * (-slope) * (dphys(1, 0) + dphys(0, 1)) + dphys(1, 1);
    }
    Ok(out)
}

/// Boundary stress expression `[D(phi)(-eta', 1)] . e2` at the top wall.
pub fn apply_d_trace(tf: &TransformOps, phi: &FluidField) -> Result<BeamFunction> {
    let v = apply_d_trace_samples(tf, phi)?;
    Ok(BeamFunction {
        coeffs: fourier::coeffs_from_real(&v, tf.grid.cfg.kmax()),
    })
}
