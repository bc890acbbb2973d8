//! Sobolev Gram matrices on the flat strip.
//!
//! `||u||_{H^m}^2 = sum_{a + b <= m} ||d_s^a d_y^b u||^2` evaluated exactly
//! on the Fourier x Lagrange expansion, one block per mode and component.

use num_complex::Complex64 as C64;

use super::fields::StripGrid;
use crate::linalg::{zeros, CMat};

fn mode_block(grid: &StripGrid, m: usize, xi: f64) -> Vec<Vec<f64>> {
    let ny = grid.ny();
    let mut out = vec![vec![0.0; ny]; ny];
    for b in 0..=m {
        let y = grid.vb.moment(0, b, b);
        let w: f64 = (0..=(m - b)).map(|a| xi.powi(2 * a as i32)).sum();
        for i in 0..ny {
            for j in 0..ny {
                out[i][j] += w * y[i][j] * grid.cfg.length;
            }
        }
    }
    out
}

fn gram(grid: &StripGrid, m: usize, comps: usize) -> CMat {
    assert!(m <= 2, "vertical basis tabulates derivatives up to order 2");
    let ny = grid.ny();
    let nm = grid.n_modes();
    let mut out = zeros(nm * comps * ny, nm * comps * ny);
    for slot in 0..nm {
        let blk = mode_block(grid, m, grid.cfg.xi(grid.cfg.mode_index(slot)));
        for c in 0..comps {
            let r0 = (slot * comps + c) * ny;
            for i in 0..ny {
                for j in 0..ny {
                    out[(r0 + i, r0 + j)] = C64::new(blk[i][j], 0.0);
                }
            }
        }
    }
    out
}

/// `H^m` Gram matrix of velocity fields in the ambient layout.
pub fn velocity_sobolev_gram(grid: &StripGrid, m: usize) -> CMat {
    gram(grid, m, 2)
}

/// `H^m` Gram matrix of scalar fields in the layout `slot * ny + j`.
pub fn scalar_sobolev_gram(grid: &StripGrid, m: usize) -> CMat {
    gram(grid, m, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FluidField;
    use crate::linalg::{dot, matvec};
    use crate::spectral::SpectralConfig;
    use std::f64::consts::PI;

    #[test]
    fn h2_norm_of_polynomial_mode() {
        // u = (cos(2s) y^2, 0): |u|^2 = pi/5, |u_s|^2 = 4 pi/5, |u_y|^2 = 4 pi/3,
        // |u_ss|^2 = 16 pi/5, |u_sy|^2 = 16 pi/3, |u_yy|^2 = 4 pi
        let grid = StripGrid::new(&SpectralConfig::new(16, 10));
        let u = FluidField::from_fn(&grid, |s, y| [(2.0 * s).cos() * y * y, 0.0]).to_vector(&grid);
        let norm = |m| dot(&u, &matvec(&velocity_sobolev_gram(&grid, m), &u)).re;
        let l2 = PI / 5.0;
        let h1 = l2 + 4.0 * PI / 5.0 + 4.0 * PI / 3.0;
        let h2 = h1 + 16.0 * PI / 5.0 + 16.0 * PI / 3.0 + 4.0 * PI;
        assert!((norm(0) - l2).abs() < 1e-12);
        assert!((norm(1) - h1).abs() < 1e-11);
        assert!((norm(2) - h2).abs() < 1e-10);
    }
}
