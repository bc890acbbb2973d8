//! Fields on the flat strip `[0, L) x [0, 1]`.
//!
//! Both velocity components and the pressure are stored as mixed
//! coefficients: Fourier in `s` (slot `k + kmax`), nodal values at the
//! Chebyshev–Gauss–Lobatto nodes in `y`. Entry `slot * ny + j`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::spectral::{fourier, BeamFunction, SpectralConfig, VerticalBasis};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Discretization context shared by fields and operators.
#[derive(Clone, Debug)]
pub struct StripGrid {
    pub cfg: SpectralConfig,
    pub vb: VerticalBasis,
}

impl StripGrid {
    pub fn new(cfg: &SpectralConfig) -> Self {
        StripGrid {
            cfg: cfg.clone(),
            vb: VerticalBasis::new(cfg.ny),
        }
    }

    pub fn ny(&self) -> usize {
        self.cfg.ny
    }

    pub fn n_modes(&self) -> usize {
        self.cfg.n_modes()
    }

    /// Length of one scalar mixed-coefficient array.
    pub fn scalar_len(&self) -> usize {
        self.n_modes() * self.ny()
    }

    /// Number of `s` sample points used for pointwise products.
    pub fn product_points(&self) -> usize {
        if self.cfg.dealias {
            // 3/2 rule, kept even
            (3 * self.cfg.ns / 2 + 1) & !1
        } else {
            self.cfg.ns
        }
    }

    /// Values on the `n1 x ny` grid (`i1 * ny + j`), real part.
    pub fn to_grid(&self, coeffs: &[C64], n1: usize) -> Vec<f64> {
        let ny = self.ny();
        let nm = self.n_modes();
        let mut out = vec![0.0; n1 * ny];
        let mut col = vec![ZERO; nm];
        for j in 0..ny {
            for slot in 0..nm {
                col[slot] = coeffs[slot * ny + j];
            }
            let vals = fourier::samples_from_coeffs(&col, n1);
            for (i1, v) in vals.iter().enumerate() {
                out[i1 * ny + j] = v.re;
            }
        }
        out
    }

    /// Inverse of [`StripGrid::to_grid`] (truncating to the stored modes).
    pub fn from_grid(&self, values: &[f64], n1: usize) -> Vec<C64> {
        let ny = self.ny();
        let kmax = self.cfg.kmax();
        let mut out = vec![ZERO; self.scalar_len()];
        let mut col = vec![0.0; n1];
        for j in 0..ny {
            for i1 in 0..n1 {
                col[i1] = values[i1 * ny + j];
            }
            let c = fourier::coeffs_from_real(&col, kmax);
            for (slot, v) in c.iter().enumerate() {
                out[slot * ny + j] = *v;
            }
        }
        out
    }

    /// `d/ds` of a scalar array.
    pub fn d1(&self, coeffs: &[C64]) -> Vec<C64> {
        let ny = self.ny();
        let mut out = coeffs.to_vec();
        for slot in 0..self.n_modes() {
            let ik = C64::new(0.0, self.cfg.xi(self.cfg.mode_index(slot)));
            for v in &mut out[slot * ny..(slot + 1) * ny] {
                *v *= ik;
            }
        }
        out
    }

    /// `d/dy` of a scalar array.
    pub fn d2(&self, coeffs: &[C64]) -> Vec<C64> {
        self.apply_vertical(&self.vb.d1, coeffs)
    }

    fn apply_vertical(&self, mat: &[Vec<f64>], coeffs: &[C64]) -> Vec<C64> {
        let ny = self.ny();
        let mut out = vec![ZERO; coeffs.len()];
        for slot in 0..self.n_modes() {
            let src = &coeffs[slot * ny..(slot + 1) * ny];
            for (i, row) in mat.iter().enumerate() {
                out[slot * ny + i] = row.iter().zip(src).map(|(a, b)| b * *a).sum();
            }
        }
        out
    }

    /// Values at `y = 1` (`top = true`) or `y = 0` as a beam function.
    pub fn trace(&self, coeffs: &[C64], top: bool) -> BeamFunction {
        let ny = self.ny();
        let j = if top { ny - 1 } else { 0 };
        BeamFunction {
            coeffs: (0..self.n_modes())
                .map(|slot| coeffs[slot * ny + j])
                .collect(),
        }
    }

    /// Evaluate at an arbitrary point of the strip.
    pub fn eval(&self, coeffs: &[C64], s: f64, y: f64) -> C64 {
        let ny = self.ny();
        let row =
            &crate::spectral::chebyshev::interp_matrix(&self.vb.nodes, &self.vb.bary, &[y])[0];
        let kmax = self.cfg.kmax() as f64;
        (0..self.n_modes())
            .map(|slot| {
                let col: C64 = row
                    .iter()
                    .zip(&coeffs[slot * ny..(slot + 1) * ny])
                    .map(|(a, b)| b * *a)
                    .sum();
                let k = slot as f64 - kmax;
                col * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k * s / self.cfg.length)
            })
            .sum()
    }

    /// Sample points in `s` for an `n1`-point grid.
    pub fn s_points(&self, n1: usize) -> Vec<f64> {
        fourier::grid_points(n1, self.cfg.length)
    }

    /// Sample a scalar function of `(s, y)` into mixed coefficients.
    pub fn sample_scalar(&self, f: impl Fn(f64, f64) -> f64) -> Vec<C64> {
        let n1 = self.cfg.ns;
        let s = self.s_points(n1);
        let ny = self.ny();
        let mut vals = vec![0.0; n1 * ny];
        for i1 in 0..n1 {
            for j in 0..ny {
                vals[i1 * ny + j] = f(s[i1], self.vb.nodes[j]);
            }
        }
        self.from_grid(&vals, n1)
    }
}

/// Velocity field on the flat strip, components in the flat frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluidField {
    pub comps: [Vec<C64>; 2],
}

impl FluidField {
    pub fn zeros(grid: &StripGrid) -> Self {
        let n = grid.scalar_len();
        FluidField {
            comps: [vec![ZERO; n], vec![ZERO; n]],
        }
    }

    /// Sample a vector function of `(s, y)`.
    pub fn from_fn(grid: &StripGrid, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        FluidField {
            comps: [
                grid.sample_scalar(|s, y| f(s, y)[0]),
                grid.sample_scalar(|s, y| f(s, y)[1]),
            ],
        }
    }

    /// Packed ambient vector, layout `(slot * 2 + comp) * ny + j`.
    pub fn to_vector(&self, grid: &StripGrid) -> Vec<C64> {
        let ny = grid.ny();
        let mut v = vec![ZERO; 2 * grid.scalar_len()];
        for slot in 0..grid.n_modes() {
            for c in 0..2 {
                let dst = (slot * 2 + c) * ny;
                v[dst..dst + ny].copy_from_slice(&self.comps[c][slot * ny..(slot + 1) * ny]);
            }
        }
        v
    }

    pub fn from_vector(grid: &StripGrid, v: &[C64]) -> Self {
        let ny = grid.ny();
        let mut f = Self::zeros(grid);
        for slot in 0..grid.n_modes() {
            for c in 0..2 {
                let src = (slot * 2 + c) * ny;
                f.comps[c][slot * ny..(slot + 1) * ny].copy_from_slice(&v[src..src + ny]);
            }
        }
        f
    }

    pub fn scale(&self, a: C64) -> Self {
        FluidField {
            comps: [
                self.comps[0].iter().map(|x| x * a).collect(),
                self.comps[1].iter().map(|x| x * a).collect(),
            ],
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let add = |a: &Vec<C64>, b: &Vec<C64>| a.iter().zip(b).map(|(x, y)| x + y).collect();
        FluidField {
            comps: [
                add(&self.comps[0], &other.comps[0]),
                add(&self.comps[1], &other.comps[1]),
            ],
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter().map(|x| x.norm()))
            .fold(0.0, f64::max)
    }

    /// Real and imaginary parts as real-valued fields.
    pub fn real_imag(&self, grid: &StripGrid) -> (Self, Self) {
        let (r0, i0) = split_real_imag(grid, &self.comps[0]);
        let (r1, i1) = split_real_imag(grid, &self.comps[1]);
        (
            FluidField { comps: [r0, r1] },
            FluidField { comps: [i0, i1] },
        )
    }

    /// Re-impose conjugate symmetry of every column.
    pub fn symmetrized(mut self, grid: &StripGrid) -> Self {
        for c in &mut self.comps {
            symmetrize_columns(grid, c);
        }
        self
    }
}

/// Scalar pressure on the flat strip.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureField {
    pub values: Vec<C64>,
}

impl PressureField {
    pub fn zeros(grid: &StripGrid) -> Self {
        PressureField {
            values: vec![ZERO; grid.scalar_len()],
        }
    }

    pub fn from_fn(grid: &StripGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        PressureField {
            values: grid.sample_scalar(f),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Real and imaginary parts as real-valued fields.
    pub fn real_imag(&self, grid: &StripGrid) -> (Self, Self) {
        let (r, i) = split_real_imag(grid, &self.values);
        (PressureField { values: r }, PressureField { values: i })
    }
}

/// Mixed coefficients of the real and imaginary parts of the function
/// represented by `c`: `c = re + i im` with both parts conjugate-symmetric.
pub fn split_real_imag(grid: &StripGrid, c: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let ny = grid.ny();
    let nm = grid.n_modes();
    let mut re = vec![ZERO; c.len()];
    let mut im = vec![ZERO; c.len()];
    for slot in 0..nm {
        let mirror = nm - 1 - slot;
        for j in 0..ny {
            let a = c[slot * ny + j];
            let b = c[mirror * ny + j].conj();
            re[slot * ny + j] = 0.5 * (a + b);
            im[slot * ny + j] = C64::new(0.0, -0.5) * (a - b);
        }
    }
    (re, im)
}

pub(crate) fn symmetrize_columns(grid: &StripGrid, c: &mut [C64]) {
    let ny = grid.ny();
    let nm = grid.n_modes();
    let mut col = vec![ZERO; nm];
    for j in 0..ny {
        for slot in 0..nm {
            col[slot] = c[slot * ny + j];
        }
        fourier::symmetrize(&mut col);
        for slot in 0..nm {
            c[slot * ny + j] = col[slot];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_roundtrip_and_derivatives() {
        let grid = StripGrid::new(&SpectralConfig::new(16, 10));
        let f = grid.sample_scalar(|s, y| (2.0 * s).sin() * y.powi(3) + s.cos());
        let df1 = grid.d1(&f);
        let df2 = grid.d2(&f);
        for &(s, y) in &[(0.3, 0.2), (2.0, 0.9), (5.1, 0.55)] {
            let v = grid.eval(&f, s, y).re;
            assert!((v - ((2.0 * s).sin() * y.powi(3) + s.cos())).abs() < 1e-12);
            let d1 = grid.eval(&df1, s, y).re;
            assert!((d1 - (2.0 * (2.0 * s).cos() * y.powi(3) - s.sin())).abs() < 1e-11);
            let d2 = grid.eval(&df2, s, y).re;
            assert!((d2 - 3.0 * (2.0 * s).sin() * y * y).abs() < 1e-11);
        }
        let back = grid.from_grid(&grid.to_grid(&f, 16), 16);
        assert!(back.iter().zip(&f).all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn real_imag_split_recombines() {
        let grid = StripGrid::new(&SpectralConfig::new(8, 8));
        let n = grid.scalar_len();
        let c: Vec<C64> = (0..n)
            .map(|i| C64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.03))
            .collect();
        let (re, im) = split_real_imag(&grid, &c);
        for i in 0..n {
            assert!((re[i] + C64::new(0.0, 1.0) * im[i] - c[i]).norm() < 1e-14);
        }
        let mut r2 = re.clone();
        symmetrize_columns(&grid, &mut r2);
        assert!(r2.iter().zip(&re).all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn vector_packing_roundtrip() {
        let grid = StripGrid::new(&SpectralConfig::new(8, 8));
        let w = FluidField::from_fn(&grid, |s, y| [s.sin() * y, (1.0 - y) * s.cos()]);
        let v = w.to_vector(&grid);
        assert_eq!(FluidField::from_vector(&grid, &v), w);
    }
}
