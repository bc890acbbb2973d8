//! Galerkin forms on the flat strip for fields pulled back from the
//! reference domain.
//!
//! A flat-frame field `w~` (Piola image of a physical field `w`) is expanded
//! as `sum_k sum_j W[k, c, j] exp(i xi_k s) phi_j(y) e_c` with Lagrange
//! polynomials `phi_j` on the vertical nodes. Physical quantities (velocity
//! components, velocity gradient entries) are linear combinations of
//! `coef(s) y^p D w~_c` with `D` one of identity, `d/ds`, `d/dy`; every form
//! is then a sum of Toeplitz-in-`k` times vertical-moment blocks.

use std::collections::HashMap;

use num_complex::Complex64 as C64;

use crate::geometry::StripGrid;
use crate::linalg::{zeros, CMat};
use crate::spectral::{fourier, BeamFunction};

/// Oversampling of the `s` grid used to expand coefficient products.
pub const FORM_OVERSAMPLING: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Deriv {
    Val,
    S,
    Y,
}

impl Deriv {
    fn vertical_order(self) -> usize {
        match self {
            Deriv::Y => 1,
            _ => 0,
        }
    }
}

/// `coef(s) y^power D w~_comp`, with `coef` sampled on the form grid.
#[derive(Clone, Debug)]
pub struct Term {
    pub coef: Vec<f64>,
    pub power: u32,
    pub comp: usize,
    pub deriv: Deriv,
}

/// Contribution `int weight(s) E(w) conj(E(v)) dy` with `E` a sum of terms.
#[derive(Clone, Debug)]
pub struct Quadratic {
    pub weight: Vec<f64>,
    pub expr: Vec<Term>,
}

/// Height `h = 1 + eta10` and its first two derivatives on the form grid.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub n: usize,
    pub h: Vec<f64>,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
}

impl Geometry {
    pub fn new(eta10: &BeamFunction, length: f64, n: usize) -> Self {
        let h = eta10.samples(n).into_iter().map(|v| 1.0 + v).collect();
        Geometry {
            n,
            h,
            h1: eta10.derivative(length, 1).samples(n),
            h2: eta10.derivative(length, 2).samples(n),
        }
    }

    fn map(&self, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
        (0..self.n)
            .map(|i| f(self.h[i], self.h1[i], self.h2[i]))
            .collect()
    }

    fn term(
        &self,
        f: impl Fn(f64, f64, f64) -> f64,
        power: u32,
        comp: usize,
        deriv: Deriv,
    ) -> Term {
        Term {
            coef: self.map(f),
            power,
            comp,
            deriv,
        }
    }

    /// Physical velocity components `w = a(X) w~(Y)` in flat terms.
    pub fn velocity_terms(&self) -> [Vec<Term>; 2] {
        [
            vec![self.term(|h, _, _| 1.0 / h, 0, 0, Deriv::Val)],
            vec![
                self.term(|h, h1, _| h1 / h, 1, 0, Deriv::Val),
                self.term(|_, _, _| 1.0, 0, 1, Deriv::Val),
            ],
        ]
    }

    /// Physical gradient entries `[i][j] = d w_i / d x_j` in flat terms.
    pub fn gradient_terms(&self) -> [[Vec<Term>; 2]; 2] {
        use Deriv::*;
        let r = |h: f64, h1: f64| h1 / h;
        let dr = |h: f64, h1: f64, h2: f64| h2 / h - (h1 / h).powi(2);
        let d1w1 = vec![
            self.term(|h, _, _| 1.0 / h, 0, 0, S),
            self.term(|h, h1, _| -h1 / (h * h), 0, 0, Val),
            self.term(|h, h1, _| -h1 / (h * h), 1, 0, Y),
        ];
        let d2w1 = vec![self.term(|h, _, _| 1.0 / (h * h), 0, 0, Y)];
        let d1w2 = vec![
            self.term(|_, _, _| 1.0, 0, 1, S),
            self.term(move |h, h1, h2| dr(h, h1, h2) - r(h, h1).powi(2), 1, 0, Val),
            self.term(move |h, h1, _| r(h, h1), 1, 0, S),
            self.term(move |h, h1, _| -r(h, h1), 1, 1, Y),
            self.term(move |h, h1, _| -r(h, h1).powi(2), 2, 0, Y),
        ];
        let d2w2 = vec![
            self.term(|h, _, _| 1.0 / h, 0, 1, Y),
            self.term(move |h, h1, _| r(h, h1) / h, 0, 0, Val),
            self.term(move |h, h1, _| r(h, h1) / h, 1, 0, Y),
        ];
        [[d1w1, d2w1], [d1w2, d2w2]]
    }

    /// `L^2` mass on the reference domain: `int w . conj(v) dx`.
    pub fn mass_form(&self) -> Vec<Quadratic> {
        let [e1, e2] = self.velocity_terms();
        vec![
            Quadratic {
                weight: self.h.clone(),
                expr: e1,
            },
            Quadratic {
                weight: self.h.clone(),
                expr: e2,
            },
        ]
    }

    /// Viscous form `2 nu int D(w) : conj(D(v)) dx`.
    pub fn viscous_form(&self, nu: f64) -> Vec<Quadratic> {
        let g = self.gradient_terms();
        let weight: Vec<f64> = self.h.iter().map(|h| 2.0 * nu * h).collect();
        let scaled = |terms: &[Term], a: f64| -> Vec<Term> {
            terms
                .iter()
                .map(|t| Term {
                    coef: t.coef.iter().map(|c| c * a).collect(),
                    ..t.clone()
                })
                .collect()
        };
        // D:D = e11^2 + e22^2 + 2 e12^2 with e12 = (d2 w1 + d1 w2) / 2
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let mut e12 = scaled(&g[0][1], a);
        e12.extend(scaled(&g[1][0], a));
        vec![
            Quadratic {
                weight: weight.clone(),
                expr: g[0][0].clone(),
            },
            Quadratic {
                weight: weight.clone(),
                expr: g[1][1].clone(),
            },
            Quadratic { weight, expr: e12 },
        ]
    }
}

/// Assemble the Hermitian matrix of a sum of quadratic forms in the ambient
/// layout `(slot * 2 + comp) * ny + j` (rows: test, columns: trial).
pub fn assemble(grid: &StripGrid, forms: &[Quadratic]) -> CMat {
    let cfg = &grid.cfg;
    let ny = grid.ny();
    let nm = grid.n_modes();
    let kmax = cfg.kmax();
    let n = 2 * ny * nm;
    let mut out = zeros(n, n);
    let mut moments: HashMap<(u32, usize, usize), Vec<Vec<f64>>> = HashMap::new();
    let xi: Vec<f64> = (0..nm).map(|s| cfg.xi(cfg.mode_index(s))).collect();

    for q in forms {
        for ta in &q.expr {
            for tb in &q.expr {
                let g: Vec<f64> = (0..q.weight.len())
                    .map(|i| q.weight[i] * ta.coef[i] * tb.coef[i])
                    .collect();
                let ghat = fourier::coeffs_from_real(&g, 2 * kmax);
                let key = (
                    ta.power + tb.power,
                    tb.deriv.vertical_order(),
                    ta.deriv.vertical_order(),
                );
                let y = moments
                    .entry(key)
                    .or_insert_with(|| grid.vb.moment(key.0, key.1, key.2));
                for kt in 0..nm {
                    let ft = if tb.deriv == Deriv::S {
                        C64::new(0.0, xi[kt]).conj()
                    } else {
                        C64::new(1.0, 0.0)
                    };
                    for ka in 0..nm {
                        let fa = if ta.deriv == Deriv::S {
                            C64::new(0.0, xi[ka])
                        } else {
                            C64::new(1.0, 0.0)
                        };
                        let m = kt as isize - ka as isize;
                        let gm = ghat[(m + 2 * kmax as isize) as usize];
                        let f = gm * fa * ft * cfg.length;
                        if f.norm() == 0.0 {
                            continue;
                        }
                        let r0 = (kt * 2 + tb.comp) * ny;
                        let c0 = (ka * 2 + ta.comp) * ny;
                        for (i, yrow) in y.iter().enumerate() {
                            for (j, &v) in yrow.iter().enumerate() {
                                if v != 0.0 {
                                    out[(r0 + i, c0 + j)] += f * v;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FluidField;
    use crate::linalg::{dot, hermitian_defect, matvec};
    use crate::spectral::SpectralConfig;

    #[test]
    fn flat_mass_matches_quadrature() {
        let grid = StripGrid::new(&SpectralConfig::new(8, 8));
        let geo = Geometry::new(&BeamFunction::zeros(grid.cfg.kmax()), grid.cfg.length, 64);
        let m = assemble(&grid, &geo.mass_form());
        assert!(hermitian_defect(&m) < 1e-14);
        // |w|^2 for w = (sin s * y, 0): int_0^{2pi} sin^2 * int_0^1 y^2 = pi / 3
        let w = FluidField::from_fn(&grid, |s, y| [s.sin() * y, 0.0]).to_vector(&grid);
        let e = dot(&w, &matvec(&m, &w)).re;
        assert!((e - std::f64::consts::PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn curved_mass_matches_physical_integral() {
        // w~ = b w(X) for w = (1, 0): w~ = (h, -y h'); int |w|^2 dx = area
        let grid = StripGrid::new(&SpectralConfig::new(16, 8));
        let eta = BeamFunction::from_fn(&grid.cfg, |s| 0.3 * s.cos());
        let geo = Geometry::new(&eta, grid.cfg.length, 128);
        let m = assemble(&grid, &geo.mass_form());
        let w = FluidField::from_fn(&grid, |s, y| [1.0 + 0.3 * s.cos(), 0.3 * y * s.sin()])
            .to_vector(&grid);
        let e = dot(&w, &matvec(&m, &w)).re;
        assert!((e - 2.0 * std::f64::consts::PI).abs() < 1e-11, "{e}");
    }

    #[test]
    fn viscous_form_of_rigid_translation_vanishes() {
        let grid = StripGrid::new(&SpectralConfig::new(16, 8));
        let eta = BeamFunction::from_fn(&grid.cfg, |s| 0.3 * s.cos());
        let geo = Geometry::new(&eta, grid.cfg.length, 128);
        let a = assemble(&grid, &geo.viscous_form(1.0));
        assert!(hermitian_defect(&a) < 1e-13);
        let w = FluidField::from_fn(&grid, |s, y| [1.0 + 0.3 * s.cos(), 0.3 * y * s.sin()])
            .to_vector(&grid);
        let e = dot(&w, &matvec(&a, &w)).re;
        assert!(e.abs() < 1e-10, "{e}");
    }
}
