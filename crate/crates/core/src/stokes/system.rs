//! Discrete Stokes resolvent on the reference domain.
//!
//! Velocities live in the ambient space of flat-frame nodal fields. The
//! discretely divergence-free subspace with homogeneous boundary values is
//! spanned by the columns of `Z` (mode by mode, since the Piola divergence
//! does not couple Fourier modes); boundary data `eta e2` on the top wall is
//! lifted by the exactly divergence-free fields `E`. The pressure is
//! recovered afterwards from the momentum residual.

use num_complex::Complex64 as C64;

use super::assembly::{assemble, Geometry, FORM_OVERSAMPLING};
use crate::error::{FsiError, Result};
use crate::geometry::{FluidField, PressureField, StripGrid, TransformOps};
use crate::linalg::{self, zeros, CMat, Lu};
use crate::spectral::chebyshev::shifted_legendre;
use crate::spectral::BeamFunction;

/// Relative singular-value cut used for the divergence null spaces.
const NULL_TOL: f64 = 1e-10;

/// Per-mode discrete divergence and its null space.
#[derive(Clone, Debug)]
pub struct ModeConstraint {
    /// Legendre degrees of the pressure basis of this mode.
    pub degrees: Vec<usize>,
    /// `npress x 2ny` divergence rows in the local layout `comp * ny + j`.
    pub div: CMat,
    /// `2ny x (ny - 2)` orthonormal basis of divergence-free fields vanishing
    /// at `y = 0, 1`, local layout.
    pub basis: CMat,
}

/// Assembled forms and constraint bases for one reference geometry.
#[derive(Clone, Debug)]
pub struct StokesSystem {
    pub grid: StripGrid,
    pub eta10: BeamFunction,
    /// Ambient mass matrix (`L^2` on the reference domain).
    pub mass: CMat,
    /// Ambient viscous matrix `2 nu (D w, D v)`.
    pub visc: CMat,
    pub modes: Vec<ModeConstraint>,
    /// Global homogeneous divergence-free basis (ambient x nz).
    pub z: CMat,
    /// Lifting of the mean-zero beam basis (ambient x beam_dim).
    pub lift: CMat,
    pub mzz: CMat,
    pub azz: CMat,
    pub mze: CMat,
    pub aze: CMat,
    pub mee: CMat,
    pub aee: CMat,
}

/// Velocity, pressure and top-wall traction `Lambda*(T(w, q) n)`.
#[derive(Clone, Debug)]
pub struct StokesSolution {
    pub w: FluidField,
    pub q: PressureField,
    pub traction_top: BeamFunction,
    /// `max |div w|` over the discrete divergence rows.
    pub div_residual: f64,
    /// Constant removed from the pressure to pin its mean.
    pub pressure_shift: f64,
}

impl StokesSystem {
    /// Assemble on the reference domain of `tf` (a transform from the flat
    /// strip, `eta_ref = 0`).
    pub fn new(tf: &TransformOps) -> Result<Self> {
        if !tf.is_flat_source() {
            return Err(FsiError::Rejected(
                "Stokes system needs the flat-strip transform".into(),
            ));
        }
        let grid = tf.grid.clone();
        let cfg = &grid.cfg;
        let eta10 = project_to_grid(&tf.eta_target, cfg.kmax());
        let geo = Geometry::new(&eta10, cfg.length, FORM_OVERSAMPLING * cfg.ns);
        let mass = assemble(&grid, &geo.mass_form());
        let visc = assemble(&grid, &geo.viscous_form(cfg.nu));
        let modes = mode_constraints(&grid)?;
        let z = global_basis(&grid, &modes);
        let lift = lift_matrix(&grid);
        let zh = z.adjoint();
        let mz = &mass * &z;
        let az = &visc * &z;
        let me = &mass * &lift;
        let ae = &visc * &lift;
        Ok(StokesSystem {
            mzz: zh * &mz,
            azz: zh * &az,
            mze: zh * &me,
            aze: zh * &ae,
            mee: lift.adjoint() * &me,
            aee: lift.adjoint() * &ae,
            grid,
            eta10,
            mass,
            visc,
            modes,
            z,
            lift,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.mass.nrows()
    }

    pub fn nz(&self) -> usize {
        self.z.ncols()
    }

    pub fn beam_dim(&self) -> usize {
        self.lift.ncols()
    }

    /// Factor `lambda Mzz + Azz` for repeated solves.
    pub fn factor(&self, lambda: C64) -> Result<StokesResolvent<'_>> {
        let s = linalg::axpby(lambda, &self.mzz, linalg::ONE, &self.azz);
        let lu = Lu::new(&s)?;
        Ok(StokesResolvent {
            sys: self,
            lambda,
            lu,
        })
    }

    /// Discrete divergence `int P_m div w~` for all modes, stacked.
    pub fn divergence(&self, w: &[C64]) -> Vec<C64> {
        let ny = self.grid.ny();
        let mut out = Vec::new();
        for (slot, mc) in self.modes.iter().enumerate() {
            let local = &w[slot * 2 * ny..(slot + 1) * 2 * ny];
            out.extend(linalg::matvec(&mc.div, local));
        }
        out
    }

    /// Recover the pressure from the momentum residual `r = (lambda M + A) w - M f`
    /// on the interior rows, and pin the physical mean to zero.
    pub fn recover_pressure(&self, residual: &[C64]) -> Result<(PressureField, f64)> {
        let ny = self.grid.ny();
        let mut q = PressureField::zeros(&self.grid);
        for (slot, mc) in self.modes.iter().enumerate() {
            let interior: Vec<usize> = (0..2)
                .flat_map(|c| (1..ny - 1).map(move |j| c * ny + j))
                .collect();
            let bt = CMat::from_fn(interior.len(), mc.degrees.len(), |i, m| {
                mc.div[(m, interior[i])].conj()
            });
            let rhs: Vec<C64> = interior
                .iter()
                .map(|&l| residual[slot * 2 * ny + l])
                .collect();
            let coef = least_squares(&bt, &rhs)?;
            for (j, &y) in self.grid.vb.nodes.iter().enumerate() {
                let p = shifted_legendre(ny, y);
                q.values[slot * ny + j] =
                    mc.degrees.iter().zip(&coef).map(|(&d, c)| c * p[d]).sum();
            }
        }
        let shift = self.pressure_mean(&q);
        let k0 = self.grid.cfg.mode_slot(0);
        for j in 0..ny {
            q.values[k0 * ny + j] -= C64::new(shift, 0.0);
        }
        Ok((q, shift))
    }

    /// Mean of the pressure over the reference domain.
    pub fn pressure_mean(&self, q: &PressureField) -> f64 {
        let grid = &self.grid;
        let n1 = FORM_OVERSAMPLING * grid.cfg.ns;
        let vals = grid.to_grid(&q.values, n1);
        let h: Vec<f64> = self
            .eta10
            .samples(n1)
            .into_iter()
            .map(|v| 1.0 + v)
            .collect();
        let wq =
            crate::spectral::chebyshev::nodal_quadrature_weights(&grid.vb.nodes, &grid.vb.bary);
        let ny = grid.ny();
        let mut num = 0.0;
        let mut area = 0.0;
        for i1 in 0..n1 {
            for j in 0..ny {
                num += vals[i1 * ny + j] * wq[j] * h[i1];
            }
            area += h[i1];
        }
        num / area
    }

    /// `(1/L) E^H r`: the beam-side functional of a momentum residual.
    pub fn boundary_functional(&self, residual: &[C64]) -> BeamFunction {
        let v = linalg::matvec(&self.lift.adjoint().to_owned(), residual);
        let inv_l = 1.0 / self.grid.cfg.length;
        let scaled: Vec<C64> = v.into_iter().map(|x| x * inv_l).collect();
        BeamFunction::from_beam_vector(self.grid.cfg.kmax(), &scaled)
    }

    /// Ambient vector of the lifting of beam data.
    pub fn lift_vector(&self, eta: &BeamFunction) -> Vec<C64> {
        linalg::matvec(&self.lift, &eta.beam_vector())
    }

    /// Momentum residual `(lambda M + A) w - M f` in the ambient space.
    pub fn momentum_residual(&self, lambda: C64, w: &[C64], mf: Option<&[C64]>) -> Vec<C64> {
        let m = linalg::matvec(&self.mass, w);
        let a = linalg::matvec(&self.visc, w);
        let mut r: Vec<C64> = m.iter().zip(&a).map(|(m, a)| lambda * m + a).collect();
        if let Some(mf) = mf {
            for (x, b) in r.iter_mut().zip(mf) {
                *x -= b;
            }
        }
        r
    }

    /// Pressure, traction and divergence diagnostics for a velocity solving
    /// the weak momentum equation with right-hand side `mf = M f`.
    pub fn complete_solution(
        &self,
        lambda: C64,
        w: Vec<C64>,
        mf: Option<&[C64]>,
    ) -> Result<StokesSolution> {
        let r = self.momentum_residual(lambda, &w, mf);
        let (q, shift) = self.recover_pressure(&r)?;
        let traction_top = self.boundary_functional(&r);
        let div_residual = self
            .divergence(&w)
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        Ok(StokesSolution {
            w: FluidField::from_vector(&self.grid, &w),
            q,
            traction_top,
            div_residual,
            pressure_shift: shift,
        })
    }
}

/// Factorized `lambda Mzz + Azz`.
pub struct StokesResolvent<'a> {
    pub sys: &'a StokesSystem,
    pub lambda: C64,
    lu: Lu,
}

impl StokesResolvent<'_> {
    /// Coefficients `C` with `W = E + Z C` (the lifted solution operator).
    pub fn lifted_coefficients(&self) -> CMat {
        let rhs = linalg::axpby(
            -self.lambda,
            &self.sys.mze,
            C64::new(-1.0, 0.0),
            &self.sys.aze,
        );
        self.lu.solve(&rhs)
    }

    /// Ambient matrix of `W_lambda` on the beam basis.
    pub fn lifted_operator(&self) -> CMat {
        &self.sys.lift + &self.sys.z * self.lifted_coefficients()
    }

    /// Divergence-free coefficients of the forced solution with `Z^H M f = g`.
    pub fn solve_reduced(&self, g: &CMat) -> CMat {
        self.lu.solve(g)
    }

    /// Lifted problem with boundary data `eta e2` on the top wall.
    pub fn solve_lifted(&self, eta: &BeamFunction) -> Result<StokesSolution> {
        let e = eta.beam_vector();
        let c = linalg::matvec(&self.lifted_coefficients(), &e);
        let mut w = linalg::matvec(&self.sys.lift, &e);
        let zc = linalg::matvec(&self.sys.z, &c);
        for (a, b) in w.iter_mut().zip(&zc) {
            *a += b;
        }
        self.sys.complete_solution(self.lambda, w, None)
    }

    /// Forced problem with homogeneous boundary values.
    pub fn solve_forced(&self, f: &FluidField) -> Result<StokesSolution> {
        let fv = f.to_vector(&self.sys.grid);
        let mf = linalg::matvec(&self.sys.mass, &fv);
        let g = linalg::matvec(&self.sys.z.adjoint().to_owned(), &mf);
        let c = self.lu.solve_vec(&g);
        let w = linalg::matvec(&self.sys.z, &c);
        self.sys.complete_solution(self.lambda, w, Some(&mf))
    }
}

/// Solve the lifted problem defining `W_lambda eta`, `Q_lambda eta`.
pub fn solve_lifted(lambda: C64, eta: &BeamFunction, sys: &StokesSystem) -> Result<StokesSolution> {
    sys.factor(lambda)?.solve_lifted(eta)
}

/// Solve the forced problem with homogeneous Dirichlet data.
pub fn solve_forced(lambda: C64, f: &FluidField, sys: &StokesSystem) -> Result<StokesSolution> {
    sys.factor(lambda)?.solve_forced(f)
}

fn project_to_grid(eta: &BeamFunction, kmax: usize) -> BeamFunction {
    BeamFunction {
        coeffs: crate::spectral::fourier::resize(&eta.coeffs, kmax),
    }
}

fn least_squares(a: &CMat, b: &[C64]) -> Result<Vec<C64>> {
    use faer::linalg::solvers::SolveLstsq;
    let qr = a.qr();
    let mut rhs = linalg::column(b);
    qr.solve_lstsq_in_place(rhs.as_mut());
    let n = a.ncols();
    let x: Vec<C64> = (0..n).map(|i| rhs[(i, 0)]).collect();
    if x.iter().any(|v| !v.norm().is_finite()) {
        return Err(FsiError::Numerical("pressure least squares failed".into()));
    }
    Ok(x)
}

fn mode_constraints(grid: &StripGrid) -> Result<Vec<ModeConstraint>> {
    let cfg = &grid.cfg;
    let ny = grid.ny();
    let vb = &grid.vb;
    let nq = vb.quad_x.len();
    let leg: Vec<Vec<f64>> = vb.quad_x.iter().map(|&y| shifted_legendre(ny, y)).collect();
    let mut out = Vec::with_capacity(cfg.n_modes());
    for slot in 0..cfg.n_modes() {
        let k = cfg.mode_index(slot);
        let degrees: Vec<usize> = if k == 0 {
            (1..=ny - 2).collect()
        } else {
            (0..=ny - 3).collect()
        };
        let ik = C64::new(0.0, cfg.xi(k));
        let div = CMat::from_fn(degrees.len(), 2 * ny, |m, col| {
            let (c, j) = (col / ny, col % ny);
            let d = degrees[m];
            // d/ds acts on the first component, d/dy on the second
            let order = c;
            let val: f64 = (0..nq)
                .map(|qi| vb.quad_w[qi] * leg[qi][d] * vb.eval[order][qi][j])
                .sum();
            let f = if c == 0 { ik } else { linalg::ONE };
            f * val * cfg.length
        });
        let interior: Vec<usize> = (0..2)
            .flat_map(|c| (1..ny - 1).map(move |j| c * ny + j))
            .collect();
        let di = CMat::from_fn(div.nrows(), interior.len(), |m, i| div[(m, interior[i])]);
        let ns = linalg::null_space(&di, NULL_TOL)?;
        if ns.ncols() != ny - 2 {
            return Err(FsiError::Numerical(format!(
                "divergence null space of mode {k} has dimension {} (expected {})",
                ns.ncols(),
                ny - 2
            )));
        }
        let mut basis = zeros(2 * ny, ns.ncols());
        for (i, &l) in interior.iter().enumerate() {
            for c in 0..ns.ncols() {
                basis[(l, c)] = ns[(i, c)];
            }
        }
        out.push(ModeConstraint {
            degrees,
            div,
            basis,
        });
    }
    Ok(out)
}

fn global_basis(grid: &StripGrid, modes: &[ModeConstraint]) -> CMat {
    let ny = grid.ny();
    let n = 2 * ny * grid.n_modes();
    let nz: usize = modes.iter().map(|m| m.basis.ncols()).sum();
    let mut z = zeros(n, nz);
    let mut col = 0;
    for (slot, m) in modes.iter().enumerate() {
        for c in 0..m.basis.ncols() {
            for r in 0..2 * ny {
                z[(slot * 2 * ny + r, col)] = m.basis[(r, c)];
            }
            col += 1;
        }
    }
    z
}

/// Divergence-free lifting `exp(i xi s) (i l'(y) / xi, l(y))`, `l = 3y^2 - 2y^3`.
fn lift_matrix(grid: &StripGrid) -> CMat {
    let cfg = &grid.cfg;
    let ny = grid.ny();
    let slots = cfg.beam_slots();
    let n = 2 * ny * cfg.n_modes();
    let mut e = zeros(n, slots.len());
    for (b, &slot) in slots.iter().enumerate() {
        let xi = cfg.xi(cfg.mode_index(slot));
        for (j, &y) in grid.vb.nodes.iter().enumerate() {
            let l = 3.0 * y * y - 2.0 * y * y * y;
            let dl = 6.0 * y - 6.0 * y * y;
            e[((slot * 2) * ny + j, b)] = C64::new(0.0, dl / xi);
            e[((slot * 2 + 1) * ny + j, b)] = C64::new(l, 0.0);
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_transform;
    use crate::spectral::SpectralConfig;

    fn system(ns: usize, ny: usize, amp: f64) -> StokesSystem {
        let grid = StripGrid::new(&SpectralConfig::new(ns, ny));
        let zero = BeamFunction::zeros(grid.cfg.kmax());
        let eta = BeamFunction::from_fn(&grid.cfg, |s| amp * s.sin());
        let tf = build_transform(&eta, &zero, &grid).unwrap();
        StokesSystem::new(&tf).unwrap()
    }

    #[test]
    fn bases_are_divergence_free() {
        let sys = system(8, 8, 0.2);
        assert_eq!(sys.nz(), sys.grid.n_modes() * 6);
        for c in 0..sys.nz() {
            let col = linalg::col_to_vec(sys.z.as_ref(), c);
            assert!(sys.divergence(&col).iter().all(|x| x.norm() < 1e-12));
        }
        for c in 0..sys.beam_dim() {
            let col = linalg::col_to_vec(sys.lift.as_ref(), c);
            assert!(sys.divergence(&col).iter().all(|x| x.norm() < 1e-11));
        }
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let sys = system(8, 8, 0.2);
        let sol = solve_lifted(
            C64::new(1.0, 1.0),
            &BeamFunction::zeros(sys.grid.cfg.kmax()),
            &sys,
        )
        .unwrap();
        assert_eq!(sol.w.max_abs(), 0.0);
        assert_eq!(sol.q.max_abs(), 0.0);
    }
}
