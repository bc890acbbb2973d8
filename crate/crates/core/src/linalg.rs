//! Dense complex linear algebra helpers on top of `faer`.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{Mat, MatRef, Side};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{FsiError, Result};

pub type CMat = Mat<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn zeros(r: usize, c: usize) -> CMat {
    Mat::zeros(r, c)
}

pub fn identity(n: usize) -> CMat {
    Mat::identity(n, n)
}

pub fn from_diag(d: &[C64]) -> CMat {
    Mat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { ZERO })
}

pub fn from_real_diag(d: &[f64]) -> CMat {
    Mat::from_fn(d.len(), d.len(), |i, j| {
        if i == j {
            C64::new(d[i], 0.0)
        } else {
            ZERO
        }
    })
}

pub fn column(v: &[C64]) -> CMat {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

pub fn col_to_vec(m: MatRef<'_, C64>, j: usize) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

pub fn matvec(m: &CMat, v: &[C64]) -> Vec<C64> {
    col_to_vec((m * column(v)).as_ref(), 0)
}

pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint().to_owned()
}

pub fn scale(m: &CMat, a: C64) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * a)
}

/// `a * x + b * y` entrywise.
pub fn axpby(a: C64, x: &CMat, b: C64, y: &CMat) -> CMat {
    Mat::from_fn(x.nrows(), x.ncols(), |i, j| a * x[(i, j)] + b * y[(i, j)])
}

pub fn frobenius(m: &CMat) -> f64 {
    m.norm_l2()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `v^H w`.
pub fn dot(v: &[C64], w: &[C64]) -> C64 {
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// `||m - m^H||_F / ||m||_F`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let n = frobenius(m);
    if n == 0.0 {
        return 0.0;
    }
    frobenius(&(m - m.adjoint())) / n
}

/// `(m + m^H) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        0.5 * (m[(i, j)] + m[(j, i)].conj())
    })
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(vec![]);
    }
    m.singular_values()
        .map_err(|e| FsiError::Numerical(format!("singular values: {e:?}")))
}

/// Spectral norm.
pub fn op_norm(m: &CMat) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Smallest singular value.
pub fn min_singular(m: &CMat) -> Result<f64> {
    Ok(singular_values(m)?.last().copied().unwrap_or(0.0))
}

/// 2-norm condition number.
pub fn condition_number(m: &CMat) -> Result<f64> {
    let s = singular_values(m)?;
    match (s.first(), s.last()) {
        (Some(&a), Some(&b)) if b > 0.0 => Ok(a / b),
        (Some(_), Some(_)) => Ok(f64::INFINITY),
        _ => Ok(1.0),
    }
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &CMat) -> Result<Vec<f64>> {
    hermitian_part(m)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| FsiError::Numerical(format!("hermitian eigenvalues: {e:?}")))
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
/// orthonormal eigenvectors (columns).
pub fn hermitian_eigen(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let e = hermitian_part(m)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| FsiError::Numerical(format!("hermitian eigen: {e:?}")))?;
    let vals = (0..m.nrows()).map(|i| e.S()[i].re).collect();
    Ok((vals, e.U().to_owned()))
}

/// Eigenvalues of a general square matrix.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    m.eigenvalues()
        .map_err(|e| FsiError::Numerical(format!("eigenvalues: {e:?}")))
}

/// Eigenvalues and right eigenvectors of a general square matrix.
pub fn eigen(m: &CMat) -> Result<(Vec<C64>, CMat)> {
    let e = m
        .eigen()
        .map_err(|e| FsiError::Numerical(format!("eigen: {e:?}")))?;
    let vals = (0..m.nrows()).map(|i| e.S()[i]).collect();
    Ok((vals, e.U().to_owned()))
}

/// Orthonormal basis of the null space, from a full SVD.
pub fn null_space(m: &CMat, rel_tol: f64) -> Result<CMat> {
    let n = m.ncols();
    if m.nrows() == 0 {
        return Ok(identity(n));
    }
    let svd = m
        .svd()
        .map_err(|e| FsiError::Numerical(format!("svd: {e:?}")))?;
    let s = svd.S();
    let smax = if s.dim() > 0 { s[0].re } else { 0.0 };
    let rank = (0..s.dim()).filter(|&i| s[i].re > rel_tol * smax).count();
    let v = svd.V();
    Ok(Mat::from_fn(n, n - rank, |i, j| v[(i, rank + j)]))
}

/// LU factorization with partial pivoting.
pub struct Lu {
    lu: faer::linalg::solvers::PartialPivLu<C64>,
    n: usize,
}

impl Lu {
    pub fn new(m: &CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(FsiError::Numerical("LU of a non-square matrix".into()));
        }
        let lu = m.partial_piv_lu();
        let f = Lu { lu, n: m.nrows() };
        // guard against exactly singular pivots
        let u = f.lu.U();
        for i in 0..f.n {
            let d = u[(i, i)];
            if !(d.norm().is_finite()) || d.norm() == 0.0 {
                return Err(FsiError::Numerical(format!("singular pivot at {i}")));
            }
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &CMat) -> CMat {
        self.lu.solve(rhs)
    }

    pub fn solve_vec(&self, rhs: &[C64]) -> Vec<C64> {
        col_to_vec(self.lu.solve(column(rhs)).as_ref(), 0)
    }

    pub fn inverse(&self) -> CMat {
        self.lu.inverse()
    }
}

/// Lower Cholesky factor `l` with `m = l l^H`.
pub fn cholesky(m: &CMat) -> Result<CMat> {
    let llt = hermitian_part(m)
        .llt(Side::Lower)
        .map_err(|e| FsiError::Numerical(format!("cholesky: {e:?}")))?;
    Ok(llt.L().to_owned())
}

/// Solve `l x = b` for lower-triangular `l`.
pub fn solve_lower(l: &CMat, b: &CMat) -> CMat {
    let mut x = b.clone();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(
        l.as_ref(),
        x.as_mut(),
        faer::Par::Seq,
    );
    x
}

/// Solve `l^H x = b` for lower-triangular `l`.
pub fn solve_lower_adjoint(l: &CMat, b: &CMat) -> CMat {
    let mut x = b.clone();
    faer::linalg::triangular_solve::solve_upper_triangular_in_place(
        l.adjoint(),
        x.as_mut(),
        faer::Par::Seq,
    );
    x
}

/// Plain description of a dense operator for reports and exports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDesc {
    pub label: String,
    /// Exponent of the beam operator weight, when the space is a beam space.
    pub a1_power: Option<f64>,
}

impl SpaceDesc {
    pub fn new(label: &str, a1_power: Option<f64>) -> Self {
        SpaceDesc {
            label: label.to_string(),
            a1_power,
        }
    }
}

/// Dense complex matrix tagged with domain and codomain descriptors.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub name: String,
    pub entries: CMat,
    pub domain: SpaceDesc,
    pub codomain: SpaceDesc,
    pub lambda: Option<C64>,
    /// Set only after a numerical check.
    pub hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(name: &str, entries: CMat, domain: SpaceDesc, codomain: SpaceDesc) -> Self {
        OperatorMatrix {
            name: name.to_string(),
            entries,
            domain,
            codomain,
            lambda: None,
            hermitian: false,
        }
    }

    pub fn with_lambda(mut self, lambda: C64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    /// Set the Hermitian flag if the relative defect is below `tol`.
    pub fn check_hermitian(&mut self, tol: f64) -> f64 {
        let d = hermitian_defect(&self.entries);
        self.hermitian = d < tol;
        d
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }
}
