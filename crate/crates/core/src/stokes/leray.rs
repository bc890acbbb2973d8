//! Leray projection and the discrete Stokes operator.

use super::system::StokesSystem;
use crate::error::Result;
use crate::geometry::FluidField;
use crate::linalg::{self, CMat, Lu};

/// `L^2`-orthogonal projection onto discretely divergence-free fields with
/// zero boundary values, as an ambient matrix `Z (Z^H M Z)^{-1} Z^H M`.
pub fn leray_matrix(sys: &StokesSystem) -> Result<CMat> {
    let lu = Lu::new(&sys.mzz)?;
    let zhm = sys.z.adjoint() * &sys.mass;
    Ok(&sys.z * lu.solve(&zhm))
}

/// Apply the Leray projection to a field.
pub fn leray_project(f: &FluidField, sys: &StokesSystem) -> Result<FluidField> {
    let lu = Lu::new(&sys.mzz)?;
    let mf = linalg::matvec(&sys.mass, &f.to_vector(&sys.grid));
    let g = linalg::matvec(&sys.z.adjoint().to_owned(), &mf);
    let c = lu.solve_vec(&g);
    Ok(FluidField::from_vector(
        &sys.grid,
        &linalg::matvec(&sys.z, &c),
    ))
}

/// Generalized eigenvalues `mu` of the Stokes operator, `-Azz x = mu Mzz x`,
/// sorted by decreasing real part (all negative).
pub fn stokes_eigenvalues(sys: &StokesSystem) -> Result<Vec<f64>> {
    let l = linalg::cholesky(&sys.mzz)?;
    let t = linalg::solve_lower(&l, &sys.azz);
    let s = linalg::solve_lower(&l, &t.adjoint().to_owned());
    let mut ev: Vec<f64> = linalg::hermitian_eigenvalues(&s)?
        .into_iter()
        .map(|v| -v)
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}
