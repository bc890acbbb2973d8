//! Vertical-stretching changes of variables with cached Jacobian fields.
//!
//! `build_transform(eta_target, eta_ref)` describes the map from the domain
//! under `1 + eta_ref` onto the domain under `1 + eta_target`,
//! `X(y) = (y1, y2 (1 + zeta(y1)))` with `zeta = (eta_target - eta_ref) / (1 + eta_ref)`.
//! With `eta_ref = 0` this is the map from the flat strip onto the curved
//! reference domain.

use serde::{Deserialize, Serialize};

use super::fields::StripGrid;
use super::jacobians::{point_jacobians, PointJacobians, ZetaJet};
use crate::error::{FsiError, Result};
use crate::spectral::beam::BOUNDARY_OVERSAMPLING;
use crate::spectral::{check_no_contact, fourier, BeamFunction};

/// Contact is declared when `min(1 + eta)` or `min(1 + zeta)` falls below this.
pub const CONTACT_TOL: f64 = 1e-6;

/// Change of variables with all Jacobian fields cached on an `n1 x ny` grid.
#[derive(Clone, Debug)]
pub struct TransformOps {
    pub grid: StripGrid,
    pub eta_ref: BeamFunction,
    pub eta_target: BeamFunction,
    /// Relative deflection, resolved on the oversampled boundary grid.
    pub zeta: BeamFunction,
    /// Time derivative of `zeta` (zero for stationary transforms).
    pub zeta_t: BeamFunction,
    n1: usize,
    jets: Vec<ZetaJet>,
    ref_height: Vec<f64>,
    fields: Vec<PointJacobians>,
}

/// Summary of the cached fields, suitable for reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JacobianSummary {
    pub n1: usize,
    pub ny: usize,
    pub min_det: f64,
    pub max_det: f64,
    /// `max |grad Y(X) grad X - I|` over the grid.
    pub chain_rule_residual: f64,
    /// `max |a(X) b - I|` over the grid.
    pub cofactor_residual: f64,
}

/// Stationary transform on the product grid of `grid`.
pub fn build_transform(
    eta_target: &BeamFunction,
    eta_ref: &BeamFunction,
    grid: &StripGrid,
) -> Result<TransformOps> {
    build_transform_on(eta_target, None, eta_ref, grid, grid.product_points())
}

/// Transform with an optional deflection rate `d eta_target / dt`, cached on
/// `n1` points in `s`.
pub fn build_transform_on(
    eta_target: &BeamFunction,
    eta_target_rate: Option<&BeamFunction>,
    eta_ref: &BeamFunction,
    grid: &StripGrid,
    n1: usize,
) -> Result<TransformOps> {
    let cfg = &grid.cfg;
    check_no_contact(eta_ref, cfg, CONTACT_TOL, None)?;
    check_no_contact(eta_target, cfg, CONTACT_TOL, None)?;

    let nf = BOUNDARY_OVERSAMPLING * cfg.ns.max(n1);
    let kz = nf / 2 - 1;
    let href = eta_ref.samples(nf);
    let htar = eta_target.samples(nf);
    let zeta_vals: Vec<f64> = htar
        .iter()
        .zip(&href)
        .map(|(t, r)| (t - r) / (1.0 + r))
        .collect();
    if let Some((j, z)) = zeta_vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
    {
        if 1.0 + z < CONTACT_TOL {
            return Err(FsiError::Contact {
                min_gap: 1.0 + z,
                at_s: cfg.length * j as f64 / nf as f64,
                time: None,
            });
        }
    }
    let zeta = BeamFunction {
        coeffs: fourier::coeffs_from_real(&zeta_vals, kz),
    };
    let zeta_t = match eta_target_rate {
        Some(rate) => {
            let r = rate.samples(nf);
            let vals: Vec<f64> = r.iter().zip(&href).map(|(a, h)| a / (1.0 + h)).collect();
            BeamFunction {
                coeffs: fourier::coeffs_from_real(&vals, kz),
            }
        }
        None => BeamFunction::zeros(kz),
    };

    let len = cfg.length;
    let series = [
        zeta.clone(),
        zeta.derivative(len, 1),
        zeta.derivative(len, 2),
        zeta.derivative(len, 3),
        zeta_t.clone(),
        zeta_t.derivative(len, 1),
    ];
    let s_pts = fourier::grid_points(n1, len);
    let jets: Vec<ZetaJet> = s_pts
        .iter()
        .map(|&s| {
            let v: Vec<f64> = series.iter().map(|f| f.eval(len, s).re).collect();
            ZetaJet {
                z: v[0],
                z1: v[1],
                z2: v[2],
                z3: v[3],
                zt: v[4],
                zt1: v[5],
            }
        })
        .collect();
    let ref_height: Vec<f64> = s_pts
        .iter()
        .map(|&s| 1.0 + eta_ref.eval(len, s).re)
        .collect();

    let ny = grid.ny();
    let mut fields = Vec::with_capacity(n1 * ny);
    for (i1, jet) in jets.iter().enumerate() {
        for &yf in &grid.vb.nodes {
            fields.push(point_jacobians(yf * ref_height[i1], jet));
        }
    }
    Ok(TransformOps {
        grid: grid.clone(),
        eta_ref: eta_ref.clone(),
        eta_target: eta_target.clone(),
        zeta,
        zeta_t,
        n1,
        jets,
        ref_height,
        fields,
    })
}

impl TransformOps {
    /// Number of cached points in `s`.
    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn jets(&self) -> &[ZetaJet] {
        &self.jets
    }

    /// `1 + eta_ref` at the cached `s` points.
    pub fn ref_height(&self) -> &[f64] {
        &self.ref_height
    }

    /// Cached fields at `(s_i1, y_j)`.
    pub fn at(&self, i1: usize, j: usize) -> &PointJacobians {
        &self.fields[i1 * self.grid.ny() + j]
    }

    /// Every Jacobian field on the grid, layout `i1 * ny + j`.
    pub fn evaluate_appendix_jacobians(&self) -> &[PointJacobians] {
        &self.fields
    }

    /// `true` when the source domain is the flat strip.
    pub fn is_flat_source(&self) -> bool {
        self.eta_ref.max_abs_coeff() == 0.0
    }

    pub fn summary(&self) -> JacobianSummary {
        use super::jacobians::matmul2;
        let mut out = JacobianSummary {
            n1: self.n1,
            ny: self.grid.ny(),
            min_det: f64::INFINITY,
            max_det: f64::NEG_INFINITY,
            chain_rule_residual: 0.0,
            cofactor_residual: 0.0,
        };
        let dev = |m: [[f64; 2]; 2]| -> f64 {
            let mut d: f64 = 0.0;
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let id = if i == j { 1.0 } else { 0.0 };
                    d = d.max((v - id).abs());
                }
            }
            d
        };
        for p in &self.fields {
            out.min_det = out.min_det.min(p.det);
            out.max_det = out.max_det.max(p.det);
            out.chain_rule_residual = out
                .chain_rule_residual
                .max(dev(matmul2(&p.grad_y, &p.grad_x)));
            out.cofactor_residual = out.cofactor_residual.max(dev(matmul2(&p.a, &p.b)));
        }
        out
    }
}
