//! Changes of variables between the flat strip, the reference domain and the
//! moving domain; Jacobian fields; transformed differential operators.

pub mod fields;
pub mod flat_ops;
pub mod jacobians;
pub mod sobolev;
pub mod transform;

pub use fields::{FluidField, PressureField, StripGrid};
pub use flat_ops::{apply_d_trace, apply_g, apply_l};
pub use jacobians::{point_jacobians, PointJacobians, ZetaJet};
pub use sobolev::{scalar_sobolev_gram, velocity_sobolev_gram};
pub use transform::{build_transform, build_transform_on, TransformOps, CONTACT_TOL};
