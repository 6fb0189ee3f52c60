//! Finsler norms, polygons and Wulff shapes.

mod identities;
mod norm;
mod polygon;

pub use identities::{verify_norm_identities, IdentityReport, AXIS_TUBE};
pub use norm::{unit_ball_volume, NormEval, NormFamily, NormSpec};
pub use polygon::{anisotropic_perimeter, wulff_polygon, Edge, Point, Polygon};
