//! Finite elements on planar polygons and Cheeger-type geometry.

mod fem;
mod geometry;
mod levelset;
mod mesh;
pub mod presets;
mod quadrature;
mod robin;

pub use fem::{rayleigh_quotient, solve_dirichlet, solve_robin, BoundaryMode, EigenResult, SolverOptions};
pub use geometry::{cheeger_bounds, inradius_f, weighted_cheeger, wulff_radius, CheegerBounds, WeightedCheeger};
pub use levelset::{representation_functional, representation_functional_with, Phi, Representation};
pub use mesh::{mesh_schema, triangulate, BoundaryEdge, Mesh, MIN_ANGLE_DEG};
pub use quadrature::{GAUSS3, TRI6};
pub use robin::{RobinSpec, Weight};
