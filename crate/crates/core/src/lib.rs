//! First Robin eigenvalue of the anisotropic p-Laplacian
//!
//! ```text
//!   -div( F^{p-1}(∇u) F_ξ(∇u) ) = ℓ |u|^{p-2} u          in Ω
//!   F^{p-1}(∇u) F_ξ(∇u)·ν + β F(ν) |u|^{p-2} u = 0     on ∂Ω
//! ```
//!
//! The crate is split into four layers:
//!
//! - [`finsler`]: Finsler norms with closed-form polars and gradients, polygons,
//!   Wulff shapes and anisotropic perimeter.
//! - [`radial`]: shooting solver for the radial problem on Wulff shapes, where
//!   the eigenvalue depends only on `(p, n, R, β̄)`.
//! - [`domain`]: P1 finite elements on triangulated polygons, minimizing the
//!   Rayleigh quotient directly, plus level-set and Cheeger-type geometry.
//! - [`verify`]: executable inequality checks producing [`verify::CheckReport`]s.

pub mod domain;
pub mod error;
pub mod finsler;
pub mod radial;
pub mod verify;

pub use error::{Error, Result};
pub use finsler::{NormSpec, Polygon};

/// Version tag written into every JSON artifact.
pub const SCHEMA_PREFIX: &str = "aniso-robin";
