use thiserror::Error;

/// Errors produced by the solvers and geometry routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFiniteInput(&'static str),
    #[error("gradient requested at the origin")]
    GradientAtOrigin,
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("degenerate norm: {0}")]
    DegenerateNorm(String),
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid exponent p = {0} (need p > 1)")]
    InvalidExponent(f64),
    #[error("ODE integration failed: {0}")]
    IntegrationFailure(String),
    #[error("could not bracket the eigenvalue: {0}")]
    BracketingFailure(String),
    #[error("tolerance not met: residual {residual:e} > {tol:e}")]
    ToleranceNotMet { residual: f64, tol: f64 },
    #[error("mesh generation failed: {0}")]
    MeshFailure(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("no convergence after {iterations} iterations (last quotient {last:e})")]
    NoConvergence { iterations: usize, last: f64 },
    #[error("iterate lost positivity")]
    NegativePhase,
    #[error("level set {{u > {0}}} is empty")]
    EmptyLevelSet(f64),
    #[error("level line at t = {0} is degenerate")]
    DegenerateLevelLine(f64),
    #[error("domain is not convex")]
    NonConvexDomain,
    #[error("containment violated: {0}")]
    ContainmentViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
    /// A failure replayed from a shared cache of solver runs.
    #[error("{0}")]
    Upstream(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
