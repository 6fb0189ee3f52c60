//! Executable inequality checks with measured slacks.
//!
//! Tolerances: `1e-9` for claims that hold exactly after discretization,
//! `1e-6` for radial-solver claims, 3% relative for anything involving FEM
//! eigenvalues. FEM-based reports turn `Inconclusive` when the disk benchmark
//! disagrees with the radial solver by more than the gate tolerance.

mod checks;
mod context;
mod report;
mod suite;

pub use checks::*;
pub use context::{Context, FemSettings, Gate, Solved};
pub use report::{rel_diff, CheckReport, Status, ABS_FLOOR};
pub use suite::{run_suite, SuiteConfig, SuiteReport, Summary, PRESETS};
