use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::domain::{presets, solve_dirichlet, solve_robin, triangulate, EigenResult, Mesh, RobinSpec, SolverOptions};
use crate::error::{Error, Result};
use crate::finsler::{NormSpec, Polygon};
use crate::radial::{solve_radial, RadialProblem};

/// Discretization settings shared by every FEM-based check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FemSettings {
    /// Target mesh size on domains of unit scale.
    pub h: f64,
    pub solver: SolverOptions,
    /// Allowed relative disk-vs-radial mismatch before FEM checks turn inconclusive.
    pub gate_tol: f64,
}

impl Default for FemSettings {
    fn default() -> Self {
        FemSettings {
            h: 0.05,
            solver: SolverOptions::default(),
            gate_tol: 0.02,
        }
    }
}

/// A mesh and the eigenpair computed on it.
#[derive(Debug)]
pub struct Solved {
    pub mesh: Arc<Mesh>,
    pub eig: EigenResult,
}

impl Solved {
    pub fn provenance(&self, label: &str) -> String {
        format!(
            "{label}: {:?} ell1={:.12e} nodes={} h={:.4} iterations={}",
            self.eig.mode,
            self.eig.ell1,
            self.mesh.nodes().len(),
            self.mesh.h(),
            self.eig.iterations
        )
    }
}

type Cell<T> = Arc<OnceLock<std::result::Result<Arc<T>, String>>>;

/// Compute-once map; concurrent callers of the same key wait for one computation.
struct Memo<T> {
    map: Mutex<HashMap<String, Cell<T>>>,
}

impl<T> Memo<T> {
    fn new() -> Self {
        Memo {
            map: Mutex::new(HashMap::new()),
        }
    }

    fn get(&self, key: String, f: impl FnOnce() -> Result<T>) -> Result<Arc<T>> {
        let cell = self.map.lock().expect("memo lock").entry(key).or_default().clone();
        cell.get_or_init(|| f().map(Arc::new).map_err(|e| e.to_string()))
            .clone()
            .map_err(Error::Upstream)
    }
}

/// Outcome of the disk-vs-radial regression that gates FEM checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gate {
    pub fem: f64,
    pub radial: f64,
    pub rel_err: f64,
    pub passed: bool,
}

/// Shared state of a verification run: settings plus caches of meshes and solves.
pub struct Context {
    pub fem: FemSettings,
    meshes: Memo<Mesh>,
    solves: Memo<Solved>,
    gate: OnceLock<std::result::Result<Gate, String>>,
}

impl Context {
    pub fn new(fem: FemSettings) -> Self {
        Context {
            fem,
            meshes: Memo::new(),
            solves: Memo::new(),
            gate: OnceLock::new(),
        }
    }

    pub fn mesh(&self, poly: &Polygon) -> Result<Arc<Mesh>> {
        let key = format!("{}|{}", poly.to_json(), self.fem.h);
        self.meshes.get(key, || triangulate(poly, self.fem.h))
    }

    pub fn robin(&self, poly: &Polygon, norm: &NormSpec, p: f64, robin: &RobinSpec) -> Result<Arc<Solved>> {
        let mesh = self.mesh(poly)?;
        let key = format!("robin|{}|{}|{}|{}|{}", poly.to_json(), self.fem.h, norm.to_json(), p, robin.to_json());
        self.solves.get(key, || {
            let eig = solve_robin(&mesh, norm, p, robin, &self.fem.solver)?;
            Ok(Solved { mesh: mesh.clone(), eig })
        })
    }

    pub fn dirichlet(&self, poly: &Polygon, norm: &NormSpec, p: f64) -> Result<Arc<Solved>> {
        let mesh = self.mesh(poly)?;
        let key = format!("dirichlet|{}|{}|{}|{}", poly.to_json(), self.fem.h, norm.to_json(), p);
        self.solves.get(key, || {
            let eig = solve_dirichlet(&mesh, norm, p, &self.fem.solver)?;
            Ok(Solved { mesh: mesh.clone(), eig })
        })
    }

    /// Euclidean disk `R = 1`, `p = 2`, `β̄ = 1` against the radial value.
    pub fn gate(&self) -> Result<Gate> {
        self.gate
            .get_or_init(|| self.compute_gate().map_err(|e| e.to_string()))
            .clone()
            .map_err(Error::Upstream)
    }

    fn compute_gate(&self) -> Result<Gate> {
        let e = NormSpec::euclidean(2)?;
        let disk = presets::disk(256, 1.0)?;
        let fem = self.robin(&disk, &e, 2.0, &RobinSpec::constant(1.0)?)?.eig.ell1;
        let radial = solve_radial(&RadialProblem::new(2.0, 2, 1.0, 1.0)?, 1e-10)?.ell1;
        let rel_err = (fem - radial).abs() / radial;
        Ok(Gate {
            fem,
            radial,
            rel_err,
            passed: rel_err <= self.fem.gate_tol,
        })
    }

    /// `true` unless the gate ran and failed; a gate error counts as failure.
    pub fn gate_passed(&self) -> bool {
        self.gate().map(|g| g.passed).unwrap_or(false)
    }
}
