use serde::{Deserialize, Serialize};
use sprs::{FillInReduction, SymmetryCheck, TriMat};
use sprs_ldl::{Ldl, LdlNumeric};

use super::mesh::Mesh;
use super::quadrature::{GAUSS3, TRI6};
use super::robin::RobinSpec;
use crate::error::{Error, Result};
use crate::finsler::{NormFamily, NormSpec};

/// Stopping rule and knobs of the quotient minimizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Converged once the quotient decreased by less than `rel_tol` (relative)
    /// over the last `window` iterations.
    pub rel_tol: f64,
    pub window: usize,
    /// Use the sparse `LDLᵀ` preconditioner.
    pub precondition: bool,
    /// Optional starting nodal values; the constant start is kept if better.
    #[serde(skip)]
    pub initial: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 100_000,
            rel_tol: 1e-10,
            window: 25,
            precondition: true,
            initial: None,
        }
    }
}

impl SolverOptions {
    pub fn from_json(s: &str) -> Result<Self> {
        let o: SolverOptions = serde_json::from_str(s)?;
        o.validate()?;
        Ok(o)
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::InvalidInput(format!("rel_tol = {}", self.rel_tol)));
        }
        if self.window == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidInput("window and max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    Robin,
    Dirichlet,
}

/// Converged discrete eigenpair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenResult {
    pub ell1: f64,
    /// Nodal values, positive (zero on the boundary in Dirichlet mode), max-normalized to 1.
    pub u: Vec<f64>,
    pub iterations: usize,
    /// Quotient after each accepted step, starting with the initial guess.
    pub rq_history: Vec<f64>,
    /// `∫|u|^p` of the returned, max-normalized `u`.
    pub norm_p: f64,
    pub p: f64,
    pub mode: BoundaryMode,
    /// `β ≡ 0`: outside the positive-mass hypothesis.
    pub degenerate: bool,
}

impl EigenResult {
    pub fn header_json(&self, mesh: &Mesh) -> serde_json::Value {
        serde_json::json!({
            "schema": format!("{}/eigen-result/v1", crate::SCHEMA_PREFIX),
            "mode": self.mode,
            "p": self.p,
            "ell1": self.ell1,
            "iterations": self.iterations,
            "norm_p": self.norm_p,
            "degenerate": self.degenerate,
            "nodes": mesh.nodes().len(),
            "triangles": mesh.triangles().len(),
            "h": mesh.h(),
            "rq_history": self.rq_history,
        })
    }

    /// Columns `x,y,u`.
    pub fn to_csv(&self, mesh: &Mesh) -> String {
        let mut out = String::from("x,y,u\n");
        for (p, u) in mesh.nodes().iter().zip(&self.u) {
            out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", p[0], p[1], u));
        }
        out
    }
}

#[inline]
fn abs_pow(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x * x
    } else {
        x.abs().powf(p)
    }
}

/// `d|x|^p/dx`.
#[inline]
fn abs_pow_deriv(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        2.0 * x
    } else if x == 0.0 {
        0.0
    } else {
        p * x.signum() * x.abs().powf(p - 1.0)
    }
}

/// Precomputed discrete Rayleigh quotient on a mesh.
pub(crate) struct Discretization<'a> {
    pub mesh: &'a Mesh,
    pub norm: &'a NormSpec,
    pub p: f64,
    areas: Vec<f64>,
    grads: Vec<[[f64; 2]; 3]>,
    /// Boundary Gauss data: nodes and `w_q |e| β(x_q) F(ν)` per point.
    boundary: Vec<([usize; 2], [f64; 3])>,
    pub free: Vec<bool>,
}

pub(crate) struct Parts {
    pub energy: f64,
    pub boundary: f64,
    pub mass: f64,
}

impl Parts {
    pub fn quotient(&self) -> f64 {
        (self.energy + self.boundary) / self.mass
    }
}

impl<'a> Discretization<'a> {
    pub fn new(mesh: &'a Mesh, norm: &'a NormSpec, p: f64, robin: Option<&RobinSpec>) -> Result<Self> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        if norm.dim() != 2 {
            return Err(Error::InvalidInput(format!("FEM needs a planar norm, got n = {}", norm.dim())));
        }
        let nt = mesh.triangles().len();
        let mut areas = Vec::with_capacity(nt);
        let mut grads = Vec::with_capacity(nt);
        for k in 0..nt {
            let pts = mesh.triangle_points(k);
            let a = mesh.triangle_area(k);
            let mut g = [[0.0; 2]; 3];
            for i in 0..3 {
                let p1 = pts[(i + 1) % 3];
                let p2 = pts[(i + 2) % 3];
                g[i] = [(p1[1] - p2[1]) / (2.0 * a), (p2[0] - p1[0]) / (2.0 * a)];
            }
            areas.push(a);
            grads.push(g);
        }
        let nodes = mesh.nodes();
        let mut boundary = Vec::new();
        if let Some(robin) = robin {
            robin.validate()?;
            for e in mesh.boundary_edges() {
                let (a, b) = (nodes[e.nodes[0]], nodes[e.nodes[1]]);
                let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                let fnu = norm.value2(e.normal);
                let mut c = [0.0; 3];
                for (q, (s, w)) in GAUSS3.iter().enumerate() {
                    let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                    c[q] = w * len * fnu * robin.beta_at(norm, x);
                }
                boundary.push((e.nodes, c));
            }
        }
        let free = match robin {
            Some(_) => vec![true; nodes.len()],
            None => mesh.boundary_nodes().iter().map(|b| !b).collect(),
        };
        Ok(Discretization {
            mesh,
            norm,
            p,
            areas,
            grads,
            boundary,
            free,
        })
    }

    #[inline]
    fn tri_gradient(&self, k: usize, v: &[f64]) -> [f64; 2] {
        let t = self.mesh.triangles()[k];
        let g = &self.grads[k];
        [
            v[t[0]] * g[0][0] + v[t[1]] * g[1][0] + v[t[2]] * g[2][0],
            v[t[0]] * g[0][1] + v[t[1]] * g[1][1] + v[t[2]] * g[2][1],
        ]
    }

    pub fn parts(&self, v: &[f64]) -> Parts {
        let p = self.p;
        let mut energy = 0.0;
        let mut mass = 0.0;
        for (k, t) in self.mesh.triangles().iter().enumerate() {
            let a = self.areas[k];
            energy += a * abs_pow(self.norm.value2(self.tri_gradient(k, v)), p);
            let mut m = 0.0;
            for (l, w) in TRI6 {
                m += w * abs_pow(l[0] * v[t[0]] + l[1] * v[t[1]] + l[2] * v[t[2]], p);
            }
            mass += a * m;
        }
        let mut boundary = 0.0;
        for ([i, j], c) in &self.boundary {
            for (q, (s, _)) in GAUSS3.iter().enumerate() {
                boundary += c[q] * abs_pow((1.0 - s) * v[*i] + s * v[*j], p);
            }
        }
        Parts { energy, boundary, mass }
    }

    /// Quotient and its gradient (zero on pinned nodes).
    pub fn quotient_gradient(&self, v: &[f64], grad: &mut [f64]) -> f64 {
        let p = self.p;
        let n = v.len();
        let mut g_num = vec![0.0; n];
        let mut g_mass = vec![0.0; n];
        let mut energy = 0.0;
        let mut mass = 0.0;
        for (k, t) in self.mesh.triangles().iter().enumerate() {
            let a = self.areas[k];
            let gv = self.tri_gradient(k, v);
            let f = self.norm.value2(gv);
            if f > 0.0 {
                energy += a * abs_pow(f, p);
                let fx = self.norm.grad2(gv);
                let scale = a * p * f.powf(p - 1.0);
                for i in 0..3 {
                    let b = self.grads[k][i];
                    g_num[t[i]] += scale * (fx[0] * b[0] + fx[1] * b[1]);
                }
            }
            for (l, w) in TRI6 {
                let x = l[0] * v[t[0]] + l[1] * v[t[1]] + l[2] * v[t[2]];
                mass += a * w * abs_pow(x, p);
                let d = a * w * abs_pow_deriv(x, p);
                for i in 0..3 {
                    g_mass[t[i]] += d * l[i];
                }
            }
        }
        let mut boundary = 0.0;
        for ([i, j], c) in &self.boundary {
            for (q, (s, _)) in GAUSS3.iter().enumerate() {
                let x = (1.0 - s) * v[*i] + s * v[*j];
                boundary += c[q] * abs_pow(x, p);
                let d = c[q] * abs_pow_deriv(x, p);
                g_num[*i] += d * (1.0 - s);
                g_num[*j] += d * s;
            }
        }
        let j = (energy + boundary) / mass;
        for k in 0..n {
            grad[k] = if self.free[k] { (g_num[k] - j * g_mass[k]) / mass } else { 0.0 };
        }
        j
    }

    pub fn mass(&self, v: &[f64]) -> f64 {
        self.parts(v).mass
    }

    /// `K = S_G + B + σ M` restricted to free nodes, as an `LDLᵀ` factorization.
    fn preconditioner(&self, sigma: f64, index: &[Option<usize>], nfree: usize) -> Result<LdlNumeric<f64, usize>> {
        let g = match self.norm.family() {
            NormFamily::Ellipse { matrix, .. } => [[matrix[(0, 0)], matrix[(0, 1)]], [matrix[(1, 0)], matrix[(1, 1)]]],
            _ => [[1.0, 0.0], [0.0, 1.0]],
        };
        let mut tri = TriMat::new((nfree, nfree));
        for (k, t) in self.mesh.triangles().iter().enumerate() {
            let a = self.areas[k];
            let b = &self.grads[k];
            for i in 0..3 {
                let Some(ii) = index[t[i]] else { continue };
                for j in 0..3 {
                    let Some(jj) = index[t[j]] else { continue };
                    let gb = [g[0][0] * b[j][0] + g[0][1] * b[j][1], g[1][0] * b[j][0] + g[1][1] * b[j][1]];
                    let s = a * (b[i][0] * gb[0] + b[i][1] * gb[1]);
                    let m = a / 12.0 * if i == j { 2.0 } else { 1.0 };
                    tri.add_triplet(ii, jj, s + sigma * m);
                }
            }
        }
        for ([i, j], c) in &self.boundary {
            let (Some(ii), Some(jj)) = (index[*i], index[*j]) else { continue };
            let mut m = [[0.0; 2]; 2];
            for (q, (s, _)) in GAUSS3.iter().enumerate() {
                let phi = [1.0 - s, *s];
                for r in 0..2 {
                    for col in 0..2 {
                        m[r][col] += 2.0 * c[q] * phi[r] * phi[col];
                    }
                }
            }
            let ids = [ii, jj];
            for r in 0..2 {
                for col in 0..2 {
                    tri.add_triplet(ids[r], ids[col], m[r][col]);
                }
            }
        }
        let k = tri.to_csr::<usize>();
        Ldl::new()
            .check_symmetry(SymmetryCheck::DontCheckSymmetry)
            .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
            .numeric(k.view())
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))
    }
}

/// Discrete quotient `J[β, v]` of nodal values `v`.
pub fn rayleigh_quotient(mesh: &Mesh, norm: &NormSpec, p: f64, robin: &RobinSpec, v: &[f64]) -> Result<f64> {
    if v.len() != mesh.nodes().len() {
        return Err(Error::InvalidInput("nodal vector length mismatch".into()));
    }
    Ok(Discretization::new(mesh, norm, p, Some(robin))?.parts(v).quotient())
}

/// First Robin eigenvalue of the anisotropic p-Laplacian on `mesh`.
pub fn solve_robin(mesh: &Mesh, norm: &NormSpec, p: f64, robin: &RobinSpec, opts: &SolverOptions) -> Result<EigenResult> {
    let disc = Discretization::new(mesh, norm, p, Some(robin))?;
    let mut res = minimize(&disc, opts, BoundaryMode::Robin)?;
    res.degenerate = robin.is_degenerate();
    Ok(res)
}

/// First Dirichlet eigenvalue: the same minimization with boundary nodes pinned to 0.
pub fn solve_dirichlet(mesh: &Mesh, norm: &NormSpec, p: f64, opts: &SolverOptions) -> Result<EigenResult> {
    let disc = Discretization::new(mesh, norm, p, None)?;
    if !disc.free.iter().any(|&f| f) {
        return Err(Error::InvalidMesh("no interior nodes".into()));
    }
    minimize(&disc, opts, BoundaryMode::Dirichlet)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(disc: &Discretization, v: &mut [f64]) {
    let n = disc.mass(v);
    let s = n.powf(-1.0 / disc.p);
    v.iter_mut().for_each(|x| *x *= s);
}

fn minimize(disc: &Discretization, opts: &SolverOptions, mode: BoundaryMode) -> Result<EigenResult> {
    opts.validate()?;
    let n = disc.mesh.nodes().len();
    let mut v: Vec<f64> = disc.free.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect();
    if let Some(init) = &opts.initial {
        if init.len() != n || init.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("initial guess has wrong length or non-finite values".into()));
        }
        let cand: Vec<f64> = init.iter().zip(&disc.free).map(|(x, &f)| if f { x.abs() } else { 0.0 }).collect();
        if disc.mass(&cand) > 0.0 && disc.parts(&cand).quotient() < disc.parts(&v).quotient() {
            v = cand;
        }
    }

    let mut restarts = 0;
    loop {
        let (mut res, u) = descend(disc, opts, v.clone(), mode)?;
        let free_min = u
            .iter()
            .zip(&disc.free)
            .filter(|(_, &f)| f)
            .map(|(x, _)| *x)
            .fold(f64::INFINITY, f64::min);
        if free_min > 0.0 {
            let max = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            res.u = u.iter().map(|x| x / max).collect();
            res.norm_p = disc.mass(&res.u);
            return Ok(res);
        }
        if restarts >= 2 {
            return Err(Error::NegativePhase);
        }
        restarts += 1;
        v = u.iter().map(|x| x.abs().max(1e-3)).collect();
        for (x, &f) in v.iter_mut().zip(&disc.free) {
            if !f {
                *x = 0.0;
            }
        }
    }
}

fn descend(disc: &Discretization, opts: &SolverOptions, mut v: Vec<f64>, mode: BoundaryMode) -> Result<(EigenResult, Vec<f64>)> {
    let n = v.len();
    normalize(disc, &mut v);
    let mut grad = vec![0.0; n];
    let mut j = disc.quotient_gradient(&v, &mut grad);

    let index: Vec<Option<usize>> = {
        let mut next = 0;
        disc.free
            .iter()
            .map(|&f| {
                f.then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let nfree = index.iter().flatten().count();
    let diam2 = {
        let xs = disc.mesh.nodes();
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in xs {
            for c in 0..2 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        (hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)
    };
    let sigma = match mode {
        BoundaryMode::Robin => j.max(1.0 / diam2),
        BoundaryMode::Dirichlet => 0.0,
    };
    let precond = if opts.precondition {
        Some(disc.preconditioner(sigma, &index, nfree)?)
    } else {
        None
    };
    let apply = |g: &[f64]| -> Vec<f64> {
        match &precond {
            Some(ldl) => {
                let rhs: Vec<f64> = (0..n).filter_map(|k| index[k].map(|_| g[k])).collect();
                let z: Vec<f64> = ldl.solve(&rhs);
                let mut out = vec![0.0; n];
                for k in 0..n {
                    if let Some(i) = index[k] {
                        out[k] = z[i];
                    }
                }
                out
            }
            None => g.to_vec(),
        }
    };

    let mut history = vec![j];
    let mut z = apply(&grad);
    let mut gz = dot(&grad, &z);
    let mut d: Vec<f64> = z.iter().map(|x| -x).collect();
    let mut alpha: f64 = 1.0;
    let mut iterations = 0;
    let mut trial = vec![0.0; n];
    let mut since_restart = 0;

    let eval = |x: &[f64]| -> f64 {
        let q = disc.parts(x);
        if q.mass > 0.0 { q.quotient() } else { f64::INFINITY }
    };

    let converged = loop {
        if !(gz > 0.0) || j == 0.0 {
            break true;
        }
        if iterations >= opts.max_iterations {
            break false;
        }
        let k = history.len() - 1;
        if k >= opts.window {
            let old = history[k - opts.window];
            if old - j <= opts.rel_tol * j.abs() {
                break true;
            }
        }
        let mut slope = dot(&grad, &d);
        if !(slope < 0.0) {
            d = z.iter().map(|x| -x).collect();
            slope = -gz;
            since_restart = 0;
        }
        let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let dmax = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let step = |a: f64, out: &mut Vec<f64>| {
            for i in 0..n {
                out[i] = v[i] + a * d[i];
            }
        };
        let mut a1 = alpha.min(0.5 * vmax / dmax.max(1e-300));
        step(a1, &mut trial);
        let mut f1 = eval(&trial);
        let mut accepted: Option<(f64, f64)> = None;
        for _ in 0..60 {
            let curv = f1 - j - slope * a1;
            let a_star = if curv > 0.0 {
                (-slope * a1 * a1 / (2.0 * curv)).min(4.0 * a1)
            } else if f1 < j {
                2.0 * a1
            } else {
                0.25 * a1
            };
            step(a_star, &mut trial);
            let fs = eval(&trial);
            let (best_a, best_f) = if fs <= f1 { (a_star, fs) } else { (a1, f1) };
            if best_f <= j + 1e-4 * best_a * slope && best_f < j {
                accepted = Some((best_a, best_f));
                break;
            }
            a1 = 0.25 * best_a.min(a1);
            if a1 * dmax < 1e-16 * vmax {
                break;
            }
            step(a1, &mut trial);
            f1 = eval(&trial);
        }
        let Some((a, _)) = accepted else {
            if since_restart == 0 {
                // steepest preconditioned descent failed as well: at machine precision
                break true;
            }
            d = z.iter().map(|x| -x).collect();
            since_restart = 0;
            continue;
        };
        step(a, &mut trial);
        std::mem::swap(&mut v, &mut trial);
        normalize(disc, &mut v);
        alpha = (2.0 * a).max(1e-12);
        let new_j = disc.quotient_gradient(&v, &mut grad);
        iterations += 1;
        since_restart += 1;
        // renormalization can perturb the last bits; the history stays monotone
        j = new_j.min(j);
        history.push(j);

        let z_new = apply(&grad);
        let gz_new = dot(&grad, &z_new);
        let pr = (gz_new - dot(&grad, &z)) / gz;
        let beta = if since_restart >= 50 { 0.0 } else { pr.max(0.0) };
        if beta == 0.0 {
            since_restart = 0;
        }
        for i in 0..n {
            d[i] = -z_new[i] + beta * d[i];
        }
        z = z_new;
        gz = gz_new;
    };
    if !converged {
        return Err(Error::NoConvergence {
            iterations,
            last: j,
        });
    }
    debug_assert!(history.windows(2).all(|w| w[1] <= w[0]));
    Ok((
        EigenResult {
            ell1: j,
            u: Vec::new(),
            iterations,
            rq_history: history,
            norm_p: 1.0,
            p: disc.p,
            mode,
            degenerate: false,
        },
        v,
    ))
}
