//! Superlevel sets `U_t = {u > t}` of P1 functions by marching triangles.

use serde::Serialize;

use super::fem::EigenResult;
use super::mesh::Mesh;
use super::quadrature::{GAUSS3, TRI6};
use super::robin::RobinSpec;
use crate::error::{Error, Result};
use crate::finsler::{NormSpec, Point};

/// Clipped pieces of a mesh at level `t`.
pub(crate) struct Cut {
    /// Triangle index and the convex polygon `T ∩ U_t`.
    pub pieces: Vec<(usize, Vec<Point>)>,
    /// Triangle index and the level segment `T ∩ {u = t}`.
    pub segments: Vec<(usize, Point, Point)>,
    /// Boundary edge index and the part of it inside `U_t`.
    pub boundary: Vec<(usize, Point, Point)>,
}

fn lerp(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

pub(crate) fn polygon_area(p: &[Point]) -> f64 {
    let n = p.len();
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (p[i], p[(i + 1) % n]);
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

/// Moves `t` off nodal values by steps of `1e-9`.
pub(crate) fn perturbed_level(u: &[f64], t: f64) -> Result<f64> {
    let mut t = t;
    for _ in 0..1000 {
        if u.iter().all(|&x| (x - t).abs() >= 1e-9) {
            return Ok(t);
        }
        t += 1e-9;
    }
    Err(Error::DegenerateLevelLine(t))
}

pub(crate) fn cut(mesh: &Mesh, u: &[f64], t: f64) -> Cut {
    let nodes = mesh.nodes();
    let mut pieces = Vec::new();
    let mut segments = Vec::new();
    for (k, tri) in mesh.triangles().iter().enumerate() {
        let vals = [u[tri[0]] - t, u[tri[1]] - t, u[tri[2]] - t];
        let inside = vals.map(|v| v > 0.0);
        if !inside.iter().any(|&b| b) {
            continue;
        }
        let pts = [nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]];
        if inside.iter().all(|&b| b) {
            pieces.push((k, pts.to_vec()));
            continue;
        }
        let mut poly = Vec::with_capacity(4);
        let mut crossings = Vec::with_capacity(2);
        for i in 0..3 {
            let j = (i + 1) % 3;
            if inside[i] {
                poly.push(pts[i]);
            }
            if inside[i] != inside[j] {
                let x = lerp(pts[i], pts[j], vals[i] / (vals[i] - vals[j]));
                poly.push(x);
                crossings.push(x);
            }
        }
        pieces.push((k, poly));
        if crossings.len() == 2 {
            segments.push((k, crossings[0], crossings[1]));
        }
    }
    let mut boundary = Vec::new();
    for (e, be) in mesh.boundary_edges().iter().enumerate() {
        let (a, b) = (nodes[be.nodes[0]], nodes[be.nodes[1]]);
        let (va, vb) = (u[be.nodes[0]] - t, u[be.nodes[1]] - t);
        match (va > 0.0, vb > 0.0) {
            (true, true) => boundary.push((e, a, b)),
            (true, false) => boundary.push((e, a, lerp(a, b, va / (va - vb)))),
            (false, true) => boundary.push((e, lerp(a, b, va / (va - vb)), b)),
            (false, false) => {}
        }
    }
    Cut {
        pieces,
        segments,
        boundary,
    }
}

impl Cut {
    pub fn area(&self) -> f64 {
        self.pieces.iter().map(|(_, p)| polygon_area(p)).sum()
    }

    /// `∫_{U_t} f(k, x)` with the six-point rule on a fan of each piece.
    pub fn integrate(&self, f: impl Fn(usize, Point) -> f64) -> f64 {
        let mut s = 0.0;
        for (k, p) in &self.pieces {
            for i in 1..p.len() - 1 {
                let tri = [p[0], p[i], p[i + 1]];
                let a = polygon_area(&tri);
                for (l, w) in TRI6 {
                    let x = [
                        l[0] * tri[0][0] + l[1] * tri[1][0] + l[2] * tri[2][0],
                        l[0] * tri[0][1] + l[1] * tri[1][1] + l[2] * tri[2][1],
                    ];
                    s += a * w * f(*k, x);
                }
            }
        }
        s
    }

    /// `∫_{∂U_t ∩ ∂Ω} β F(ν)`.
    pub fn boundary_integral(&self, mesh: &Mesh, norm: &NormSpec, robin: &RobinSpec) -> f64 {
        self.boundary
            .iter()
            .map(|(e, a, b)| robin.segment_integral(norm, *a, *b, mesh.boundary_edges()[*e].normal))
            .sum()
    }

    /// `∫_{S_t} g F(ν)` with `ν = -∇u/|∇u|` and `g` sampled at three Gauss points.
    pub fn level_integral(&self, norm: &NormSpec, grad: impl Fn(usize) -> Point, g: impl Fn(usize, Point) -> f64) -> f64 {
        let mut s = 0.0;
        for (k, a, b) in &self.segments {
            let gu = grad(*k);
            let len_g = gu[0].hypot(gu[1]);
            if len_g == 0.0 {
                continue;
            }
            let fnu = norm.value2([-gu[0] / len_g, -gu[1] / len_g]);
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            let avg: f64 = GAUSS3.iter().map(|(x, w)| w * g(*k, lerp(*a, *b, *x))).sum();
            s += avg * len * fnu;
        }
        s
    }

    /// `P_F(U_t) = ∫_{S_t} F(ν) + ∫_{Γ_t} F(ν)`.
    pub fn perimeter(&self, mesh: &Mesh, norm: &NormSpec, grad: impl Fn(usize) -> Point) -> f64 {
        let one = RobinSpec::Constant { beta: 1.0 };
        self.level_integral(norm, grad, |_, _| 1.0) + self.boundary_integral(mesh, norm, &one)
    }
}

/// Gradient of the P1 interpolant of `u` on triangle `k`.
pub(crate) fn p1_gradient(mesh: &Mesh, u: &[f64], k: usize) -> Point {
    let t = mesh.triangles()[k];
    let p = mesh.triangle_points(k);
    let a2 = 2.0 * mesh.triangle_area(k);
    let mut g = [0.0; 2];
    for i in 0..3 {
        let p1 = p[(i + 1) % 3];
        let p2 = p[(i + 2) % 3];
        g[0] += u[t[i]] * (p1[1] - p2[1]) / a2;
        g[1] += u[t[i]] * (p2[0] - p1[0]) / a2;
    }
    g
}

fn p1_value(mesh: &Mesh, u: &[f64], k: usize, x: Point) -> f64 {
    let t = mesh.triangles()[k];
    let p0 = mesh.nodes()[t[0]];
    let g = p1_gradient(mesh, u, k);
    u[t[0]] + g[0] * (x[0] - p0[0]) + g[1] * (x[1] - p0[1])
}

/// Test field `φ` in the representation functional.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Phi {
    /// `φ = F(∇u)^{p-1} / u^{p-1}` from the eigenfunction itself.
    Eigen,
    Constant(f64),
}

/// Terms of `ℱ(U_t, φ) = (-(p-1)∫_{U_t} φ^{p'} + ∫_{S_t} φ F(ν) + ∫_{Γ_t} β F(ν)) / |U_t|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Representation {
    /// Level actually used after perturbation off nodal values.
    pub t: f64,
    pub value: f64,
    pub area: f64,
    pub volume_term: f64,
    pub level_term: f64,
    pub boundary_term: f64,
}

/// `ℱ(U_t, φ)` with `φ` built from the eigenfunction; approximates `ell1` for every `t`.
pub fn representation_functional(
    mesh: &Mesh,
    norm: &NormSpec,
    p: f64,
    robin: &RobinSpec,
    eig: &EigenResult,
    t: f64,
) -> Result<f64> {
    Ok(representation_functional_with(mesh, norm, p, robin, eig, t, Phi::Eigen)?.value)
}

/// Levels below `min u` are accepted: then `U_t = Ω` and the formula still holds.
pub fn representation_functional_with(
    mesh: &Mesh,
    norm: &NormSpec,
    p: f64,
    robin: &RobinSpec,
    eig: &EigenResult,
    t: f64,
    phi: Phi,
) -> Result<Representation> {
    if !p.is_finite() || p <= 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let u = &eig.u;
    if u.len() != mesh.nodes().len() {
        return Err(Error::InvalidInput("eigenfunction does not match the mesh".into()));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("level t = {t} must be positive")));
    }
    let umax = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if t >= umax {
        return Err(Error::EmptyLevelSet(t));
    }
    let t = perturbed_level(u, t)?;
    if t >= umax {
        return Err(Error::EmptyLevelSet(t));
    }
    let c = cut(mesh, u, t);
    let area = c.area();
    if !(area > 0.0) {
        return Err(Error::EmptyLevelSet(t));
    }
    let pc = p / (p - 1.0);
    let grads: Vec<Point> = (0..mesh.triangles().len()).map(|k| p1_gradient(mesh, u, k)).collect();
    let (volume, level) = match phi {
        Phi::Eigen => {
            let vol = c.integrate(|k, x| {
                let fg = norm.value2(grads[k]);
                (fg / p1_value(mesh, u, k, x)).powf(p)
            });
            let lvl = c.level_integral(norm, |k| grads[k], |k, _| (norm.value2(grads[k]) / t).powf(p - 1.0));
            (vol, lvl)
        }
        Phi::Constant(v) => {
            if !(v >= 0.0) {
                return Err(Error::InvalidInput(format!("constant test field {v}")));
            }
            (v.powf(pc) * area, v * c.level_integral(norm, |k| grads[k], |_, _| 1.0))
        }
    };
    let boundary = c.boundary_integral(mesh, norm, robin);
    let volume_term = -(p - 1.0) * volume;
    Ok(Representation {
        t,
        value: (volume_term + level + boundary) / area,
        area,
        volume_term,
        level_term: level,
        boundary_term: boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::mesh::triangulate;
    use crate::finsler::Polygon;

    #[test]
    fn cone_level_sets() {
        let poly = Polygon::regular(128, 1.0, [0.0, 0.0], 0.0).unwrap();
        let mesh = triangulate(&poly, 0.05).unwrap();
        let u: Vec<f64> = mesh.nodes().iter().map(|x| 1.0 - x[0].hypot(x[1])).collect();
        let c = cut(&mesh, &u, 0.5);
        let a = c.area();
        assert!((a - std::f64::consts::PI * 0.25).abs() < 5e-3, "{a}");
        assert!(c.boundary.is_empty());
        let e = NormSpec::euclidean(2).unwrap();
        let per = c.perimeter(&mesh, &e, |k| p1_gradient(&mesh, &u, k));
        assert!((per - std::f64::consts::PI).abs() < 5e-3, "{per}");
        let whole = cut(&mesh, &u, -1.0);
        assert!((whole.area() - mesh.area()).abs() < 1e-12);
        assert!((whole.perimeter(&mesh, &e, |k| p1_gradient(&mesh, &u, k)) - mesh.boundary_length()).abs() < 1e-12);
    }

    #[test]
    fn perturbs_nodal_levels() {
        let u = [0.5, 0.25, 1.0];
        let t = perturbed_level(&u, 0.5).unwrap();
        assert!(t > 0.5 && (t - 0.5) < 1e-8);
    }
}
