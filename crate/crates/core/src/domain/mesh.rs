use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use crate::error::{Error, Result};
use crate::finsler::{Point, Polygon};

/// Schema tag of the mesh JSON format.
pub fn mesh_schema() -> String {
    format!("{}/mesh/v1", crate::SCHEMA_PREFIX)
}

/// Minimum angle requested from the mesher, in degrees.
pub const MIN_ANGLE_DEG: f64 = 25.0;

/// A boundary edge oriented so that the domain lies on its left.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    /// Outward Euclidean unit normal.
    pub normal: Point,
    /// Index of the polygon edge (boundary arc) this edge lies on.
    #[serde(default)]
    pub tag: usize,
}

/// Conforming P1 triangulation of a planar polygon.
///
/// JSON layout:
///
/// ```json
/// {
///   "schema": "aniso-robin/mesh/v1",
///   "nodes": [[x, y], ...],
///   "triangles": [[i, j, k], ...],
///   "boundary_edges": [{"nodes": [i, j], "normal": [nx, ny], "tag": 0}, ...]
/// }
/// ```
///
/// Triangles are counter-clockwise; `h` and the minimum angle are derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeshRepr", into = "MeshRepr")]
pub struct Mesh {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    h: f64,
    min_angle_deg: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshRepr {
    schema: String,
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    // derived quantities, written for convenience and ignored on input
    #[serde(default)]
    h: Option<f64>,
    #[serde(default)]
    min_angle_deg: Option<f64>,
}

impl TryFrom<MeshRepr> for Mesh {
    type Error = Error;
    fn try_from(r: MeshRepr) -> Result<Self> {
        if r.schema != mesh_schema() {
            return Err(Error::InvalidMesh(format!("unsupported schema {:?}", r.schema)));
        }
        Mesh::new(r.nodes, r.triangles, r.boundary_edges)
    }
}

impl From<Mesh> for MeshRepr {
    fn from(m: Mesh) -> Self {
        MeshRepr {
            schema: mesh_schema(),
            nodes: m.nodes,
            triangles: m.triangles,
            boundary_edges: m.boundary_edges,
            h: Some(m.h),
            min_angle_deg: Some(m.min_angle_deg),
        }
    }
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dist(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    d[0].hypot(d[1])
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn outward_normal(a: Point, b: Point) -> Point {
    let d = sub(b, a);
    let len = d[0].hypot(d[1]);
    [d[1] / len, -d[0] / len]
}

fn triangle_min_angle(p: [Point; 3]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..3 {
        let u = sub(p[(i + 1) % 3], p[i]);
        let v = sub(p[(i + 2) % 3], p[i]);
        let c = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
        m = m.min(c.clamp(-1.0, 1.0).acos());
    }
    m.to_degrees()
}

impl Mesh {
    /// Validates and assembles a mesh. Boundary edges must be exactly the
    /// triangle edges used once, with matching orientation and outward normals.
    pub fn new(nodes: Vec<Point>, triangles: Vec<[usize; 3]>, boundary_edges: Vec<BoundaryEdge>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        if nodes.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidMesh("non-finite node coordinate".into()));
        }
        let nn = nodes.len();
        let mut used = vec![false; nn];
        let mut edge_count: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        let mut h: f64 = 0.0;
        let mut min_angle = f64::INFINITY;
        let mut total = 0.0;
        for (k, t) in triangles.iter().enumerate() {
            if t.iter().any(|&i| i >= nn) {
                return Err(Error::InvalidMesh(format!("triangle {k} references a missing node")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::InvalidMesh(format!("triangle {k} repeats a node")));
            }
            let p = [nodes[t[0]], nodes[t[1]], nodes[t[2]]];
            let a = signed_area(p[0], p[1], p[2]);
            if !(a > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {k} has non-positive area {a:e} (must be counter-clockwise)"
                )));
            }
            total += a;
            min_angle = min_angle.min(triangle_min_angle(p));
            for i in 0..3 {
                used[t[i]] = true;
                let (u, v) = (t[i], t[(i + 1) % 3]);
                h = h.max(dist(nodes[u], nodes[v]));
                let e = edge_count.entry((u.min(v), u.max(v))).or_insert((0, [u, v]));
                e.0 += 1;
                if e.0 > 2 {
                    return Err(Error::InvalidMesh(format!("edge ({u}, {v}) shared by more than two triangles")));
                }
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!("node {i} belongs to no triangle")));
        }
        let expected: HashMap<(usize, usize), [usize; 2]> = edge_count
            .into_iter()
            .filter(|(_, (c, _))| *c == 1)
            .map(|(k, (_, o))| (k, o))
            .collect();
        if expected.len() != boundary_edges.len() {
            return Err(Error::InvalidMesh(format!(
                "{} boundary edges given, triangulation has {}",
                boundary_edges.len(),
                expected.len()
            )));
        }
        let mut seen = HashSet::new();
        let mut enclosed = 0.0;
        for (k, be) in boundary_edges.iter().enumerate() {
            let [u, v] = be.nodes;
            if u >= nn || v >= nn {
                return Err(Error::InvalidMesh(format!("boundary edge {k} references a missing node")));
            }
            let key = (u.min(v), u.max(v));
            match expected.get(&key) {
                Some(o) if *o == [u, v] => {}
                Some(_) => {
                    return Err(Error::InvalidMesh(format!("boundary edge {k} has reversed orientation")))
                }
                None => {
                    return Err(Error::InvalidMesh(format!("boundary edge {k} is not a free triangle edge")))
                }
            }
            if !seen.insert(key) {
                return Err(Error::InvalidMesh(format!("boundary edge {k} is duplicated")));
            }
            let n = outward_normal(nodes[u], nodes[v]);
            if !be.normal.iter().all(|c| c.is_finite())
                || (be.normal[0] - n[0]).abs() > 1e-6
                || (be.normal[1] - n[1]).abs() > 1e-6
            {
                return Err(Error::InvalidMesh(format!("boundary edge {k} normal is not the outward unit normal")));
            }
            enclosed += 0.5 * (nodes[u][0] * nodes[v][1] - nodes[u][1] * nodes[v][0]);
        }
        if (enclosed - total).abs() > 1e-9 * total.max(1e-300) {
            return Err(Error::InvalidMesh(format!(
                "boundary encloses area {enclosed} but triangles cover {total}"
            )));
        }
        Ok(Mesh {
            nodes,
            triangles,
            boundary_edges,
            h,
            min_angle_deg: min_angle,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("mesh serializes")
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    /// Longest edge, i.e. the largest triangle diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn min_angle_deg(&self) -> f64 {
        self.min_angle_deg
    }

    pub fn triangle_points(&self, k: usize) -> [Point; 3] {
        let t = self.triangles[k];
        [self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]]
    }

    pub fn triangle_area(&self, k: usize) -> f64 {
        let p = self.triangle_points(k);
        signed_area(p[0], p[1], p[2])
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|k| self.triangle_area(k)).sum()
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_edges
            .iter()
            .map(|e| dist(self.nodes[e.nodes[0]], self.nodes[e.nodes[1]]))
            .sum()
    }

    pub fn boundary_nodes(&self) -> Vec<bool> {
        let mut b = vec![false; self.nodes.len()];
        for e in &self.boundary_edges {
            b[e.nodes[0]] = true;
            b[e.nodes[1]] = true;
        }
        b
    }

    /// Copy scaled by `t` about the origin.
    pub fn dilated(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("dilation factor {t}")));
        }
        Ok(Mesh {
            nodes: self.nodes.iter().map(|p| [t * p[0], t * p[1]]).collect(),
            triangles: self.triangles.clone(),
            boundary_edges: self.boundary_edges.clone(),
            h: t * self.h,
            min_angle_deg: self.min_angle_deg,
        })
    }
}

fn seg_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = sub(b, a);
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * d[0], a[1] + t * d[1]])
}

/// Quality triangulation of `poly` with every edge at most `h_target`.
///
/// Constrained Delaunay refinement with a 25° angle bound, rerun with
/// decreasing area caps until the edge bound holds.
pub fn triangulate(poly: &Polygon, h_target: f64) -> Result<Mesh> {
    if !(h_target > 0.0) || !h_target.is_finite() {
        return Err(Error::InvalidInput(format!("h_target = {h_target}")));
    }
    let area = poly.area();
    let est_nodes = 2.0 * area / (0.433 * h_target * h_target) + poly.perimeter() / h_target;
    if est_nodes > 4.0e6 {
        return Err(Error::MeshFailure(format!(
            "h = {h_target} would need about {est_nodes:.0} nodes"
        )));
    }
    // Pre-split boundary points on slanted edges are not exactly collinear and
    // leave input angles near 180° that the refinement cannot repair.
    let verts: Vec<Point2<f64>> = poly.vertices().iter().map(|v| Point2::new(v[0], v[1])).collect();
    let nb = verts.len();
    let edges: Vec<[usize; 2]> = (0..nb).map(|i| [i, (i + 1) % nb]).collect();
    let base: ConstrainedDelaunayTriangulation<Point2<f64>> =
        ConstrainedDelaunayTriangulation::bulk_load_cdt(verts, edges)
            .map_err(|e| Error::MeshFailure(format!("{e:?}")))?;

    let mut max_area = 0.25 * h_target * h_target;
    let budget = (8.0 * est_nodes) as usize + 10_000;
    for _ in 0..20 {
        let mut cdt = base.clone();
        let res = cdt.refine(
            RefinementParameters::<f64>::new()
                .with_max_allowed_area(max_area)
                .with_angle_limit(AngleLimit::from_deg(MIN_ANGLE_DEG))
                .exclude_outer_faces(true)
                .with_max_additional_vertices(budget),
        );
        if !res.refinement_complete {
            return Err(Error::MeshFailure("refinement vertex budget exhausted".into()));
        }
        let excluded: HashSet<usize> = res.excluded_faces.iter().map(|f| f.index()).collect();
        let mut index = HashMap::new();
        let mut nodes = Vec::new();
        let mut triangles = Vec::new();
        for face in cdt.inner_faces() {
            if excluded.contains(&face.fix().index()) {
                continue;
            }
            let mut tri = [0usize; 3];
            for (slot, v) in face.vertices().iter().enumerate() {
                let id = v.fix().index();
                tri[slot] = *index.entry(id).or_insert_with(|| {
                    let p = v.position();
                    nodes.push([p.x, p.y]);
                    nodes.len() - 1
                });
            }
            if signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]) < 0.0 {
                tri.swap(1, 2);
            }
            triangles.push(tri);
        }
        let boundary = boundary_from_triangles(&nodes, &triangles, poly)?;
        let mesh = Mesh::new(nodes, triangles, boundary)?;
        if mesh.h <= h_target {
            return Ok(mesh);
        }
        max_area *= 0.8;
    }
    Err(Error::MeshFailure(format!("could not reach h <= {h_target}")))
}

fn boundary_from_triangles(nodes: &[Point], triangles: &[[usize; 3]], poly: &Polygon) -> Result<Vec<BoundaryEdge>> {
    let mut count: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
    for t in triangles {
        for i in 0..3 {
            let (u, v) = (t[i], t[(i + 1) % 3]);
            count.entry((u.min(v), u.max(v))).or_insert((0, [u, v])).0 += 1;
        }
    }
    let tol = 1e-9 * poly.diameter();
    let mut out: Vec<BoundaryEdge> = Vec::new();
    let mut keys: Vec<_> = count.into_iter().filter(|(_, (c, _))| *c == 1).collect();
    keys.sort_by_key(|(k, _)| *k);
    for (_, (_, [u, v])) in keys {
        let mid = [0.5 * (nodes[u][0] + nodes[v][0]), 0.5 * (nodes[u][1] + nodes[v][1])];
        let (tag, d) = poly
            .edges()
            .enumerate()
            .map(|(i, e)| (i, seg_distance(mid, e.start, e.end)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("polygon has edges");
        if d > tol {
            return Err(Error::MeshFailure(format!("boundary edge off the polygon by {d:e}")));
        }
        out.push(BoundaryEdge {
            nodes: [u, v],
            normal: outward_normal(nodes[u], nodes[v]),
            tag,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_area() {
        let sq = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let m = triangulate(&sq, 0.1).unwrap();
        assert!((m.area() - 1.0).abs() < 1e-12);
        assert!(m.h() <= 0.1);
        assert!(m.min_angle_deg() >= MIN_ANGLE_DEG - 1e-6, "{}", m.min_angle_deg());
        assert!((m.boundary_length() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_on_polygon_edges() {
        let poly = Polygon::regular(64, 1.0, [0.0, 0.0], 0.0).unwrap();
        let m = triangulate(&poly, 0.05).unwrap();
        for be in m.boundary_edges() {
            let e = poly.edge(be.tag);
            for &i in &be.nodes {
                assert!(seg_distance(m.nodes()[i], e.start, e.end) < 1e-12);
            }
            assert!((be.normal[0] - e.normal[0]).abs() < 1e-9 && (be.normal[1] - e.normal[1]).abs() < 1e-9);
        }
        assert!((m.area() - poly.area()).abs() < 1e-12);
    }

    #[test]
    fn refinement_quadruples_nodes() {
        let sq = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let a = triangulate(&sq, 0.1).unwrap().nodes().len() as f64;
        let b = triangulate(&sq, 0.05).unwrap().nodes().len() as f64;
        let ratio = b / a;
        assert!(ratio > 2.8 && ratio < 5.5, "{ratio}");
    }

    #[test]
    fn json_round_trip() {
        let sq = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let m = triangulate(&sq, 0.3).unwrap();
        let back = Mesh::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_meshes() {
        let nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let be = |a, b| BoundaryEdge {
            nodes: [a, b],
            normal: outward_normal(nodes[a], nodes[b]),
            tag: 0,
        };
        let good = vec![be(0, 1), be(1, 2), be(2, 0)];
        assert!(Mesh::new(nodes.clone(), vec![[0, 1, 2]], good.clone()).is_ok());
        assert!(Mesh::new(nodes.clone(), vec![[0, 2, 1]], good.clone()).is_err());
        assert!(Mesh::new(nodes.clone(), vec![[0, 1, 2]], good[..2].to_vec()).is_err());
        assert!(Mesh::new(nodes.clone(), vec![[0, 1, 5]], good.clone()).is_err());
        let mut flipped = good.clone();
        flipped[0].normal = [0.0, 1.0];
        assert!(Mesh::new(nodes.clone(), vec![[0, 1, 2]], flipped).is_err());
        assert!(Mesh::from_json(r#"{"schema":"other","nodes":[],"triangles":[],"boundary_edges":[]}"#).is_err());
    }
}
