use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::NormSpec;
use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Simple closed polygon with counter-clockwise vertex order.
///
/// The closing edge from the last vertex back to the first is implicit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl TryFrom<Vec<Point>> for Polygon {
    type Error = Error;
    fn try_from(v: Vec<Point>) -> Result<Self> {
        Polygon::new(v)
    }
}

impl From<Polygon> for Vec<Point> {
    fn from(p: Polygon) -> Self {
        p.vertices
    }
}

/// One polygon edge with its outward Euclidean unit normal.
#[derive(Clone, Copy, Debug)]
pub struct Edge {
    pub start: Point,
    pub end: Point,
    pub normal: Point,
    pub length: f64,
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Point, b: Point, c: Point, d: f64| {
        d == 0.0
            && c[0] >= a[0].min(b[0])
            && c[0] <= a[0].max(b[0])
            && c[1] >= a[1].min(b[1])
            && c[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

impl Polygon {
    /// Validates finiteness, edge lengths, orientation and simplicity.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        Self::validate_basic(&vertices)?;
        if signed_area(&vertices) <= 0.0 {
            return Err(Error::InvalidPolygon(
                "vertices must be counter-clockwise with positive area".into(),
            ));
        }
        let n = vertices.len();
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            for j in i + 1..n {
                // adjacent edges share a vertex
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return Err(Error::InvalidPolygon(format!(
                        "edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(Self { vertices })
    }

    /// Like [`Polygon::new`] but reverses clockwise input.
    pub fn new_any_orientation(mut vertices: Vec<Point>) -> Result<Self> {
        Self::validate_basic(&vertices)?;
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Self::new(vertices)
    }

    /// Skips the O(N²) simplicity test; used for polygons convex by construction.
    pub(crate) fn new_convex_unchecked(vertices: Vec<Point>) -> Result<Self> {
        Self::validate_basic(&vertices)?;
        if signed_area(&vertices) <= 0.0 {
            return Err(Error::InvalidPolygon("non-positive area".into()));
        }
        Ok(Self { vertices })
    }

    fn validate_basic(vertices: &[Point]) -> Result<()> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput("polygon vertex"));
        }
        let n = vertices.len();
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            if a == b || (b[0] - a[0]).hypot(b[1] - a[1]) == 0.0 {
                return Err(Error::DegeneratePolygon(format!("edge {i} has zero length")));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polygon serializes")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, i: usize) -> Edge {
        let n = self.vertices.len();
        let start = self.vertices[i];
        let end = self.vertices[(i + 1) % n];
        let (dx, dy) = (end[0] - start[0], end[1] - start[1]);
        let length = dx.hypot(dy);
        Edge {
            start,
            end,
            normal: [dy / length, -dx / length],
            length,
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.vertices.len()).map(move |i| self.edge(i))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Euclidean perimeter.
    pub fn perimeter(&self) -> f64 {
        self.edges().map(|e| e.length).sum()
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let w = a[0] * b[1] - b[0] * a[1];
            cx += (a[0] + b[0]) * w;
            cy += (a[1] + b[1]) * w;
        }
        let a6 = 6.0 * self.area();
        [cx / a6, cy / a6]
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        d
    }

    /// Convex up to a relative tolerance on the turning cross products.
    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        let scale = self.diameter().powi(2);
        (0..n).all(|i| {
            cross(
                self.vertices[i],
                self.vertices[(i + 1) % n],
                self.vertices[(i + 2) % n],
            ) >= -1e-12 * scale
        })
    }

    /// Even-odd point-in-polygon test (boundary points may go either way).
    pub fn contains(&self, p: Point) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[j]);
            if (a[1] > p[1]) != (b[1] > p[1])
                && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]
            {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    /// Image under `x -> scale * x + shift`.
    pub fn transformed(&self, scale: f64, shift: Point) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidInput(format!("scale {scale} must be positive")));
        }
        Ok(Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| [scale * v[0] + shift[0], scale * v[1] + shift[1]])
                .collect(),
        })
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    }

    /// Regular `k`-gon inscribed in the circle of radius `r` around `center`.
    pub fn regular(k: usize, r: f64, center: Point, phase: f64) -> Result<Self> {
        let v = (0..k)
            .map(|i| {
                let th = phase + 2.0 * PI * i as f64 / k as f64;
                [center[0] + r * th.cos(), center[1] + r * th.sin()]
            })
            .collect();
        Self::new_convex_unchecked(v)
    }
}

/// `P_F(K) = Σ_e F(ν_e) |e|` for a polygon `K`.
pub fn anisotropic_perimeter(norm: &NormSpec, poly: &Polygon) -> f64 {
    poly.edges()
        .map(|e| norm.value2(e.normal) * e.length)
        .sum()
}

/// Inscribed polygonal approximation of `𝒲_R(center) = {F°(x - center) < R}`.
///
/// Vertex `k` is `center + R F_ξ(ν_k)` with `ν_k` the unit vector at angle
/// `2πk/N`; these points satisfy `F°(F_ξ(ν)) = 1`, so they lie on `∂𝒲_R`.
pub fn wulff_polygon(norm: &NormSpec, radius: f64, center: Point, sides: usize) -> Result<Polygon> {
    if norm.dim() != 2 {
        return Err(Error::InvalidInput("Wulff polygons need n = 2".into()));
    }
    if sides < 16 {
        return Err(Error::InvalidInput(format!("need N >= 16, got {sides}")));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("radius {radius} must be positive")));
    }
    if center.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFiniteInput("Wulff center"));
    }
    let mut v = Vec::with_capacity(sides);
    for k in 0..sides {
        let th = 2.0 * PI * k as f64 / sides as f64;
        let g = norm.grad2([th.cos(), th.sin()]);
        if !g[0].is_finite() || !g[1].is_finite() {
            return Err(Error::DegenerateNorm(format!("F_ξ not finite at angle {th}")));
        }
        v.push([center[0] + radius * g[0], center[1] + radius * g[1]]);
    }
    Polygon::new_convex_unchecked(v)
        .map_err(|e| Error::DegenerateNorm(format!("Wulff polygon degenerate: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> Polygon {
        Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn square_basics() {
        let sq = unit_square();
        assert_eq!(sq.area(), 1.0);
        assert_eq!(sq.perimeter(), 4.0);
        assert_eq!(sq.centroid(), [0.5, 0.5]);
        assert!(sq.is_convex());
        assert!(sq.contains([0.5, 0.5]));
        assert!(!sq.contains([1.5, 0.5]));
        let e = NormSpec::euclidean(2).unwrap();
        assert_eq!(anisotropic_perimeter(&e, &sq), 4.0);
        assert_eq!(sq.edge(0).normal, [0.0, -1.0]);
    }

    #[test]
    fn rejects_bad_polygons() {
        assert!(matches!(
            Polygon::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]),
            Err(Error::InvalidPolygon(_))
        ));
        // bow tie
        assert!(Polygon::new(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(matches!(
            Polygon::new(vec![[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
            Err(Error::DegeneratePolygon(_))
        ));
        assert!(Polygon::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(Polygon::from_json("[[0,0],[1,0],[1,1],[0,1]]").is_ok());
        assert!(Polygon::from_json("[[0,0],[1,0]]").is_err());
        let cw = Polygon::new_any_orientation(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(cw.area() > 0.0);
    }

    #[test]
    fn nonconvex_detected() {
        let l = Polygon::new(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap();
        assert!(!l.is_convex());
        assert_eq!(l.area(), 3.0);
    }

    #[test]
    fn wulff_disk_area() {
        let e = NormSpec::euclidean(2).unwrap();
        let w = wulff_polygon(&e, 1.0, [0.0, 0.0], 4096).unwrap();
        assert!((w.area() - PI).abs() < 1e-5);
        assert!(w.area() < PI);
    }

    #[test]
    fn wulff_homogeneity() {
        for s in [
            NormSpec::euclidean(2).unwrap(),
            NormSpec::ellipse(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            NormSpec::qnorm(3.0, 2).unwrap(),
        ] {
            let a1 = wulff_polygon(&s, 1.0, [0.0, 0.0], 256).unwrap().area();
            let a2 = wulff_polygon(&s, 2.0, [0.3, -1.0], 256).unwrap().area();
            assert_relative_eq!(a2 / a1, 4.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn wulff_rejects_bad_args() {
        let e = NormSpec::euclidean(2).unwrap();
        assert!(wulff_polygon(&e, 1.0, [0.0, 0.0], 8).is_err());
        assert!(wulff_polygon(&e, -1.0, [0.0, 0.0], 64).is_err());
        let e3 = NormSpec::euclidean(3).unwrap();
        assert!(wulff_polygon(&e3, 1.0, [0.0, 0.0], 64).is_err());
    }
}
