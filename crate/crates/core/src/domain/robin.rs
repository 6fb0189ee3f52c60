use serde::{Deserialize, Serialize};

use super::mesh::Mesh;
use super::quadrature::GAUSS3;
use crate::error::{Error, Result};
use crate::finsler::{NormSpec, Point, Polygon};

/// Radial weight `w` in `β(x) = w(F°(x - center))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Weight {
    /// `w(t) = c t`.
    Linear { c: f64 },
    /// Piecewise-linear through `(t[i], w[i])`, constant outside the table.
    Tabulated { t: Vec<f64>, w: Vec<f64> },
}

impl Weight {
    fn validate(&self) -> Result<()> {
        match self {
            Weight::Linear { c } => {
                if !c.is_finite() || *c < 0.0 {
                    return Err(Error::InvalidInput(format!("linear weight slope {c}")));
                }
            }
            Weight::Tabulated { t, w } => {
                if t.len() != w.len() || t.len() < 2 {
                    return Err(Error::InvalidInput("tabulated weight needs >= 2 matching samples".into()));
                }
                if t.iter().chain(w).any(|x| !x.is_finite()) {
                    return Err(Error::NonFiniteInput("tabulated weight"));
                }
                if t[0] < 0.0 || t.windows(2).any(|p| p[1] <= p[0]) {
                    return Err(Error::InvalidInput("weight abscissae must be >= 0 and strictly increasing".into()));
                }
                if w[0] < 0.0 || w.windows(2).any(|p| p[1] < p[0]) {
                    return Err(Error::InvalidInput("weight values must be >= 0 and nondecreasing".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Weight::Linear { c } => c * s,
            Weight::Tabulated { t, w } => {
                if s <= t[0] {
                    return w[0];
                }
                let n = t.len();
                if s >= t[n - 1] {
                    return w[n - 1];
                }
                let k = t.partition_point(|&x| x <= s) - 1;
                let a = (s - t[k]) / (t[k + 1] - t[k]);
                w[k] + a * (w[k + 1] - w[k])
            }
        }
    }
}

/// Boundary coefficient `β` of the Robin condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum RobinSpec {
    Constant { beta: f64 },
    RadialWeight {
        weight: Weight,
        /// Point from which `F°` is measured; the origin when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Point>,
    },
}

impl RobinSpec {
    pub fn constant(beta: f64) -> Result<Self> {
        let s = RobinSpec::Constant { beta };
        s.validate()?;
        Ok(s)
    }

    pub fn linear(c: f64, center: Option<Point>) -> Result<Self> {
        let s = RobinSpec::RadialWeight {
            weight: Weight::Linear { c },
            center,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RobinSpec::Constant { beta } => {
                if !beta.is_finite() || *beta < 0.0 {
                    return Err(Error::InvalidInput(format!("beta = {beta} must be finite and >= 0")));
                }
                Ok(())
            }
            RobinSpec::RadialWeight { weight, center } => {
                if center.map_or(false, |c| !c[0].is_finite() || !c[1].is_finite()) {
                    return Err(Error::NonFiniteInput("weight center"));
                }
                weight.validate()
            }
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: RobinSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("robin spec serializes")
    }

    /// `β ≡ 0`, outside the positive-`m` hypothesis; the eigenvalue is then 0.
    pub fn is_degenerate(&self) -> bool {
        match self {
            RobinSpec::Constant { beta } => *beta == 0.0,
            RobinSpec::RadialWeight { weight, .. } => match weight {
                Weight::Linear { c } => *c == 0.0,
                Weight::Tabulated { w, .. } => w.iter().all(|&v| v == 0.0),
            },
        }
    }

    pub fn center(&self) -> Point {
        match self {
            RobinSpec::RadialWeight { center: Some(c), .. } => *c,
            _ => [0.0, 0.0],
        }
    }

    #[inline]
    pub fn beta_at(&self, norm: &NormSpec, x: Point) -> f64 {
        match self {
            RobinSpec::Constant { beta } => *beta,
            RobinSpec::RadialWeight { weight, .. } => {
                let c = self.center();
                weight.eval(norm.polar2([x[0] - c[0], x[1] - c[1]]))
            }
        }
    }

    /// Multiplies `β` by `s ≥ 0`.
    pub fn scaled(&self, s: f64) -> Self {
        match self {
            RobinSpec::Constant { beta } => RobinSpec::Constant { beta: s * beta },
            RobinSpec::RadialWeight { weight, center } => RobinSpec::RadialWeight {
                weight: match weight {
                    Weight::Linear { c } => Weight::Linear { c: s * c },
                    Weight::Tabulated { t, w } => Weight::Tabulated {
                        t: t.clone(),
                        w: w.iter().map(|v| s * v).collect(),
                    },
                },
                center: *center,
            },
        }
    }

    /// `∫ β F(ν)` along the segment `a → b` with outward normal `normal`.
    pub fn segment_integral(&self, norm: &NormSpec, a: Point, b: Point, normal: Point) -> f64 {
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let fnu = norm.value2(normal);
        let mut s = 0.0;
        for (x, w) in GAUSS3 {
            let p = [a[0] + x * (b[0] - a[0]), a[1] + x * (b[1] - a[1])];
            s += w * self.beta_at(norm, p);
        }
        s * len * fnu
    }

    /// `m = ∫_{∂Ω} β F(ν)` with three-point Gauss per mesh boundary edge.
    pub fn boundary_mass(&self, norm: &NormSpec, mesh: &Mesh) -> f64 {
        let nodes = mesh.nodes();
        mesh.boundary_edges()
            .iter()
            .map(|e| self.segment_integral(norm, nodes[e.nodes[0]], nodes[e.nodes[1]], e.normal))
            .sum()
    }

    /// `m` on a polygon, each edge split into `pieces` Gauss panels.
    pub fn boundary_mass_polygon(&self, norm: &NormSpec, poly: &Polygon, pieces: usize) -> f64 {
        let k = pieces.max(1);
        poly.edges()
            .map(|e| {
                (0..k)
                    .map(|j| {
                        let s0 = j as f64 / k as f64;
                        let s1 = (j + 1) as f64 / k as f64;
                        let at = |s: f64| [e.start[0] + s * (e.end[0] - e.start[0]), e.start[1] + s * (e.end[1] - e.start[1])];
                        self.segment_integral(norm, at(s0), at(s1), e.normal)
                    })
                    .sum::<f64>()
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let c = RobinSpec::from_json(r#"{"kind":"Constant","beta":1.5}"#).unwrap();
        assert_eq!(c, RobinSpec::Constant { beta: 1.5 });
        let w = RobinSpec::from_json(r#"{"kind":"RadialWeight","weight":{"type":"linear","c":2.0},"center":[0.5,0.5]}"#).unwrap();
        assert_eq!(RobinSpec::from_json(&w.to_json()).unwrap(), w);
        assert!(RobinSpec::from_json(r#"{"kind":"Constant","beta":-1}"#).is_err());
        assert!(RobinSpec::from_json(r#"{"kind":"RadialWeight","weight":{"type":"tabulated","t":[0,1],"w":[1,0]}}"#).is_err());
    }

    #[test]
    fn tabulated_interpolates() {
        let w = Weight::Tabulated {
            t: vec![0.0, 1.0, 2.0],
            w: vec![0.0, 1.0, 3.0],
        };
        assert_eq!(w.eval(0.5), 0.5);
        assert_eq!(w.eval(1.5), 2.0);
        assert_eq!(w.eval(5.0), 3.0);
    }

    #[test]
    fn mass_of_unit_square() {
        let e = NormSpec::euclidean(2).unwrap();
        let sq = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let c = RobinSpec::constant(2.0).unwrap();
        assert!((c.boundary_mass_polygon(&e, &sq, 1) - 8.0).abs() < 1e-14);
        // w(t) = t from the center: 4 ∫_{-1/2}^{1/2} sqrt(1/4 + s²) ds
        let lin = RobinSpec::linear(1.0, Some([0.5, 0.5])).unwrap();
        let exact = 4.0 * (0.5 * (0.5f64).sqrt() + 0.25 * ((0.5 + 0.5f64.sqrt()) / 0.5).ln());
        assert!((lin.boundary_mass_polygon(&e, &sq, 64) - exact).abs() < 1e-10);
    }
}
