//! Anisotropic inradius and Cheeger-constant bounds on convex polygons.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::Serialize;

use super::fem::EigenResult;
use super::levelset::{cut, p1_gradient, perturbed_level};
use super::mesh::Mesh;
use super::robin::RobinSpec;
use crate::error::{Error, Result};
use crate::finsler::{anisotropic_perimeter, wulff_polygon, NormSpec, Point, Polygon};

fn require_planar(norm: &NormSpec) -> Result<()> {
    if norm.dim() != 2 {
        return Err(Error::InvalidInput(format!("planar norm required, got n = {}", norm.dim())));
    }
    Ok(())
}

/// Anisotropic inradius `R_F` and the center of a largest inscribed Wulff shape.
///
/// Solves `max r` subject to `ν_e·x + r F(ν_e) ≤ ν_e·a_e` for every edge, then
/// checks containment of the Wulff polygon `𝒲_{R_F}(x)`.
pub fn inradius_f(poly: &Polygon, norm: &NormSpec) -> Result<(f64, Point)> {
    require_planar(norm)?;
    if !poly.is_convex() {
        return Err(Error::NonConvexDomain);
    }
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let x = lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY));
    let y = lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY));
    let r = lp.add_var(1.0, (0.0, f64::INFINITY));
    for e in poly.edges() {
        let c = e.normal[0] * e.start[0] + e.normal[1] * e.start[1];
        lp.add_constraint(
            &[(x, e.normal[0]), (y, e.normal[1]), (r, norm.value2(e.normal))],
            ComparisonOp::Le,
            c,
        );
    }
    let sol = lp
        .solve()
        .map_err(|e| Error::LinearAlgebra(format!("inradius LP: {e}")))?;
    let (rf, center) = (sol[r], [sol[x], sol[y]]);
    if !(rf > 0.0) {
        return Err(Error::DegeneratePolygon("zero inradius".into()));
    }
    let tol = 1e-9 * poly.diameter();
    let probe = wulff_polygon(norm, rf * (1.0 - 1e-9), center, 1024)?;
    for v in probe.vertices() {
        for e in poly.edges() {
            let s = e.normal[0] * (v[0] - e.start[0]) + e.normal[1] * (v[1] - e.start[1]);
            if s > tol {
                return Err(Error::ContainmentViolation(format!(
                    "inscribed Wulff shape leaves the polygon by {s:e}"
                )));
            }
        }
    }
    Ok((rf, center))
}

/// Two-sided bounds on the anisotropic Cheeger constant `h_F(Ω)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheegerBounds {
    /// `1/R_F`.
    pub lower: f64,
    /// Smallest `P_F(U)/|U|` over the candidate sets, capped by `n/R_F`.
    pub upper: f64,
    pub inradius: f64,
    pub center: Point,
    /// Which candidate attained `upper`.
    pub upper_source: String,
}

const LEVEL_GRID: usize = 20;

fn level_candidates<F>(mesh: &Mesh, eig: &EigenResult, mut ratio: F) -> Result<Vec<(f64, f64)>>
where
    F: FnMut(&super::levelset::Cut, &dyn Fn(usize) -> Point) -> f64,
{
    let u = &eig.u;
    if u.len() != mesh.nodes().len() {
        return Err(Error::InvalidInput("eigenfunction does not match the mesh".into()));
    }
    let grads: Vec<Point> = (0..mesh.triangles().len()).map(|k| p1_gradient(mesh, u, k)).collect();
    let umax = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = Vec::new();
    for i in 1..LEVEL_GRID {
        let t = match perturbed_level(u, umax * i as f64 / LEVEL_GRID as f64) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let c = cut(mesh, u, t);
        let area = c.area();
        if area > 0.0 {
            let g = |k: usize| grads[k];
            out.push((t, ratio(&c, &g) / area));
        }
    }
    Ok(out)
}

/// `1/R_F ≤ h_F(Ω) ≤ upper`, with candidates: the inscribed Wulff shape
/// (`n/R_F`), the domain itself, and superlevel sets of `eig` when given.
pub fn cheeger_bounds(poly: &Polygon, norm: &NormSpec, eig: Option<(&Mesh, &EigenResult)>) -> Result<CheegerBounds> {
    let (rf, center) = inradius_f(poly, norm)?;
    let mut upper = 2.0 / rf;
    let mut source = "inscribed Wulff shape".to_string();
    let own = anisotropic_perimeter(norm, poly) / poly.area();
    if own < upper {
        upper = own;
        source = "domain".into();
    }
    if let Some((mesh, e)) = eig {
        for (t, v) in level_candidates(mesh, e, |c, g| c.perimeter(mesh, norm, g))? {
            if v < upper {
                upper = v;
                source = format!("level set t = {t:.4}");
            }
        }
    }
    Ok(CheegerBounds {
        lower: 1.0 / rf,
        upper,
        inradius: rf,
        center,
        upper_source: source,
    })
}

/// Candidate upper bound for the weighted Cheeger constant
/// `h_g(Ω) = inf_U ∫_{∂U} g F(ν) / |U|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedCheeger {
    pub upper: f64,
    /// `n w(R)/R` when the polygon is a Wulff polygon of radius `R` about the weight center.
    pub wulff_exact: Option<f64>,
    pub upper_source: String,
}

/// Radius `R` if every vertex sits at the same `F°` distance from `center` and
/// the polygon is fine enough to stand for a Wulff shape.
pub fn wulff_radius(poly: &Polygon, norm: &NormSpec, center: Point) -> Option<f64> {
    if poly.len() < 16 || !poly.is_convex() {
        return None;
    }
    let r: Vec<f64> = poly
        .vertices()
        .iter()
        .map(|v| norm.polar2([v[0] - center[0], v[1] - center[1]]))
        .collect();
    let r0 = r[0];
    (r0 > 0.0 && r.iter().all(|x| (x - r0).abs() <= 1e-9 * r0)).then_some(r0)
}

pub fn weighted_cheeger(
    poly: &Polygon,
    norm: &NormSpec,
    g: &RobinSpec,
    eig: Option<(&Mesh, &EigenResult)>,
) -> Result<WeightedCheeger> {
    g.validate()?;
    if let RobinSpec::Constant { beta } = g {
        let b = cheeger_bounds(poly, norm, eig)?;
        let wulff_exact = wulff_radius(poly, norm, poly.centroid()).map(|r| 2.0 * beta / r);
        return Ok(WeightedCheeger {
            upper: beta * b.upper,
            wulff_exact,
            upper_source: b.upper_source,
        });
    }
    let (rf, center) = inradius_f(poly, norm)?;
    let mut upper = g.boundary_mass_polygon(norm, poly, 8) / poly.area();
    let mut source = "domain".to_string();
    for k in 1..=10 {
        let r = rf * k as f64 / 10.0 * (1.0 - 1e-9);
        let w = wulff_polygon(norm, r, center, 512)?;
        let v = g.boundary_mass_polygon(norm, &w, 1) / w.area();
        if v < upper {
            upper = v;
            source = format!("inner Wulff shape r = {r:.4}");
        }
    }
    if let Some((mesh, e)) = eig {
        let cands = level_candidates(mesh, e, |c, grad| {
            c.level_integral(norm, grad, |_, x| g.beta_at(norm, x)) + c.boundary_integral(mesh, norm, g)
        })?;
        for (t, v) in cands {
            if v < upper {
                upper = v;
                source = format!("level set t = {t:.4}");
            }
        }
    }
    let wulff_exact = match g {
        RobinSpec::RadialWeight { weight, .. } => {
            wulff_radius(poly, norm, g.center()).map(|r| 2.0 * weight.eval(r) / r)
        }
        RobinSpec::Constant { .. } => None,
    };
    Ok(WeightedCheeger {
        upper,
        wulff_exact,
        upper_source: source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_inradius() {
        let sq = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let (r, c) = inradius_f(&sq, &NormSpec::euclidean(2).unwrap()).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        assert!((c[0] - 0.5).abs() < 1e-9 && (c[1] - 0.5).abs() < 1e-9);
        let b = cheeger_bounds(&sq, &NormSpec::euclidean(2).unwrap(), None).unwrap();
        assert!((b.lower - 2.0).abs() < 1e-12);
        assert!(b.upper <= 4.0 + 1e-12 && b.lower <= b.upper);
    }

    #[test]
    fn ellipse_inradius_on_square() {
        // F(ν) = sqrt(νᵀ diag(4,1) ν): vertical edges give r ≤ 1/4, horizontal r ≤ 1/2
        let sq = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let e = NormSpec::ellipse(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (r, c) = inradius_f(&sq, &e).unwrap();
        assert!((r - 0.25).abs() < 1e-12, "{r}");
        assert!((c[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn nonconvex_rejected() {
        let l = Polygon::new(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        assert!(matches!(inradius_f(&l, &NormSpec::euclidean(2).unwrap()), Err(Error::NonConvexDomain)));
    }

    #[test]
    fn wulff_polygon_bounds() {
        let q = NormSpec::qnorm(3.0, 2).unwrap();
        let w = wulff_polygon(&q, 1.0, [0.0, 0.0], 4096).unwrap();
        let (r, _) = inradius_f(&w, &q).unwrap();
        assert!((r - 1.0).abs() < 1e-3, "{r}");
        let b = cheeger_bounds(&w, &q, None).unwrap();
        assert!((b.upper - 2.0).abs() < 0.01, "{b:?}");
        let lin = RobinSpec::linear(1.0, None).unwrap();
        let wc = weighted_cheeger(&w, &q, &lin, None).unwrap();
        assert!((wc.wulff_exact.unwrap() - 2.0).abs() < 1e-9);
        assert!(wc.upper >= 2.0 - 1e-3, "{wc:?}");
    }

    #[test]
    fn constant_weight_scales_cheeger() {
        let sq = Polygon::rectangle(-0.5, -0.5, 0.5, 0.5).unwrap();
        let e = NormSpec::euclidean(2).unwrap();
        let b = cheeger_bounds(&sq, &e, None).unwrap();
        let wc = weighted_cheeger(&sq, &e, &RobinSpec::constant(3.0).unwrap(), None).unwrap();
        assert_eq!(wc.upper, 3.0 * b.upper);
        assert!(wc.wulff_exact.is_none());
    }
}
