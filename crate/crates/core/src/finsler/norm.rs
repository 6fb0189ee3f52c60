use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Norm family with the data needed for closed-form evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum NormFamily {
    /// `F(ξ) = |ξ|`.
    Euclidean,
    /// `F(ξ) = sqrt(ξᵀ A ξ)` with `A` symmetric positive definite.
    Ellipse {
        matrix: DMatrix<f64>,
        inverse: DMatrix<f64>,
    },
    /// `F(ξ) = (Σ |ξ_i|^q)^{1/q}`, `q > 1`. The polar is the `q/(q-1)` norm.
    QNorm { q: f64, dual: f64 },
}

/// A validated Finsler norm together with its equivalence constants
/// `a |ξ| <= F(ξ) <= b |ξ|` and the measure `κ = |{F° < 1}|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormSpecRepr", into = "NormSpecRepr")]
pub struct NormSpec {
    family: NormFamily,
    dim: usize,
    lower: f64,
    upper: f64,
    kappa: f64,
}

/// Value and (when defined) gradient of a norm at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct NormEval {
    pub value: f64,
    /// `None` at the origin, where `F_ξ` is undefined.
    pub grad: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
enum NormSpecRepr {
    Euclidean {
        #[serde(default = "default_dim")]
        n: usize,
    },
    Ellipse {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
    },
    Qnorm {
        q: f64,
        #[serde(default = "default_dim")]
        n: usize,
    },
}

fn default_dim() -> usize {
    2
}

impl TryFrom<NormSpecRepr> for NormSpec {
    type Error = Error;

    fn try_from(repr: NormSpecRepr) -> Result<Self> {
        match repr {
            NormSpecRepr::Euclidean { n } => NormSpec::euclidean(n),
            NormSpecRepr::Ellipse { a } => NormSpec::ellipse(&a),
            NormSpecRepr::Qnorm { q, n } => NormSpec::qnorm(q, n),
        }
    }
}

impl From<NormSpec> for NormSpecRepr {
    fn from(spec: NormSpec) -> Self {
        match spec.family {
            NormFamily::Euclidean => NormSpecRepr::Euclidean { n: spec.dim },
            NormFamily::Ellipse { matrix, .. } => NormSpecRepr::Ellipse {
                a: (0..spec.dim)
                    .map(|i| (0..spec.dim).map(|j| matrix[(i, j)]).collect())
                    .collect(),
            },
            NormFamily::QNorm { q, .. } => NormSpecRepr::Qnorm { q, n: spec.dim },
        }
    }
}

/// Volume of the Euclidean unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let nf = n as f64;
    PI.powf(nf / 2.0) / gamma(nf / 2.0 + 1.0)
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidNorm(format!("dimension {n} < 2")));
    }
    Ok(())
}

fn check_finite(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteInput(what))
    }
}

/// `(Σ |x_i|^q)^{1/q}` computed with max-scaling.
fn lq_norm(x: &[f64], q: f64) -> f64 {
    let m = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|v| (v.abs() / m).powf(q)).sum::<f64>().powf(1.0 / q)
}

fn lq_gradient(x: &[f64], q: f64, value: f64) -> Vec<f64> {
    x.iter()
        .map(|v| v.signum() * (v.abs() / value).powf(q - 1.0))
        .collect()
}

impl NormSpec {
    pub fn euclidean(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            family: NormFamily::Euclidean,
            dim: n,
            lower: 1.0,
            upper: 1.0,
            kappa: unit_ball_volume(n),
        })
    }

    /// Ellipse norm from a row-major symmetric positive definite matrix.
    pub fn ellipse(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        check_dim(n)?;
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidNorm("matrix A must be square".into()));
        }
        for r in rows {
            check_finite(r, "ellipse matrix")?;
        }
        let matrix = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let scale = matrix.amax();
        if (&matrix - matrix.transpose()).amax() > 1e-12 * scale.max(1.0) {
            return Err(Error::InvalidNorm("matrix A must be symmetric".into()));
        }
        let eig = SymmetricEigen::new(matrix.clone());
        let lmin = eig.eigenvalues.min();
        let lmax = eig.eigenvalues.max();
        if !(lmin > 0.0) || lmin <= 1e-14 * lmax {
            return Err(Error::InvalidNorm(
                "matrix A must be positive definite".into(),
            ));
        }
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidNorm("matrix A is singular".into()))?;
        let kappa = unit_ball_volume(n) * matrix.determinant().sqrt();
        Ok(Self {
            family: NormFamily::Ellipse { matrix, inverse },
            dim: n,
            lower: lmin.sqrt(),
            upper: lmax.sqrt(),
            kappa,
        })
    }

    pub fn qnorm(q: f64, n: usize) -> Result<Self> {
        check_dim(n)?;
        if !q.is_finite() || q <= 1.0 {
            return Err(Error::InvalidNorm(format!("q = {q} must lie in (1, inf)")));
        }
        let dual = q / (q - 1.0);
        // ‖ξ‖_q vs ‖ξ‖_2: the ratio ranges over [min(1, c), max(1, c)], c = n^{1/q - 1/2}.
        let c = (n as f64).powf(1.0 / q - 0.5);
        let nf = n as f64;
        let kappa = (2.0 * gamma(1.0 + 1.0 / dual)).powf(nf) / gamma(1.0 + nf / dual);
        Ok(Self {
            family: NormFamily::QNorm { q, dual },
            dim: n,
            lower: c.min(1.0),
            upper: c.max(1.0),
            kappa,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("norm spec serializes")
    }

    pub fn family(&self) -> &NormFamily {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lower equivalence constant `a`.
    pub fn a(&self) -> f64 {
        self.lower
    }

    /// Upper equivalence constant `b`.
    pub fn b(&self) -> f64 {
        self.upper
    }

    /// `κ_n = |𝒲|`, the measure of the unit Wulff shape.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.family, NormFamily::Euclidean)
    }

    /// Short human-readable label, e.g. `ellipse[4,0;0,1]`.
    pub fn label(&self) -> String {
        match &self.family {
            NormFamily::Euclidean => "euclidean".into(),
            NormFamily::Ellipse { matrix, .. } => {
                let rows: Vec<String> = (0..self.dim)
                    .map(|i| {
                        (0..self.dim)
                            .map(|j| format!("{}", matrix[(i, j)]))
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .collect();
                format!("ellipse[{}]", rows.join(";"))
            }
            NormFamily::QNorm { q, .. } => format!("qnorm[{q}]"),
        }
    }

    fn check_input(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "vector of length {} for a norm on R^{}",
                v.len(),
                self.dim
            )));
        }
        check_finite(v, "norm argument")
    }

    /// `F(ξ)`.
    pub fn value(&self, xi: &[f64]) -> Result<f64> {
        self.check_input(xi)?;
        Ok(self.value_unchecked(xi))
    }

    fn value_unchecked(&self, xi: &[f64]) -> f64 {
        match &self.family {
            NormFamily::Euclidean => lq_norm(xi, 2.0),
            NormFamily::Ellipse { matrix, .. } => quad_form(matrix, xi).max(0.0).sqrt(),
            NormFamily::QNorm { q, .. } => lq_norm(xi, *q),
        }
    }

    /// `F_ξ(ξ)`; 0-homogeneous, undefined at the origin.
    pub fn gradient(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.check_input(xi)?;
        let value = self.value_unchecked(xi);
        if value == 0.0 {
            return Err(Error::GradientAtOrigin);
        }
        Ok(match &self.family {
            NormFamily::Euclidean => xi.iter().map(|x| x / value).collect(),
            NormFamily::Ellipse { matrix, .. } => {
                let g = matrix * DVector::from_column_slice(xi);
                g.iter().map(|x| x / value).collect()
            }
            NormFamily::QNorm { q, .. } => lq_gradient(xi, *q, value),
        })
    }

    /// `F(ξ)` together with `F_ξ(ξ)` when `ξ ≠ 0`.
    pub fn eval(&self, xi: &[f64]) -> Result<NormEval> {
        let value = self.value(xi)?;
        let grad = if value > 0.0 {
            Some(self.gradient(xi)?)
        } else {
            None
        };
        Ok(NormEval { value, grad })
    }

    /// Polar norm `F°(x) = sup ⟨ξ,x⟩ / F(ξ)`.
    pub fn polar(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok(self.polar_unchecked(x))
    }

    fn polar_unchecked(&self, x: &[f64]) -> f64 {
        match &self.family {
            NormFamily::Euclidean => lq_norm(x, 2.0),
            NormFamily::Ellipse { inverse, .. } => quad_form(inverse, x).max(0.0).sqrt(),
            NormFamily::QNorm { dual, .. } => lq_norm(x, *dual),
        }
    }

    /// `F°_ξ(x)`.
    pub fn polar_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let value = self.polar_unchecked(x);
        if value == 0.0 {
            return Err(Error::GradientAtOrigin);
        }
        Ok(match &self.family {
            NormFamily::Euclidean => x.iter().map(|v| v / value).collect(),
            NormFamily::Ellipse { inverse, .. } => {
                let g = inverse * DVector::from_column_slice(x);
                g.iter().map(|v| v / value).collect()
            }
            NormFamily::QNorm { dual, .. } => lq_gradient(x, *dual, value),
        })
    }

    /// `F` on a planar vector without input checks. Hot path of the FEM code.
    #[inline]
    pub fn value2(&self, v: [f64; 2]) -> f64 {
        debug_assert_eq!(self.dim, 2);
        match &self.family {
            NormFamily::Euclidean => v[0].hypot(v[1]),
            NormFamily::Ellipse { matrix, .. } => {
                (matrix[(0, 0)] * v[0] * v[0]
                    + 2.0 * matrix[(0, 1)] * v[0] * v[1]
                    + matrix[(1, 1)] * v[1] * v[1])
                    .max(0.0)
                    .sqrt()
            }
            NormFamily::QNorm { q, .. } => lq_norm(&v, *q),
        }
    }

    /// `F_ξ` on a planar vector; returns `[0, 0]` at the origin.
    #[inline]
    pub fn grad2(&self, v: [f64; 2]) -> [f64; 2] {
        let f = self.value2(v);
        if f == 0.0 {
            return [0.0, 0.0];
        }
        match &self.family {
            NormFamily::Euclidean => [v[0] / f, v[1] / f],
            NormFamily::Ellipse { matrix, .. } => [
                (matrix[(0, 0)] * v[0] + matrix[(0, 1)] * v[1]) / f,
                (matrix[(1, 0)] * v[0] + matrix[(1, 1)] * v[1]) / f,
            ],
            NormFamily::QNorm { q, .. } => {
                let g = |x: f64| x.signum() * (x.abs() / f).powf(q - 1.0);
                [g(v[0]), g(v[1])]
            }
        }
    }

    /// `F°` on a planar vector without input checks.
    #[inline]
    pub fn polar2(&self, x: [f64; 2]) -> f64 {
        match &self.family {
            NormFamily::Euclidean => x[0].hypot(x[1]),
            NormFamily::Ellipse { inverse, .. } => (inverse[(0, 0)] * x[0] * x[0]
                + 2.0 * inverse[(0, 1)] * x[0] * x[1]
                + inverse[(1, 1)] * x[1] * x[1])
                .max(0.0)
                .sqrt(),
            NormFamily::QNorm { dual, .. } => lq_norm(&x, *dual),
        }
    }
}

fn quad_form(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += x[i] * m[(i, j)] * x[j];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ellipse41() -> NormSpec {
        NormSpec::ellipse(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn euclidean_eval() {
        let e = NormSpec::euclidean(2).unwrap();
        let r = e.eval(&[3.0, 4.0]).unwrap();
        assert_eq!(r.value, 5.0);
        let g = r.grad.unwrap();
        assert_relative_eq!(g[0], 0.6, epsilon = 1e-15);
        assert_relative_eq!(g[1], 0.8, epsilon = 1e-15);
        assert_eq!(e.polar(&[3.0, 4.0]).unwrap(), 5.0);
    }

    #[test]
    fn ellipse_eval_and_polar() {
        let s = ellipse41();
        let r = s.eval(&[1.0, 0.0]).unwrap();
        assert_relative_eq!(r.value, 2.0, epsilon = 1e-15);
        assert_eq!(r.grad.unwrap(), vec![2.0, 0.0]);
        assert_relative_eq!(s.polar(&[1.0, 0.0]).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!((s.a(), s.b()), (1.0, 2.0));
        assert_relative_eq!(s.kappa(), 2.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn qnorm_eval_and_polar() {
        let s = NormSpec::qnorm(3.0, 2).unwrap();
        assert_relative_eq!(s.value(&[1.0, 1.0]).unwrap(), 2f64.powf(1.0 / 3.0), epsilon = 1e-15);
        assert_relative_eq!(s.polar(&[1.0, 1.0]).unwrap(), 2f64.powf(2.0 / 3.0), epsilon = 1e-15);
        // q >= 2: ‖ξ‖_q <= ‖ξ‖_2, worst case on the diagonal.
        assert_relative_eq!(s.a(), 2f64.powf(1.0 / 3.0 - 0.5), epsilon = 1e-15);
        assert_eq!(s.b(), 1.0);
    }

    #[test]
    fn qnorm_two_is_euclidean_kappa() {
        let s = NormSpec::qnorm(2.0, 2).unwrap();
        assert_relative_eq!(s.kappa(), PI, epsilon = 1e-12);
        let s3 = NormSpec::qnorm(2.0, 3).unwrap();
        assert_relative_eq!(s3.kappa(), 4.0 * PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn origin_and_nonfinite() {
        let s = ellipse41();
        let r = s.eval(&[0.0, 0.0]).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.grad.is_none());
        assert!(matches!(s.gradient(&[0.0, 0.0]), Err(Error::GradientAtOrigin)));
        assert!(matches!(s.value(&[f64::NAN, 0.0]), Err(Error::NonFiniteInput(_))));
        assert!(matches!(s.polar(&[f64::INFINITY, 0.0]), Err(Error::NonFiniteInput(_))));
    }

    #[test]
    fn invalid_specs() {
        assert!(NormSpec::qnorm(1.0, 2).is_err());
        assert!(NormSpec::qnorm(f64::NAN, 2).is_err());
        assert!(NormSpec::euclidean(1).is_err());
        assert!(NormSpec::ellipse(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(NormSpec::ellipse(&[vec![1.0, 0.5], vec![0.0, 1.0]]).is_err());
        assert!(NormSpec::ellipse(&[vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn json_roundtrip_and_schema() {
        let s = NormSpec::from_json(r#"{"family":"ellipse","A":[[4,0],[0,1]]}"#).unwrap();
        assert_eq!(s, ellipse41());
        assert_eq!(NormSpec::from_json(&s.to_json()).unwrap(), s);
        let q = NormSpec::from_json(r#"{"family":"qnorm","q":3}"#).unwrap();
        assert_eq!(q.dim(), 2);
        assert!(NormSpec::from_json(r#"{"family":"qnorm","q":0.5}"#).is_err());
        assert!(NormSpec::from_json(r#"{"family":"taxicab"}"#).is_err());
    }

    #[test]
    fn planar_fast_path_matches() {
        for s in [ellipse41(), NormSpec::qnorm(1.5, 2).unwrap(), NormSpec::euclidean(2).unwrap()] {
            let v = [0.3, -1.7];
            assert_relative_eq!(s.value2(v), s.value(&v).unwrap(), epsilon = 1e-14);
            assert_relative_eq!(s.polar2(v), s.polar(&v).unwrap(), epsilon = 1e-14);
            let g = s.gradient(&v).unwrap();
            let g2 = s.grad2(v);
            assert_relative_eq!(g[0], g2[0], epsilon = 1e-14);
            assert_relative_eq!(g[1], g2[1], epsilon = 1e-14);
        }
    }
}
