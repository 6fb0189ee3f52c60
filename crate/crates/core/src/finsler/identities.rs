use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{NormFamily, NormSpec};

/// Maximum observed violation of each norm identity over random samples.
///
/// All entries are relative errors. `gradient_fd` compares `F_ξ` against a
/// central difference with step `1e-6 |ξ|` and therefore carries truncation
/// error; it is reported separately from the closed-form identities.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct IdentityReport {
    pub samples: usize,
    /// `|F(tξ) - |t| F(ξ)| / (|t| F(ξ))`.
    pub homogeneity: f64,
    /// `⟨F_ξ(ξ), ξ⟩ = F(ξ)` and the polar counterpart.
    pub euler: f64,
    /// `F°(F_ξ(ξ)) = 1`.
    pub polar_of_gradient: f64,
    /// `F(F°_ξ(ξ)) = 1`.
    pub norm_of_polar_gradient: f64,
    /// `F°(ξ) F_ξ(F°_ξ(ξ)) = ξ = F(ξ) F°_ξ(F_ξ(ξ))`.
    pub duality_inversion: f64,
    /// `max(0, |⟨ξ,η⟩| - F(ξ) F°(η)) / (F(ξ) F°(η))` over random pairs.
    pub cauchy_schwarz: f64,
    pub gradient_fd: f64,
}

impl IdentityReport {
    /// Largest violation among the closed-form identities.
    pub fn max_identity_error(&self) -> f64 {
        [
            self.homogeneity,
            self.euler,
            self.polar_of_gradient,
            self.norm_of_polar_gradient,
            self.duality_inversion,
            self.cauchy_schwarz,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Relative width of the excluded tube around coordinate axes for q-norms
/// with `q < 2` (or dual exponent below 2), where `F` is only `C¹`.
pub const AXIS_TUBE: f64 = 1e-6;

fn rel_vec_err(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den
}

fn sample_vector(rng: &mut ChaCha8Rng, dim: usize, avoid_axes: bool) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len < 1e-3 {
            continue;
        }
        if avoid_axes && v.iter().any(|x| x.abs() < AXIS_TUBE * len) {
            continue;
        }
        // magnitudes spread over [0.1, 10]
        let mag = 10f64.powf(rng.gen_range(-1.0..1.0));
        return v.iter().map(|x| x * mag / len).collect();
    }
}

/// Samples `samples` random nonzero vectors (seeded) and records the worst
/// violation of each identity.
pub fn verify_norm_identities(norm: &NormSpec, samples: usize, seed: u64) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let avoid_axes = match norm.family() {
        NormFamily::QNorm { q, .. } => *q != 2.0,
        _ => false,
    };
    let dim = norm.dim();
    let mut rep = IdentityReport {
        samples,
        ..Default::default()
    };
    for _ in 0..samples {
        let xi = sample_vector(&mut rng, dim, avoid_axes);
        let eta = sample_vector(&mut rng, dim, avoid_axes);
        let f = norm.value(&xi).expect("finite sample");
        let fo = norm.polar(&xi).expect("finite sample");
        let g = norm.gradient(&xi).expect("nonzero sample");
        let go = norm.polar_gradient(&xi).expect("nonzero sample");

        let t: f64 = rng.gen_range(-10.0..10.0);
        let scaled: Vec<f64> = xi.iter().map(|x| t * x).collect();
        let ft = norm.value(&scaled).unwrap();
        if t != 0.0 {
            rep.homogeneity = rep.homogeneity.max((ft - t.abs() * f).abs() / (t.abs() * f));
        }

        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        rep.euler = rep
            .euler
            .max((dot(&g, &xi) - f).abs() / f)
            .max((dot(&go, &xi) - fo).abs() / fo);

        rep.polar_of_gradient = rep
            .polar_of_gradient
            .max((norm.polar(&g).unwrap() - 1.0).abs());
        rep.norm_of_polar_gradient = rep
            .norm_of_polar_gradient
            .max((norm.value(&go).unwrap() - 1.0).abs());

        let back1: Vec<f64> = norm
            .gradient(&go)
            .unwrap()
            .iter()
            .map(|x| fo * x)
            .collect();
        let back2: Vec<f64> = norm
            .polar_gradient(&g)
            .unwrap()
            .iter()
            .map(|x| f * x)
            .collect();
        rep.duality_inversion = rep
            .duality_inversion
            .max(rel_vec_err(&back1, &xi))
            .max(rel_vec_err(&back2, &xi));

        let bound = f * norm.polar(&eta).unwrap();
        rep.cauchy_schwarz = rep
            .cauchy_schwarz
            .max(((dot(&xi, &eta).abs() - bound) / bound).max(0.0));

        let len = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let h = 1e-6 * len;
        let fd: Vec<f64> = (0..dim)
            .map(|i| {
                let mut p = xi.clone();
                let mut m = xi.clone();
                p[i] += h;
                m[i] -= h;
                (norm.value(&p).unwrap() - norm.value(&m).unwrap()) / (2.0 * h)
            })
            .collect();
        rep.gradient_fd = rep.gradient_fd.max(rel_vec_err(&fd, &g));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_identities_exact() {
        let r = verify_norm_identities(&NormSpec::euclidean(2).unwrap(), 10_000, 1);
        assert!(r.max_identity_error() <= 1e-12, "{r:?}");
        assert!(r.gradient_fd <= 1e-6, "{r:?}");
    }

    #[test]
    fn ellipse_identities() {
        let s = NormSpec::ellipse(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = verify_norm_identities(&s, 10_000, 2);
        assert!(r.max_identity_error() <= 1e-10, "{r:?}");
        assert!(r.gradient_fd <= 1e-6, "{r:?}");
    }

    #[test]
    fn qnorm_identities() {
        let s = NormSpec::qnorm(1.5, 2).unwrap();
        let r = verify_norm_identities(&s, 10_000, 3);
        assert!(r.max_identity_error() <= 1e-8, "{r:?}");
        assert!(r.gradient_fd <= 1e-6, "{r:?}");
    }

    #[test]
    fn higher_dimensional_norms() {
        let e = NormSpec::ellipse(&[
            vec![3.0, 1.0, 0.0],
            vec![1.0, 2.0, 0.5],
            vec![0.0, 0.5, 1.0],
        ])
        .unwrap();
        let r = verify_norm_identities(&e, 2000, 4);
        assert!(r.max_identity_error() <= 1e-10, "{r:?}");
        let q = NormSpec::qnorm(4.0, 4).unwrap();
        let r = verify_norm_identities(&q, 2000, 5);
        assert!(r.max_identity_error() <= 1e-8, "{r:?}");
    }

    #[test]
    fn deterministic_for_seed() {
        let s = NormSpec::qnorm(3.0, 2).unwrap();
        assert_eq!(verify_norm_identities(&s, 100, 9), verify_norm_identities(&s, 100, 9));
    }
}
