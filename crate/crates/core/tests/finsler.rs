use std::f64::consts::PI;

use aniso_robin::finsler::{anisotropic_perimeter, unit_ball_volume, wulff_polygon, NormSpec, Polygon};
use proptest::prelude::*;

fn norms() -> Vec<NormSpec> {
    vec![
        NormSpec::euclidean(2).unwrap(),
        NormSpec::ellipse(&[vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap(),
        NormSpec::ellipse(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap(),
        NormSpec::qnorm(3.0, 2).unwrap(),
        NormSpec::qnorm(1.5, 2).unwrap(),
    ]
}

/// `|{F° < 1}| = ½ ∮ F°(cos θ, sin θ)^{-2} dθ` by the periodic trapezoid rule.
fn polar_area(norm: &NormSpec, steps: usize) -> f64 {
    let h = 2.0 * PI / steps as f64;
    (0..steps)
        .map(|k| {
            let t = k as f64 * h;
            0.5 * h / norm.polar2([t.cos(), t.sin()]).powi(2)
        })
        .sum()
}

#[test]
fn kappa_matches_polar_quadrature() {
    for n in norms() {
        let q = polar_area(&n, 1 << 16);
        assert!((q - n.kappa()).abs() < 1e-9 * q, "{}: {q} vs {}", n.label(), n.kappa());
    }
    let e = &norms()[1];
    assert!((polar_area(e, 1 << 12) - 2.0 * PI).abs() < 1e-12);
    assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
}

#[test]
fn wulff_perimeter_is_n_kappa() {
    for n in norms() {
        let w = wulff_polygon(&n, 1.0, [0.0, 0.0], 4096).unwrap();
        let per = anisotropic_perimeter(&n, &w);
        assert!((per - 2.0 * n.kappa()).abs() < 1e-3 * 2.0 * n.kappa(), "{}: {per}", n.label());
        assert!((w.area() - n.kappa()).abs() < 1e-5 * n.kappa(), "{}", n.label());
    }
}

#[test]
fn wulff_shape_minimizes_perimeter_among_presets() {
    // anisotropic isoperimetric inequality P_F(K) ≥ 2 κ^{1/2} |K|^{1/2}
    let square = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
    let hex = Polygon::regular(6, 1.0, [0.3, -0.2], 0.1).unwrap();
    for n in norms() {
        for k in [&square, &hex] {
            let bound = 2.0 * (n.kappa() * k.area()).sqrt();
            assert!(anisotropic_perimeter(&n, k) >= bound * (1.0 - 1e-12), "{}", n.label());
        }
    }
}

fn norm_strategy() -> impl Strategy<Value = NormSpec> {
    prop_oneof![
        Just(NormSpec::euclidean(2).unwrap()),
        (0.2f64..5.0, 0.2f64..5.0, -0.9f64..0.9).prop_map(|(a, b, r)| {
            let off = r * (a * b).sqrt();
            NormSpec::ellipse(&[vec![a, off], vec![off, b]]).unwrap()
        }),
        (1.2f64..6.0).prop_map(|q| NormSpec::qnorm(q, 2).unwrap()),
    ]
}

fn vec2() -> impl Strategy<Value = [f64; 2]> {
    [-10.0f64..10.0, -10.0f64..10.0]
}

proptest! {
    #[test]
    fn homogeneous_and_subadditive(n in norm_strategy(), x in vec2(), y in vec2(), t in -5.0f64..5.0) {
        let f = |v: [f64; 2]| n.value2(v);
        prop_assert!((f([t * x[0], t * x[1]]) - t.abs() * f(x)).abs() <= 1e-12 * (1.0 + t.abs() * f(x)));
        prop_assert!(f([x[0] + y[0], x[1] + y[1]]) <= (f(x) + f(y)) * (1.0 + 1e-12) + 1e-300);
        prop_assert!(f(x) >= 0.0);
    }

    #[test]
    fn equivalence_constants(n in norm_strategy(), x in vec2()) {
        let e = x[0].hypot(x[1]);
        let f = n.value2(x);
        prop_assert!(f >= n.a() * e * (1.0 - 1e-12));
        prop_assert!(f <= n.b() * e * (1.0 + 1e-12));
    }

    #[test]
    fn polar_duality(n in norm_strategy(), x in vec2(), y in vec2()) {
        prop_assume!(x[0].hypot(x[1]) > 1e-6 && y[0].hypot(y[1]) > 1e-6);
        // Cauchy-Schwarz: ⟨ξ, η⟩ ≤ F(ξ) F°(η)
        let dot = x[0] * y[0] + x[1] * y[1];
        prop_assert!(dot <= n.value2(x) * n.polar2(y) * (1.0 + 1e-12));
        // equality at η = F_ξ(ξ), where F°(F_ξ) = 1
        let g = n.grad2(x);
        prop_assert!((n.polar2(g) - 1.0).abs() < 1e-10);
        prop_assert!((g[0] * x[0] + g[1] * x[1] - n.value2(x)).abs() < 1e-10 * n.value2(x));
    }

    #[test]
    fn perimeter_between_euclidean_bounds(n in norm_strategy(), k in 3usize..12, r in 0.1f64..3.0, phase in 0.0f64..1.0) {
        let p = Polygon::regular(k, r, [0.5, -1.0], phase).unwrap();
        let pe = p.perimeter();
        let pf = anisotropic_perimeter(&n, &p);
        prop_assert!(pf >= n.a() * pe * (1.0 - 1e-12) && pf <= n.b() * pe * (1.0 + 1e-12));
    }

    #[test]
    fn wulff_polygon_vertices_on_level_set(n in norm_strategy(), r in 0.1f64..4.0, cx in -2.0f64..2.0) {
        let w = wulff_polygon(&n, r, [cx, 1.0], 64).unwrap();
        prop_assert!(w.is_convex());
        for v in w.vertices() {
            prop_assert!((n.polar2([v[0] - cx, v[1] - 1.0]) - r).abs() < 1e-10 * r);
        }
    }

    #[test]
    fn polygon_json_roundtrip(k in 3usize..20, r in 0.1f64..5.0, phase in -3.0f64..3.0) {
        let p = Polygon::regular(k, r, [1.0, 2.0], phase).unwrap();
        prop_assert_eq!(Polygon::from_json(&p.to_json()).unwrap(), p);
    }
}
