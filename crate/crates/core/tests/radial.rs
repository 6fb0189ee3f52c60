mod common;

use aniso_robin::radial::{
    check_radial_structure, comparison_constant, shoot, solve_dirichlet_radial, solve_radial, RadialProblem,
};
use common::bessel::{j01, robin_disk_root};
use proptest::prelude::*;

// k² with k J1(k) = β̄ J0(k), frozen from the series oracle in tests/common
const ELL_DISK_BETA_ONE: f64 = 1.576_992_730_808_606_9;

#[test]
fn disk_matches_bessel_oracle() {
    let k = robin_disk_root(1.0);
    assert!((k * k - ELL_DISK_BETA_ONE).abs() < 1e-12);
    for beta in [0.1, 1.0, 5.0, 50.0] {
        let sol = solve_radial(&RadialProblem::new(2.0, 2, 1.0, beta).unwrap(), 1e-10).unwrap();
        let k = robin_disk_root(beta);
        assert!((sol.ell1 - k * k).abs() < 1e-8 * k * k, "β̄ = {beta}: {} vs {}", sol.ell1, k * k);
    }
}

#[test]
fn dirichlet_limit_is_j01_squared() {
    let d = solve_dirichlet_radial(2.0, 2, 1.0, 1e-10).unwrap();
    assert!((d - j01().powi(2)).abs() < 1e-8);
    let big = solve_radial(&RadialProblem::new(2.0, 2, 1.0, 1e4).unwrap(), 1e-10).unwrap();
    assert!(big.ell1 < d && d - big.ell1 < 1e-2 * d);
}

#[test]
fn zero_beta_is_zero() {
    let sol = solve_radial(&RadialProblem::new(3.0, 2, 1.0, 0.0).unwrap(), 1e-10).unwrap();
    assert!(sol.ell1.abs() < 1e-12);
}

#[test]
fn shot_residual_changes_sign_at_eigenvalue() {
    let prob = RadialProblem::new(2.0, 2, 1.0, 1.0).unwrap();
    let below = shoot(&prob, ELL_DISK_BETA_ONE - 1e-3, 2048).unwrap();
    let above = shoot(&prob, ELL_DISK_BETA_ONE + 1e-3, 2048).unwrap();
    assert!(below.residual.signum() != above.residual.signum());
    assert!(!below.crossed_zero);
}

#[test]
fn structure_holds_across_exponents() {
    for p in [1.5, 2.0, 3.0, 4.0] {
        for n in [2, 3] {
            let sol = solve_radial(&RadialProblem::new(p, n, 1.0, 2.0).unwrap(), 1e-10).unwrap();
            let rep = check_radial_structure(&sol);
            assert!(rep.passed(), "p = {p}, n = {n}: {rep:?}");
            assert!((comparison_constant(&sol.problem, sol.ell1) - sol.c_r).abs() < 1e-12 * sol.c_r);
        }
    }
}

#[test]
fn invalid_problems_rejected() {
    assert!(RadialProblem::new(1.0, 2, 1.0, 1.0).is_err());
    assert!(RadialProblem::new(2.0, 1, 1.0, 1.0).is_err());
    assert!(RadialProblem::new(2.0, 2, 0.0, 1.0).is_err());
    assert!(RadialProblem::new(2.0, 2, 1.0, -1.0).is_err());
    assert!(RadialProblem::new(2.0, 2, f64::NAN, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn increasing_in_beta_and_below_mean(p in 1.4f64..4.0, n in 2usize..4, r in 0.3f64..3.0, b in 0.05f64..5.0) {
        let lo = solve_radial(&RadialProblem::new(p, n, r, b).unwrap(), 1e-10).unwrap();
        let hi = solve_radial(&RadialProblem::new(p, n, r, 1.5 * b).unwrap(), 1e-10).unwrap();
        prop_assert!(lo.ell1 > 0.0 && lo.ell1 < hi.ell1);
        prop_assert!(lo.ell1 <= lo.problem.mean_bound() * (1.0 + 1e-9));
    }

    #[test]
    fn scaling(p in 1.4f64..4.0, r in 0.3f64..3.0, b in 0.05f64..5.0, t in 0.25f64..4.0) {
        // ℓ(tR, β̄ t^{1-p}) = t^{-p} ℓ(R, β̄)
        let base = solve_radial(&RadialProblem::new(p, 2, r, b).unwrap(), 1e-11).unwrap();
        let scaled = solve_radial(&RadialProblem::new(p, 2, t * r, b * t.powf(1.0 - p)).unwrap(), 1e-11).unwrap();
        let want = t.powf(-p) * base.ell1;
        prop_assert!((scaled.ell1 - want).abs() <= 1e-6 * want, "{} vs {}", scaled.ell1, want);
    }
}
