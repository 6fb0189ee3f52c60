//! Bessel J0/J1 by power series and root bracketing, independent of the solver.

/// `J_ν(x)` for ν ∈ {0, 1} by the ascending series; accurate for `|x| ≲ 10`.
pub fn bessel_j(nu: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(nu as i32);
    for k in 1..=nu {
        term /= k as f64;
    }
    let mut sum = term;
    let q = -half * half;
    for m in 1..200 {
        term *= q / (m as f64 * (m + nu) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Bisection root of `g` on `[a, b]` with `g(a) g(b) < 0`.
pub fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    assert!(ga * g(b) < 0.0, "root not bracketed");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// First zero of `J0`.
pub fn j01() -> f64 {
    bisect(|x| bessel_j(0, x), 2.0, 3.0)
}

/// Smallest positive `k` with `k J1(k) = β̄ J0(k)`; the disk Robin eigenvalue is `k²`.
pub fn robin_disk_root(beta: f64) -> f64 {
    bisect(
        |k| k * bessel_j(1, k) - beta * bessel_j(0, k),
        1e-12,
        j01() - 1e-15,
    )
}
