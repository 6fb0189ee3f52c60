//! Radial problem on Wulff shapes.
//!
//! On `𝒲_R` the first eigenfunction is `u(x) = ρ(F°(x))` where
//!
//! ```text
//!   -(p-1)(-ρ')^{p-2} ρ'' + (n-1)/r (-ρ')^{p-1} = ℓ ρ^{p-1},   0 < r < R
//!   ρ'(0) = 0,   (-ρ'(R))^{p-1} = β̄ ρ(R)^{p-1}
//! ```
//!
//! The eigenvalue depends on `(p, n, R, β̄)` only, so nothing here carries a norm.
//! The ODE is integrated in `(ρ, s)` with `s = (-ρ')^{p-1}`, which removes the
//! degeneracy of `(-ρ')^{p-2}` for `p < 2`.

mod ode;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use ode::{integrate, State, Tolerances};

#[inline]
fn spow(x: f64, e: f64) -> f64 {
    x.signum() * x.abs().powf(e)
}

/// Parameters `(p, n, R, β̄)` of the radial Robin problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    pub p: f64,
    pub n: usize,
    #[serde(rename = "R")]
    pub radius: f64,
    pub beta_bar: f64,
}

impl RadialProblem {
    pub fn new(p: f64, n: usize, radius: f64, beta_bar: f64) -> Result<Self> {
        let prob = RadialProblem {
            p,
            n,
            radius,
            beta_bar,
        };
        prob.validate()?;
        Ok(prob)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p.is_finite() || !self.radius.is_finite() || !self.beta_bar.is_finite() {
            return Err(Error::NonFiniteInput("radial problem"));
        }
        if self.p <= 1.0 {
            return Err(Error::InvalidExponent(self.p));
        }
        if self.n < 2 {
            return Err(Error::InvalidInput(format!("dimension n = {} < 2", self.n)));
        }
        if self.radius <= 0.0 {
            return Err(Error::InvalidInput(format!("radius {} <= 0", self.radius)));
        }
        if self.beta_bar < 0.0 {
            return Err(Error::InvalidInput(format!("beta_bar {} < 0", self.beta_bar)));
        }
        Ok(())
    }

    /// Conjugate exponent `p' = p/(p-1)`.
    pub fn conjugate(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `m/|𝒲_R| = n β̄ / R`, the value of the quotient at constants.
    pub fn mean_bound(&self) -> f64 {
        self.n as f64 * self.beta_bar / self.radius
    }
}

/// Numerical knobs of the shooting solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadialOptions {
    /// Tolerance on the boundary residual, scaled by `max(1, β̄)`.
    pub tol: f64,
    pub grid_size: usize,
    pub rtol: f64,
    pub atol: f64,
    /// Start of integration as a fraction of `R`.
    pub eps_factor: f64,
    pub max_bisections: usize,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions {
            tol: 1e-10,
            grid_size: 4096,
            rtol: 1e-12,
            atol: 1e-14,
            eps_factor: 1e-6,
            max_bisections: 400,
        }
    }
}

impl RadialOptions {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rtol: self.rtol,
            atol: self.atol,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if !(self.eps_factor > 0.0 && self.eps_factor < 0.1) {
            return Err(Error::InvalidInput(format!("eps_factor {}", self.eps_factor)));
        }
        if self.grid_size < 3 {
            return Err(Error::InvalidInput("grid_size must be at least 3".into()));
        }
        Ok(())
    }
}

/// Terminal state of one shot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShootResult {
    pub rho_r: f64,
    pub drho_r: f64,
    /// `(-ρ'(R))^{p-1} - β̄ ρ(R)^{p-1}`; its root in `ell` is the eigenvalue.
    pub residual: f64,
    /// `ρ` vanished before `R`, i.e. `ell` exceeds the Dirichlet eigenvalue.
    pub crossed_zero: bool,
    /// Radius where `ρ` changed sign (linear interpolation), if it did.
    pub crossing_radius: Option<f64>,
}

struct Shooter {
    p: f64,
    n1: f64,
    ell: f64,
    eps: f64,
    inv: f64,
    tol: Tolerances,
}

impl Shooter {
    fn new(prob: &RadialProblem, ell: f64, opts: &RadialOptions) -> Self {
        Shooter {
            p: prob.p,
            n1: prob.n as f64 - 1.0,
            ell,
            eps: opts.eps_factor * prob.radius,
            inv: 1.0 / (prob.p - 1.0),
            tol: opts.tolerances(),
        }
    }

    /// Series start `(ρ(r), s(r))` near the origin.
    fn series(&self, r: f64, n: f64) -> State {
        let c = (self.ell / n).powf(self.inv);
        let rho = 1.0 - c * ((self.p - 1.0) / self.p) * r.powf(self.p * self.inv);
        [rho, self.ell / n * r]
    }

    fn rhs(&self, r: f64, y: &State) -> State {
        [
            -spow(y[1], self.inv),
            self.ell * spow(y[0], self.p - 1.0) - self.n1 * y[1] / r,
        ]
    }

    fn drho(&self, s: f64) -> f64 {
        -spow(s, self.inv)
    }

    /// States at increasing radii `targets`, plus the radius where ρ crossed zero
    /// if integration stopped early.
    fn run(&self, targets: &[f64]) -> Result<(Vec<State>, Option<f64>)> {
        let n = self.n1 + 1.0;
        let split = targets.partition_point(|&r| r <= self.eps);
        let mut out: Vec<State> = targets[..split].iter().map(|&r| self.series(r, n)).collect();
        if split == targets.len() {
            return Ok((out, None));
        }
        let y0 = self.series(self.eps, n);
        let res = integrate(
            |r, y| self.rhs(r, y),
            self.eps,
            y0,
            &targets[split..],
            self.tol,
            |y| y[0] < 0.0,
        )?;
        out.extend(res.samples);
        let crossing = res.stopped.map(|(r0, y0, r1, y1)| {
            let t = y0[0] / (y0[0] - y1[0]);
            r0 + t * (r1 - r0)
        });
        Ok((out, crossing))
    }
}

fn terminal(prob: &RadialProblem, sh: &Shooter, last: Option<State>, crossing: Option<f64>) -> ShootResult {
    match (last, crossing) {
        (Some(y), None) => ShootResult {
            rho_r: y[0],
            drho_r: sh.drho(y[1]),
            residual: y[1] - prob.beta_bar * spow(y[0], prob.p - 1.0),
            crossed_zero: false,
            crossing_radius: None,
        },
        _ => ShootResult {
            rho_r: 0.0,
            drho_r: f64::NAN,
            residual: f64::INFINITY,
            crossed_zero: true,
            crossing_radius: crossing,
        },
    }
}

/// Integrates the radial ODE for a trial `ell` with default options.
pub fn shoot(prob: &RadialProblem, ell: f64, grid_size: usize) -> Result<ShootResult> {
    let opts = RadialOptions {
        grid_size: grid_size.max(3),
        ..RadialOptions::default()
    };
    shoot_with(prob, ell, &opts)
}

pub fn shoot_with(prob: &RadialProblem, ell: f64, opts: &RadialOptions) -> Result<ShootResult> {
    prob.validate()?;
    opts.validate()?;
    if !(ell >= 0.0) || !ell.is_finite() {
        return Err(Error::InvalidInput(format!("ell = {ell} must be finite and >= 0")));
    }
    let sh = Shooter::new(prob, ell, opts);
    let (states, crossing) = sh.run(&[prob.radius])?;
    Ok(terminal(prob, &sh, states.last().copied(), crossing))
}

/// Converged radial eigenpair sampled on a uniform grid over `[0, R]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialSolution {
    pub problem: RadialProblem,
    pub ell1: f64,
    pub grid: Vec<f64>,
    pub rho: Vec<f64>,
    pub drho: Vec<f64>,
    pub f: Vec<f64>,
    #[serde(rename = "cR")]
    pub c_r: f64,
    pub residual: f64,
    #[serde(skip)]
    options: RadialOptions,
}

/// `C(R) = ℓ₁ + (p-1) β̄^{p'}`.
pub fn comparison_constant(prob: &RadialProblem, ell1: f64) -> f64 {
    ell1 + (prob.p - 1.0) * prob.beta_bar.powf(prob.conjugate())
}

fn uniform_grid(radius: f64, size: usize) -> Vec<f64> {
    let last = (size - 1) as f64;
    (0..size)
        .map(|k| if k + 1 == size { radius } else { radius * k as f64 / last })
        .collect()
}

fn sample(prob: &RadialProblem, ell: f64, opts: &RadialOptions) -> Result<(RadialSolution, ShootResult)> {
    let sh = Shooter::new(prob, ell, opts);
    let grid = uniform_grid(prob.radius, opts.grid_size);
    let (states, crossing) = sh.run(&grid)?;
    if crossing.is_some() {
        return Err(Error::IntegrationFailure(format!(
            "profile vanished before R at ell = {ell}"
        )));
    }
    let rho: Vec<f64> = states.iter().map(|y| y[0]).collect();
    let drho: Vec<f64> = states.iter().map(|y| sh.drho(y[1])).collect();
    let f: Vec<f64> = states
        .iter()
        .map(|y| y[1] / spow(y[0], prob.p - 1.0))
        .collect();
    let shot = terminal(prob, &sh, states.last().copied(), None);
    Ok((
        RadialSolution {
            problem: *prob,
            ell1: ell,
            grid,
            rho,
            drho,
            f,
            c_r: comparison_constant(prob, ell),
            residual: shot.residual,
            options: *opts,
        },
        shot,
    ))
}

/// Finds `ℓ₁(β̄, 𝒲_R)` by bisection on the shooting residual.
pub fn solve_radial(prob: &RadialProblem, tol: f64) -> Result<RadialSolution> {
    solve_radial_with(
        prob,
        &RadialOptions {
            tol,
            ..RadialOptions::default()
        },
    )
}

fn bracket_above(prob: &RadialProblem, opts: &RadialOptions) -> Result<f64> {
    let is_above = |ell: f64| -> Result<bool> {
        let s = shoot_with(prob, ell, opts)?;
        Ok(s.crossed_zero || s.residual > 0.0)
    };
    // constants give J = nβ̄/R, so ℓ₁ never exceeds it
    let mean = prob.mean_bound() * (1.0 + 1e-9);
    if is_above(mean)? {
        return Ok(mean);
    }
    let ceiling = 4.0 * solve_dirichlet_radial_with(prob.p, prob.n, prob.radius, opts)?;
    let mut ell = mean.max(ceiling / 64.0);
    while ell <= ceiling {
        if is_above(ell)? {
            return Ok(ell);
        }
        ell *= 2.0;
    }
    Err(Error::BracketingFailure(format!(
        "no sign change below 4 λ_D = {ceiling}"
    )))
}

pub fn solve_radial_with(prob: &RadialProblem, opts: &RadialOptions) -> Result<RadialSolution> {
    prob.validate()?;
    opts.validate()?;
    if prob.beta_bar == 0.0 {
        return Ok(sample(prob, 0.0, opts)?.0);
    }
    let mut hi = bracket_above(prob, opts)?;
    let mut lo = 0.0;
    for _ in 0..opts.max_bisections {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = shoot_with(prob, mid, opts)?;
        if s.crossed_zero || s.residual > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut best: Option<(RadialSolution, f64)> = None;
    for ell in [lo, hi, 0.5 * (lo + hi)] {
        if let Ok((sol, _)) = sample(prob, ell, opts) {
            let r = sol.residual.abs();
            if best.as_ref().map_or(true, |(_, b)| r < *b) {
                best = Some((sol, r));
            }
        }
    }
    let (sol, r) = best.ok_or_else(|| Error::BracketingFailure("bracket collapsed".into()))?;
    let scaled = r / prob.beta_bar.max(1.0);
    if scaled > opts.tol {
        return Err(Error::ToleranceNotMet {
            residual: scaled,
            tol: opts.tol,
        });
    }
    Ok(sol)
}

/// `λ_D(𝒲_R)`: smallest `ell` at which the shot reaches zero by `r = R`.
///
/// Bisection stops once the bracket is narrower than `tol` relative to `ell`
/// (and never before `1e-14`).
pub fn solve_dirichlet_radial(p: f64, n: usize, radius: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    solve_dirichlet_radial_with(
        p,
        n,
        radius,
        &RadialOptions {
            tol: tol.min(1e-14),
            ..RadialOptions::default()
        },
    )
}

fn solve_dirichlet_radial_with(p: f64, n: usize, radius: f64, opts: &RadialOptions) -> Result<f64> {
    let prob = RadialProblem::new(p, n, radius, 0.0)?;
    opts.validate()?;
    let vanishes = |ell: f64| -> Result<bool> {
        let s = shoot_with(&prob, ell, opts)?;
        Ok(s.crossed_zero || s.rho_r <= 0.0)
    };
    let mut hi = radius.powf(-p);
    let mut lo = 0.0;
    let mut doublings = 0;
    while !vanishes(hi)? {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 || !hi.is_finite() {
            return Err(Error::BracketingFailure("Dirichlet eigenvalue not bracketed".into()));
        }
    }
    for _ in 0..opts.max_bisections {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= opts.tol * hi || mid <= lo || mid >= hi {
            break;
        }
        if vanishes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `f = (-ρ')^{p-1}/ρ^{p-1}` on the grid together with `C(R)`.
pub fn f_profile(sol: &RadialSolution) -> (Vec<f64>, f64) {
    (sol.f.clone(), sol.c_r)
}

/// Samples of `(ρ, ρ', f)` at arbitrary increasing radii, which may extend
/// past `R` as long as `ρ` stays positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSamples {
    pub r: Vec<f64>,
    pub rho: Vec<f64>,
    pub drho: Vec<f64>,
    pub f: Vec<f64>,
}

impl RadialSolution {
    pub fn options(&self) -> &RadialOptions {
        &self.options
    }

    pub fn profile_at(&self, radii: &[f64]) -> Result<ProfileSamples> {
        if radii.windows(2).any(|w| w[1] < w[0]) || radii.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::InvalidInput("radii must be nonnegative and sorted".into()));
        }
        let sh = Shooter::new(&self.problem, self.ell1, &self.options);
        let (states, crossing) = sh.run(radii)?;
        if let Some(rc) = crossing {
            return Err(Error::IntegrationFailure(format!(
                "profile vanishes at r = {rc}"
            )));
        }
        let p1 = self.problem.p - 1.0;
        Ok(ProfileSamples {
            r: radii.to_vec(),
            rho: states.iter().map(|y| y[0]).collect(),
            drho: states.iter().map(|y| sh.drho(y[1])).collect(),
            f: states.iter().map(|y| y[1] / spow(y[0], p1)).collect(),
        })
    }

    /// Linear interpolation of `f` on the stored grid; `None` outside `[0, R]`.
    pub fn f_at(&self, r: f64) -> Option<f64> {
        let h = self.problem.radius / (self.grid.len() - 1) as f64;
        if !(r >= 0.0) || r > self.problem.radius {
            return None;
        }
        let k = ((r / h) as usize).min(self.grid.len() - 2);
        let t = (r - self.grid[k]) / (self.grid[k + 1] - self.grid[k]);
        Some(self.f[k] + t * (self.f[k + 1] - self.f[k]))
    }

    /// JSON header accompanying the CSV export.
    pub fn header_json(&self) -> serde_json::Value {
        json!({
            "schema": format!("{}/radial-solution/v1", crate::SCHEMA_PREFIX),
            "p": self.problem.p,
            "n": self.problem.n,
            "R": self.problem.radius,
            "beta_bar": self.problem.beta_bar,
            "ell1": self.ell1,
            "cR": self.c_r,
            "residual": self.residual,
        })
    }

    /// Columns `r,rho,drho,f`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,rho,drho,f\n");
        for k in 0..self.grid.len() {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.grid[k], self.rho[k], self.drho[k], self.f[k]
            ));
        }
        out
    }
}

/// Outcome of [`check_radial_structure`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    /// Smallest `f[k+1] - f[k]`.
    pub min_forward_difference: f64,
    /// Smallest second difference of `g(z) = f(z^{1/n}) z^{1-1/n}` on a uniform z-grid.
    pub min_g_second_difference: f64,
    /// Largest `f(r) - C(R) r`.
    pub max_comparison_excess: f64,
    /// Largest residual of `f' = ℓ₁ - (n-1) f/r + (p-1) f^{p'}` with central differences.
    pub max_ode_residual: f64,
    pub tol: f64,
    pub ode_tol: f64,
    pub f_increasing: bool,
    pub g_convex: bool,
    pub comparison: bool,
    pub ode: bool,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.f_increasing && self.g_convex && self.comparison && self.ode
    }
}

/// Checks monotonicity of `f`, convexity of `g`, `f ≤ C(R) r` and the `f'` ODE
/// with `tol = 1e-6`, `ode_tol = 1e-4`.
pub fn check_radial_structure(sol: &RadialSolution) -> StructureReport {
    check_radial_structure_with(sol, 1e-6, 1e-4)
}

pub fn check_radial_structure_with(sol: &RadialSolution, tol: f64, ode_tol: f64) -> StructureReport {
    let prob = &sol.problem;
    let n = prob.n as f64;
    let pc = prob.conjugate();
    let f = &sol.f;

    let min_fd = f
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);

    let m = sol.grid.len() - 1;
    let zr = prob.radius.powf(n);
    let radii: Vec<f64> = (0..=m)
        .map(|j| if j == m { prob.radius } else { (j as f64 / m as f64 * zr).powf(1.0 / n) })
        .collect();
    let min_g2 = match sol.profile_at(&radii) {
        Ok(s) => {
            let g: Vec<f64> = s
                .f
                .iter()
                .zip(&radii)
                .map(|(fv, r)| fv * r.powf(n - 1.0))
                .collect();
            g.windows(3)
                .map(|w| w[2] - 2.0 * w[1] + w[0])
                .fold(f64::INFINITY, f64::min)
        }
        Err(_) => f64::NEG_INFINITY,
    };

    let max_cmp = f
        .iter()
        .zip(&sol.grid)
        .map(|(fv, r)| fv - sol.c_r * r)
        .fold(f64::NEG_INFINITY, f64::max);

    let mut max_ode: f64 = 0.0;
    for k in 1..m {
        let r = sol.grid[k];
        let d = (f[k + 1] - f[k - 1]) / (sol.grid[k + 1] - sol.grid[k - 1]);
        let rhs = sol.ell1 - (n - 1.0) * f[k] / r + (prob.p - 1.0) * f[k].max(0.0).powf(pc);
        max_ode = max_ode.max((d - rhs).abs());
    }

    let min_fd = if min_fd.is_finite() { min_fd } else { 0.0 };
    let min_g2 = if min_g2 == f64::INFINITY { 0.0 } else { min_g2 };
    StructureReport {
        min_forward_difference: min_fd,
        min_g_second_difference: min_g2,
        max_comparison_excess: max_cmp,
        max_ode_residual: max_ode,
        tol,
        ode_tol,
        f_increasing: min_fd >= -tol,
        g_convex: min_g2 >= -tol,
        comparison: max_cmp <= tol,
        ode: max_ode <= ode_tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // k* solving k J1(k) = β̄ J0(k), from a Bessel series + bisection oracle
    const K_HALF: f64 = 0.940_770_563_949_737_5;
    const K_ONE: f64 = 1.255_783_711_794_593_6;
    const K_FIVE: f64 = 1.989_814_714_719_699;
    const J01: f64 = 2.404_825_557_695_772_8;

    fn prob(beta: f64) -> RadialProblem {
        RadialProblem::new(2.0, 2, 1.0, beta).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(RadialProblem::new(1.0, 2, 1.0, 1.0), Err(Error::InvalidExponent(_))));
        assert!(RadialProblem::new(2.0, 1, 1.0, 1.0).is_err());
        assert!(RadialProblem::new(2.0, 2, 0.0, 1.0).is_err());
        assert!(RadialProblem::new(2.0, 2, 1.0, -1.0).is_err());
        assert!(shoot(&prob(1.0), -1.0, 10).is_err());
    }

    #[test]
    fn zero_ell_keeps_constant() {
        let s = shoot(&prob(1.0), 0.0, 64).unwrap();
        assert_eq!(s.rho_r, 1.0);
        assert_eq!(s.residual, -1.0);
        assert!(!s.crossed_zero);
    }

    #[test]
    fn dirichlet_eigenvalue_crosses() {
        let s = shoot(&prob(1.0), J01 * J01 * (1.0 + 1e-9), 64).unwrap();
        assert!(s.crossed_zero);
    }

    #[test]
    fn residual_vanishes_at_true_eigenvalue() {
        let s = shoot(&prob(1.0), K_ONE * K_ONE, 4096).unwrap();
        assert!(s.residual.abs() <= 1e-10, "{s:?}");
    }

    #[test]
    fn matches_bessel_roots() {
        for (beta, k) in [(0.5, K_HALF), (1.0, K_ONE), (5.0, K_FIVE)] {
            let sol = solve_radial(&prob(beta), 1e-10).unwrap();
            let rel = (sol.ell1 - k * k).abs() / (k * k);
            assert!(rel <= 1e-8, "beta {beta}: {} vs {} ({rel:e})", sol.ell1, k * k);
            assert!(sol.ell1 <= 2.0 * beta);
        }
    }

    #[test]
    fn dirichlet_matches_bessel_zero() {
        let d = solve_dirichlet_radial(2.0, 2, 1.0, 1e-12).unwrap();
        assert!((d - J01 * J01).abs() <= 1e-8, "{d}");
        let d2 = solve_dirichlet_radial(2.0, 2, 2.0, 1e-12).unwrap();
        assert!((d2 - d / 4.0).abs() <= 1e-8);
    }

    #[test]
    fn zero_beta_is_trivial() {
        let sol = solve_radial(&prob(0.0), 1e-10).unwrap();
        assert_eq!(sol.ell1, 0.0);
        assert!(sol.rho.iter().all(|&r| r == 1.0));
        let (f, c) = f_profile(&sol);
        assert!(f.iter().all(|&v| v == 0.0));
        assert_eq!(c, 0.0);
        assert!(check_radial_structure(&sol).passed());
    }

    #[test]
    fn profile_invariants() {
        let sol = solve_radial(&prob(1.0), 1e-10).unwrap();
        assert_eq!(sol.grid[0], 0.0);
        assert_eq!(sol.rho[0], 1.0);
        assert_eq!(sol.drho[0], 0.0);
        assert!(sol.f[0].abs() <= 1e-12);
        assert!((sol.f.last().unwrap() - 1.0).abs() <= 1e-9);
        assert!((sol.c_r - (sol.ell1 + 1.0)).abs() < 1e-15);
        assert!(sol.rho.windows(2).all(|w| w[1] <= w[0]));
        assert!(sol.drho.iter().all(|&d| d <= 0.0));
        let rep = check_radial_structure(&sol);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn higher_dimension_structure() {
        let p = RadialProblem::new(3.0, 3, 2.0, 0.5).unwrap();
        let sol = solve_radial(&p, 1e-10).unwrap();
        let rep = check_radial_structure(&sol);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn robin_tends_to_dirichlet() {
        let d = solve_dirichlet_radial(2.0, 2, 1.0, 1e-12).unwrap();
        let sol = solve_radial(&prob(1e6), 1e-10).unwrap();
        assert!(((sol.ell1 - d) / d).abs() < 0.01, "{} {d}", sol.ell1);
        assert!(sol.ell1 < d);
    }

    #[test]
    fn csv_and_header() {
        let sol = solve_radial_with(
            &prob(1.0),
            &RadialOptions {
                grid_size: 8,
                ..Default::default()
            },
        )
        .unwrap();
        let csv = sol.to_csv();
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.starts_with("r,rho,drho,f\n"));
        let h = sol.header_json();
        assert_eq!(h["ell1"], sol.ell1);
        assert_eq!(h["R"], 1.0);
    }
}
