//! Adaptive Dormand-Prince 5(4) for planar autonomous-in-structure systems.

use crate::error::{Error, Result};

pub(crate) type State = [f64; 2];

#[derive(Clone, Copy, Debug)]
pub(crate) struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// error coefficients b - b*
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Outcome of [`integrate`].
#[derive(Clone, Debug)]
pub(crate) struct Integration {
    /// States at each requested target (only those reached).
    pub samples: Vec<State>,
    /// Set when `stop` fired; holds the bracketing radii and states.
    pub stopped: Option<(f64, State, f64, State)>,
}

/// Integrates `y' = rhs(r, y)` from `(r0, y0)` through the increasing `targets`,
/// stopping early as soon as an accepted state satisfies `stop`.
pub(crate) fn integrate<F, S>(
    rhs: F,
    r0: f64,
    y0: State,
    targets: &[f64],
    tol: Tolerances,
    stop: S,
) -> Result<Integration>
where
    F: Fn(f64, &State) -> State,
    S: Fn(&State) -> bool,
{
    let mut r = r0;
    let mut y = y0;
    let mut k1 = rhs(r, &y);
    let span = targets.last().copied().unwrap_or(r0) - r0;
    let mut h = if r0 > 0.0 { (0.5 * r0).min(1e-3 * span) } else { 1e-3 * span };
    if !(h > 0.0) {
        h = f64::EPSILON;
    }
    let mut samples = Vec::with_capacity(targets.len());
    let mut steps = 0usize;
    let max_steps = 5_000_000;

    for &target in targets {
        if target < r {
            return Err(Error::IntegrationFailure(format!(
                "target {target} lies behind current radius {r}"
            )));
        }
        while r < target {
            if steps >= max_steps {
                return Err(Error::IntegrationFailure("step budget exhausted".into()));
            }
            let last = target - r <= h;
            let hs = if last { target - r } else { h };
            let k2 = rhs(r + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
            let k3 = rhs(r + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(
                r + C4 * hs,
                &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = rhs(
                r + C5 * hs,
                &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = rhs(
                r + hs,
                &axpy(
                    &y,
                    hs,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = axpy(
                &y,
                hs,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            );
            let r_new = if last { target } else { r + hs };
            let k7 = rhs(r_new, &y_new);

            let mut err: f64 = 0.0;
            for i in 0..2 {
                let e = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / sc).abs());
            }
            steps += 1;
            if !err.is_finite() {
                h = 0.25 * hs;
                if h < 1e-15 * r.abs().max(1e-300) {
                    return Err(Error::IntegrationFailure(format!("step collapse at r = {r}")));
                }
                continue;
            }
            if err <= 1.0 {
                let prev = (r, y);
                r = r_new;
                y = y_new;
                k1 = k7;
                if stop(&y) {
                    return Ok(Integration {
                        samples,
                        stopped: Some((prev.0, prev.1, r, y)),
                    });
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a shortened final step says nothing about the natural step size
                if !last {
                    h = hs * fac;
                } else if fac < 1.0 {
                    h = h.min(hs * fac);
                }
            } else {
                h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                if h < 1e-14 * r.abs().max(1e-300) {
                    return Err(Error::IntegrationFailure(format!("step collapse at r = {r}")));
                }
            }
        }
        samples.push(y);
    }
    Ok(Integration {
        samples,
        stopped: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let tol = Tolerances { rtol: 1e-12, atol: 1e-14 };
        let targets: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        let out = integrate(|_, y| [y[1], -y[0]], 0.0, [0.0, 1.0], &targets, tol, |_| false).unwrap();
        for (t, y) in targets.iter().zip(&out.samples) {
            assert!((y[0] - t.sin()).abs() < 1e-10, "{t} {y:?}");
        }
    }

    #[test]
    fn stops_on_event() {
        let tol = Tolerances { rtol: 1e-10, atol: 1e-12 };
        let out = integrate(|_, _| [-1.0, 0.0], 0.0, [1.0, 0.0], &[5.0], tol, |y| y[0] < 0.0).unwrap();
        let (r0, y0, r1, y1) = out.stopped.unwrap();
        assert!(y0[0] >= 0.0 && y1[0] < 0.0);
        assert!(r0 <= 1.0 && r1 > 1.0);
        assert!(out.samples.is_empty());
    }
}
