//! Dormand-Prince 5(4) integrator with adaptive step size for small,
//! fixed-dimension systems.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Upper bound on the step size; `None` leaves it to the error control.
    pub max_step: Option<f64>,
}

impl IntegratorOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rel_tol: tol,
            abs_tol: tol,
            ..Self::default()
        }
    }
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_steps: 10_000_000,
            max_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub accepted: usize,
    pub rejected: usize,
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] += h * s;
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`.
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &IntegratorOptions,
) -> Result<Solution<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    integrate_observed(
        f,
        t0,
        y0,
        t_end,
        &[],
        opts,
        |_, _| ControlFlow::Continue(()),
    )
}

/// Integrates `y' = f(t, y)` from `t0` towards `t_end > t0`, calling
/// `observer` after every accepted step. Steps never jump over an entry of
/// `stops` (sorted ascending), so the observer sees the state exactly at those
/// times. Returning `ControlFlow::Break` from the observer ends the
/// integration early; the returned solution is the state at that point.
pub fn integrate_observed<const N: usize, F, O>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    stops: &[f64],
    opts: &IntegratorOptions,
    mut observer: O,
) -> Result<Solution<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]) -> ControlFlow<()>,
{
    if t_end.partial_cmp(&t0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::domain(
            "t_end",
            t_end,
            "integration interval must be nonempty",
        ));
    }
    let span = t_end - t0;
    let h_max = opts.max_step.unwrap_or(span).min(span);
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(&f, t0, &y0, &k1, h_max, opts);
    let mut stop_idx = stops.iter().position(|&s| s > t0).unwrap_or(stops.len());
    let mut accepted = 0;
    let mut rejected = 0;
    let mut last_rejected = false;

    while t < t_end {
        if accepted + rejected >= opts.max_steps {
            return Err(Error::IntegrationFailure {
                t,
                reason: "step budget exhausted",
            });
        }
        let target = if stop_idx < stops.len() {
            stops[stop_idx].min(t_end)
        } else {
            t_end
        };
        let landing = t + h >= target || (target - t - h) < 1e-12 * span;
        let step = if landing { target - t } else { h };
        if step <= 16.0 * f64::EPSILON * t.abs().max(span) {
            return Err(Error::IntegrationFailure {
                t,
                reason: "step size underflow",
            });
        }

        let k2 = f(t + C2 * step, &axpy(&y, step, &[(A21, &k1)]));
        let k3 = f(t + C3 * step, &axpy(&y, step, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            t + C4 * step,
            &axpy(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + C5 * step,
            &axpy(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + step,
            &axpy(
                &y,
                step,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            step,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let t_new = if landing { target } else { t + step };
        let k7 = f(t_new, &y_new);

        let mut err = 0.0;
        for i in 0..N {
            let e = step
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            err += (e / scale).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::IntegrationFailure {
                t,
                reason: "non-finite state",
            });
        }

        if err <= 1.0 {
            accepted += 1;
            t = t_new;
            y = y_new;
            k1 = k7;
            if landing && stop_idx < stops.len() && target == stops[stop_idx] {
                stop_idx += 1;
            }
            if observer(t, &y).is_break() {
                break;
            }
            let mut fac = if err == 0.0 {
                5.0
            } else {
                0.9 * err.powf(-0.2)
            };
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            last_rejected = false;
            // a forced landing on a stop must not shrink the next step
            h = if landing {
                (step * fac).max(h)
            } else {
                step * fac
            }
            .min(h_max);
        } else {
            rejected += 1;
            last_rejected = true;
            h = step * (0.9 * err.powf(-0.2)).max(0.2);
        }
    }
    Ok(Solution {
        t,
        y,
        accepted,
        rejected,
    })
}

/// Hairer-Wanner starting step heuristic.
fn initial_step<const N: usize, F>(
    f: &F,
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    h_max: f64,
    opts: &IntegratorOptions,
) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let scale = |i: usize| opts.abs_tol + opts.rel_tol * y0[i].abs();
    let norm =
        |v: &[f64; N]| ((0..N).map(|i| (v[i] / scale(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(h_max);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = f(t0 + h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(h_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_full_turn() {
        let opts = IntegratorOptions::with_tol(1e-12);
        let tau = 2.0 * std::f64::consts::PI;
        let sol = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], tau, &opts).unwrap();
        assert_eq!(sol.t, tau);
        assert!((sol.y[0] - 1.0).abs() < 1e-10);
        assert!(sol.y[1].abs() < 1e-10);
    }

    #[test]
    fn exponential_growth() {
        let opts = IntegratorOptions::with_tol(1e-11);
        let sol = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 3.0, &opts).unwrap();
        assert!((sol.y[0] / 3f64.exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lands_on_stops_and_breaks() {
        let stops = [0.5, 1.0, 1.5];
        let mut seen = Vec::new();
        let sol = integrate_observed(
            |_, y: &[f64; 1]| [-y[0]],
            0.0,
            [1.0],
            2.0,
            &stops,
            &IntegratorOptions::default(),
            |t, _| {
                seen.push(t);
                if t >= 1.0 {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        )
        .unwrap();
        assert!(seen.contains(&0.5));
        assert_eq!(sol.t, 1.0);
        assert!((sol.y[0] - (-1f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn step_budget() {
        let opts = IntegratorOptions {
            max_steps: 3,
            ..IntegratorOptions::with_tol(1e-12)
        };
        let r = integrate(
            |_, y: &[f64; 2]| [y[1], -100.0 * y[0]],
            0.0,
            [1.0, 0.0],
            100.0,
            &opts,
        );
        assert!(matches!(r, Err(Error::IntegrationFailure { .. })));
    }

    #[test]
    fn empty_interval_rejected() {
        let r = integrate(
            |_, y: &[f64; 1]| [y[0]],
            1.0,
            [1.0],
            1.0,
            &IntegratorOptions::default(),
        );
        assert!(r.is_err());
    }
}
