//! Reference implementations used only as test oracles. They share no code
//! with the library: a tanh-sinh rule for integrals (including integrable
//! endpoint singularities) and classical fixed-step RK4 for ODEs.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Tanh-sinh quadrature of `f` over `[a, b]`.
///
/// `f` receives the abscissa together with its distances to `a` and to `b`,
/// computed without cancellation, so integrands like `1/sqrt(1 - x)` can be
/// evaluated accurately at nodes that round to the endpoint.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let eval = |t: f64| -> f64 {
        let s = FRAC_PI_2 * t.sinh();
        let c = s.cosh();
        let w = FRAC_PI_2 * t.cosh() / (c * c);
        // distance to the nearer endpoint in units of `half`: 1 - tanh|s|
        let tail = 1.0 / (s.abs().exp() * c);
        let x_off = half * s.tanh();
        let (da, db) = if s >= 0.0 {
            (half * (2.0 - tail), half * tail)
        } else {
            (half * tail, half * (2.0 - tail))
        };
        if da <= 0.0 || db <= 0.0 {
            return 0.0;
        }
        w * f(mid + x_off, da, db)
    };

    let mut h = 1.0;
    let mut sum = eval(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let term = eval(t) + eval(-t);
        sum += term;
        if t > 6.5 {
            break;
        }
        k += 1;
    }
    let mut estimate = h * sum * half;
    for _level in 0..12 {
        h *= 0.5;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            if t > 6.5 {
                break;
            }
            k += 2;
        }
        let next = h * sum * half;
        if (next - estimate).abs() <= 1e-15 * next.abs().max(1e-300) {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Smooth integrand convenience wrapper around [`tanh_sinh`].
pub fn integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    tanh_sinh(|x, _, _| f(x), a, b)
}

/// Classical fourth-order Runge-Kutta with `steps` equal steps.
pub fn rk4<const N: usize, F>(f: F, t0: f64, y0: [f64; N], t1: f64, steps: usize) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    let shift = |y: &[f64; N], k: &[f64; N], c: f64| {
        let mut out = *y;
        for i in 0..N {
            out[i] += c * k[i];
        }
        out
    };
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * h, &shift(&y, &k1, 0.5 * h));
        let k3 = f(t + 0.5 * h, &shift(&y, &k2, 0.5 * h));
        let k4 = f(t + h, &shift(&y, &k3, h));
        for j in 0..N {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    y
}

/// Duffing period `4 ∫₀^δ dy / sqrt(2(E - V(y)))` with `V = y²/2 + y⁴/4`,
/// scaled by `sqrt(ω)`.
pub fn duffing_period(delta: f64, omega: f64) -> f64 {
    let d = delta.abs();
    // E - V(y) = (δ² - y²)(2 + δ² + y²)/4, factored to keep the root exact
    let q = tanh_sinh(
        |y, _, to_end| {
            let gap = to_end * (d + y);
            1.0 / (0.5 * gap * (2.0 + d * d + y * y)).sqrt()
        },
        0.0,
        d,
    );
    4.0 * q * omega.sqrt()
}

/// Monodromy matrix of `x'' + p(t) x = 0` over `[0, period]` by RK4.
pub fn rk4_monodromy<P: Fn(f64) -> f64>(p: P, period: f64, steps: usize) -> [[f64; 2]; 2] {
    let rhs = |t: f64, y: &[f64; 4]| {
        let q = p(t);
        [y[1], -q * y[0], y[3], -q * y[2]]
    };
    let y = rk4(rhs, 0.0, [1.0, 0.0, 0.0, 1.0], period, steps);
    [[y[0], y[2]], [y[1], y[3]]]
}
