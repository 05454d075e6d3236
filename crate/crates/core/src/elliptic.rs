//! Complete elliptic integral of the first kind and the Jacobi elliptic
//! functions `sn`, `cn`, `dn`, for real argument and modulus `0 <= k < 1`.
//!
//! Both are built on the arithmetic-geometric mean. `K(k)` is
//! `pi / (2 AGM(1, k'))`; the Jacobi functions use the descending Landen
//! sequence of the same AGM and a backward recursion on the amplitude
//! (Abramowitz & Stegun 16.4).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};

use crate::error::{Error, Result};

/// Enough for any modulus below 1 - 1e-16; the AGM converges quadratically.
const MAX_AGM_STEPS: usize = 32;

/// Elliptic modulus `k`, validated to lie in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(Error::domain(
                "k",
                k,
                "elliptic modulus must satisfy 0 <= k < 1",
            ));
        }
        Ok(Self(k))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Complementary modulus `k' = sqrt(1 - k^2)`.
    #[inline]
    pub fn complementary(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

/// Values of `(sn, cn, dn)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Arithmetic-geometric mean of `a` and `b`.
fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind,
/// `K(k) = int_0^{pi/2} da / sqrt(1 - k^2 sin^2 a)`.
pub fn complete_k(k: EllipticModulus) -> f64 {
    if k.0 == 0.0 {
        return FRAC_PI_2;
    }
    FRAC_PI_2 / agm(1.0, k.complementary())
}

/// `sigma = int_0^1 dt / sqrt(1 - t^4) = K(1/sqrt 2) / sqrt 2`.
///
/// Sets the Li-Zhang threshold `(64/3) sigma^4` and the large-amplitude
/// limit of the Duffing quarter period.
pub fn sigma_constant() -> f64 {
    let k = EllipticModulus(FRAC_1_SQRT_2);
    complete_k(k) / SQRT_2
}

/// Jacobi elliptic functions at real argument `u`.
///
/// The argument is first reduced modulo the real period `4K` and folded onto
/// `[0, K]` with the quarter-period symmetries, so the error does not grow
/// with `|u|`.
pub fn jacobi(u: f64, k: EllipticModulus) -> Result<JacobiTriple> {
    if !u.is_finite() {
        return Err(Error::domain("u", u, "argument must be finite"));
    }
    Ok(jacobi_unchecked(u, k))
}

/// Same as [`jacobi`] without the finiteness check; used in integrator hot
/// loops where the argument is known to be finite.
pub(crate) fn jacobi_unchecked(u: f64, k: EllipticModulus) -> JacobiTriple {
    let kv = k.0;
    if kv == 0.0 {
        let (sn, cn) = u.sin_cos();
        return JacobiTriple { sn, cn, dn: 1.0 };
    }
    let quarter = complete_k(k);
    let whole = 4.0 * quarter;

    // u -> [-2K, 2K]
    let mut r = u - whole * (u / whole).round();
    let sn_sign = if r < 0.0 { -1.0 } else { 1.0 };
    r = r.abs();
    // [0, 2K] -> [0, K]: sn(2K - r) = sn r, cn(2K - r) = -cn r
    let cn_sign = if r > quarter {
        r = 2.0 * quarter - r;
        -1.0
    } else {
        1.0
    };

    let (sn, cn) = landen_sn_cn(r.max(0.0), kv, k.complementary());
    let dn = (1.0 - kv * kv * sn * sn).sqrt();
    JacobiTriple {
        sn: sn_sign * sn,
        cn: cn_sign * cn,
        dn,
    }
}

/// `sn` and `cn` through the descending Landen / AGM amplitude recursion.
fn landen_sn_cn(u: f64, k: f64, kc: f64) -> (f64, f64) {
    let mut a = [0.0_f64; MAX_AGM_STEPS + 1];
    let mut c = [0.0_f64; MAX_AGM_STEPS + 1];
    a[0] = 1.0;
    c[0] = k;
    let mut b = kc;
    let mut n = 0;
    while n < MAX_AGM_STEPS && c[n].abs() > f64::EPSILON * a[n] {
        let (an, bn) = (a[n], b);
        a[n + 1] = 0.5 * (an + bn);
        c[n + 1] = 0.5 * (an - bn);
        b = (an * bn).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    phi.sin_cos()
}
