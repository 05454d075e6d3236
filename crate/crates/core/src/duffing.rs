//! Closed-form solutions of the Duffing oscillator
//!
//! ```text
//! Θ'' + Θ/ω + Θ³/ω = 0,    Θ(0) = δ,  Θ'(0) = 0
//! ```
//!
//! With `ω = 1` this is `y'' + y + y³ = 0`. The solution is
//! `Θ(t) = δ cn(t sqrt((1+δ²)/ω), k)` with `k = |δ| / sqrt(2(1+δ²))`, and the
//! period is `4 sqrt(ω/(1+δ²)) K(k)`.

use crate::elliptic::{complete_k, jacobi_unchecked, EllipticModulus};
use crate::error::{Error, Result};

/// Initial semi-amplitude `δ` and frequency scale `ω` of a Duffing solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuffingParams {
    delta: f64,
    omega: f64,
    modulus: EllipticModulus,
    frequency: f64,
}

impl DuffingParams {
    pub fn new(delta: f64, omega: f64) -> Result<Self> {
        if !delta.is_finite() || delta == 0.0 {
            return Err(Error::domain(
                "delta",
                delta,
                "amplitude must be finite and nonzero",
            ));
        }
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::domain(
                "omega",
                omega,
                "frequency scale must be positive",
            ));
        }
        let d2 = delta * delta;
        let modulus = EllipticModulus::new(delta.abs() / (2.0 * (1.0 + d2)).sqrt())?;
        Ok(Self {
            delta,
            omega,
            modulus,
            frequency: ((1.0 + d2) / omega).sqrt(),
        })
    }

    /// The unscaled equation `y'' + y + y³ = 0`.
    pub fn unscaled(delta: f64) -> Result<Self> {
        Self::new(delta, 1.0)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `k = |δ| / sqrt(2(1+δ²))`, always below `1/sqrt 2`.
    pub fn modulus(&self) -> EllipticModulus {
        self.modulus
    }

    /// Scale `sqrt((1+δ²)/ω)` applied to time inside `cn`.
    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn solution(&self, t: f64) -> f64 {
        self.delta * jacobi_unchecked(t * self.frequency, self.modulus).cn
    }

    pub fn velocity(&self, t: f64) -> f64 {
        self.state(t).1
    }

    /// `(Θ(t), Θ'(t))` from a single Jacobi evaluation.
    pub fn state(&self, t: f64) -> (f64, f64) {
        let j = jacobi_unchecked(t * self.frequency, self.modulus);
        (
            self.delta * j.cn,
            -self.delta * self.frequency * j.sn * j.dn,
        )
    }

    pub fn period(&self) -> f64 {
        4.0 * complete_k(self.modulus) / self.frequency
    }

    /// `E = δ²/2 + δ⁴/4`; defined for the unscaled equation only.
    pub fn energy(&self) -> Result<f64> {
        if self.omega != 1.0 {
            return Err(Error::domain(
                "omega",
                self.omega,
                "energy is defined for omega = 1",
            ));
        }
        let d2 = self.delta * self.delta;
        Ok(0.5 * d2 + 0.25 * d2 * d2)
    }
}

/// Energy `y'²/2 + y²/2 + y⁴/4` of an arbitrary phase point of the unscaled
/// equation.
pub fn phase_energy(y: f64, y_dot: f64) -> f64 {
    let y2 = y * y;
    0.5 * y_dot * y_dot + 0.5 * y2 + 0.25 * y2 * y2
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_params() {
        assert!(DuffingParams::new(0.0, 1.0).is_err());
        assert!(DuffingParams::new(1.0, 0.0).is_err());
        assert!(DuffingParams::new(1.0, -2.0).is_err());
        assert!(DuffingParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn modulus_stays_below_inverse_sqrt2() {
        for d in [1e-3, 1.0, 10.0, 1e4, -3.0] {
            let k = DuffingParams::unscaled(d).unwrap().modulus().value();
            assert!(k > 0.0 && k < std::f64::consts::FRAC_1_SQRT_2);
        }
    }

    #[test]
    fn initial_and_half_period_values() {
        let p = DuffingParams::new(1.7, 2.5).unwrap();
        assert_eq!(p.solution(0.0), 1.7);
        assert_eq!(p.velocity(0.0), 0.0);
        assert!((p.solution(0.5 * p.period()) + 1.7).abs() < 1e-12);
    }

    #[test]
    fn small_amplitude_period_limits() {
        let p = DuffingParams::unscaled(1e-8).unwrap();
        assert!((p.period() - 2.0 * PI).abs() < 1e-7);
        let p = DuffingParams::new(1e-8, 4.0).unwrap();
        assert!((p.period() - 4.0 * PI).abs() < 1e-7);
    }

    #[test]
    fn quarter_period_speed() {
        let p = DuffingParams::unscaled(1.0).unwrap();
        let v = p.velocity(0.25 * p.period());
        assert!((v.abs() - 1.5_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn energy_formula() {
        assert_eq!(
            DuffingParams::unscaled(1.0).unwrap().energy().unwrap(),
            0.75
        );
        assert!(DuffingParams::new(1.0, 2.0).unwrap().energy().is_err());
        assert_eq!(phase_energy(0.0, 0.0), 0.0);
    }

    #[test]
    fn negative_amplitude_keeps_sign_and_period() {
        let a = DuffingParams::unscaled(-1.3).unwrap();
        let b = DuffingParams::unscaled(1.3).unwrap();
        assert_eq!(a.period(), b.period());
        assert_eq!(a.solution(0.4), -b.solution(0.4));
        assert_eq!(a.energy().unwrap(), b.energy().unwrap());
    }

    #[test]
    fn period_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 1..=100 {
            let t = DuffingParams::unscaled(0.1 * i as f64).unwrap().period();
            assert!(t < prev);
            prev = t;
        }
    }
}
