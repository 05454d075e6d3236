//! Two-mode truncation of the nonlocal beam equation.
//!
//! With `u(x, t) = w(t) sin(mx) + z(t) sin(nx)` the beam reduces to
//!
//! ```text
//! w'' + m⁴ w + m² (m² w² + n² z²) w = 0
//! z'' + n⁴ z + n² (m² w² + n² z²) z = 0
//! ```
//!
//! The `m`-th mode is linearly stable with respect to the `n`-th when the
//! Hill equation `ξ'' + (ω + Θ_ω²) ξ = 0`, `ω = n²/m²`, is stable.

use std::fmt::Write as _;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::duffing::DuffingParams;
use crate::error::{Error, Result};
use crate::hill::{
    monodromy, omega_coefficient, MonodromyReport, Stability, DEFAULT_INTEGRATOR_TOL,
};
use crate::ode::{integrate_observed, IntegratorOptions};
use crate::tongues::format_float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModePair {
    m: u32,
    n: u32,
}

impl ModePair {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::domain(
                "m",
                m.min(n) as f64,
                "mode indices start at 1",
            ));
        }
        if m == n {
            return Err(Error::domain("n", n as f64, "modes must differ"));
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `n² / m²`.
    pub fn omega(&self) -> f64 {
        let (m, n) = (self.m as f64, self.n as f64);
        (n * n) / (m * m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BeamState {
    pub t: f64,
    pub w: f64,
    pub w_dot: f64,
    pub z: f64,
    pub z_dot: f64,
}

impl BeamState {
    fn from_array(t: f64, y: &[f64; 4]) -> Self {
        Self {
            t,
            w: y[0],
            w_dot: y[1],
            z: y[2],
            z_dot: y[3],
        }
    }

    fn to_array(self) -> [f64; 4] {
        [self.w, self.w_dot, self.z, self.z_dot]
    }
}

/// `(w', w'', z', z'')` of the coupled system.
pub fn coupled_rhs(pair: ModePair, state: &BeamState) -> [f64; 4] {
    rhs(pair, &state.to_array())
}

fn rhs(pair: ModePair, y: &[f64; 4]) -> [f64; 4] {
    let m2 = (pair.m as f64).powi(2);
    let n2 = (pair.n as f64).powi(2);
    let coupling = m2 * y[0] * y[0] + n2 * y[2] * y[2];
    [
        y[1],
        -m2 * m2 * y[0] - m2 * coupling * y[0],
        y[3],
        -n2 * n2 * y[2] - n2 * coupling * y[2],
    ]
}

/// Conserved energy `w'²/2 + z'²/2 + m⁴w²/2 + n⁴z²/2 + (m²w² + n²z²)²/4`.
pub fn energy(pair: ModePair, state: &BeamState) -> f64 {
    let m2 = (pair.m as f64).powi(2);
    let n2 = (pair.n as f64).powi(2);
    let s = state;
    let coupling = m2 * s.w * s.w + n2 * s.z * s.z;
    0.5 * (s.w_dot * s.w_dot + s.z_dot * s.z_dot)
        + 0.5 * (m2 * m2 * s.w * s.w + n2 * n2 * s.z * s.z)
        + 0.25 * coupling * coupling
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulateOptions {
    /// `z(0) = z_ratio δ`, in `(0, 0.1]`.
    pub z_ratio: f64,
    /// Final time; `None` means 50 periods `T_ω(δ)`.
    pub horizon: Option<f64>,
    pub tol: f64,
    /// Transfer is declared once `|z|` exceeds `growth_factor |z(0)|`. The
    /// growth saturates close to the tongue edges (about 48x at δ = 2.94 for
    /// the pair (1, 2)), so the threshold must stay well below that.
    pub growth_factor: f64,
    /// Points kept in the returned trajectory.
    pub samples: usize,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            z_ratio: 1e-3,
            horizon: None,
            tol: 1e-11,
            growth_factor: 20.0,
            samples: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum InstabilityVerdict {
    /// `|z|` first exceeded the growth threshold at `onset`.
    EnergyTransfer {
        onset: f64,
    },
    NoTransferObserved,
}

impl InstabilityVerdict {
    pub fn is_transfer(&self) -> bool {
        matches!(self, InstabilityVerdict::EnergyTransfer { .. })
    }

    pub fn onset(&self) -> Option<f64> {
        match *self {
            InstabilityVerdict::EnergyTransfer { onset } => Some(onset),
            InstabilityVerdict::NoTransferObserved => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Simulation {
    pub pair: ModePair,
    pub delta: f64,
    pub horizon: f64,
    pub verdict: InstabilityVerdict,
    /// Evenly spaced in time, endpoints included.
    pub trajectory: Vec<BeamState>,
    pub max_abs_z: f64,
    /// Largest `|E(t) - E(0)| / E(0)` over the recorded points.
    pub energy_drift: f64,
}

/// Default horizon `50 T_ω(δ)` for the pair's `ω`.
pub fn default_horizon(pair: ModePair, delta: f64) -> Result<f64> {
    Ok(50.0 * DuffingParams::new(delta, pair.omega())?.period())
}

/// Integrates the coupled system from `(δ, 0, z_ratio δ, 0)`.
pub fn simulate(pair: ModePair, delta: f64, opts: &SimulateOptions) -> Result<Simulation> {
    if !delta.is_finite() || delta == 0.0 {
        return Err(Error::domain(
            "delta",
            delta,
            "amplitude must be finite and nonzero",
        ));
    }
    if !(opts.z_ratio > 0.0 && opts.z_ratio <= 0.1) {
        return Err(Error::domain(
            "z_ratio",
            opts.z_ratio,
            "must lie in (0, 0.1]",
        ));
    }
    let horizon = match opts.horizon {
        Some(h) => h,
        None => default_horizon(pair, delta)?,
    };
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain("horizon", horizon, "must be positive"));
    }
    let samples = opts.samples.max(2);
    let stops: Vec<f64> = (1..samples)
        .map(|i| horizon * i as f64 / (samples - 1) as f64)
        .collect();
    let z0 = opts.z_ratio * delta;
    let start = BeamState {
        t: 0.0,
        w: delta,
        w_dot: 0.0,
        z: z0,
        z_dot: 0.0,
    };
    let threshold = opts.growth_factor * z0.abs();

    let mut trajectory = Vec::with_capacity(samples);
    trajectory.push(start);
    let mut next_stop = 0;
    let mut onset = None;
    let mut max_abs_z = z0.abs();
    integrate_observed(
        |_, y: &[f64; 4]| rhs(pair, y),
        0.0,
        start.to_array(),
        horizon,
        &stops,
        &IntegratorOptions::with_tol(opts.tol),
        |t, y| {
            max_abs_z = max_abs_z.max(y[2].abs());
            if onset.is_none() && y[2].abs() > threshold {
                onset = Some(t);
            }
            if next_stop < stops.len() && t == stops[next_stop] {
                trajectory.push(BeamState::from_array(t, y));
                next_stop += 1;
            }
            ControlFlow::Continue(())
        },
    )?;

    let e0 = energy(pair, &start);
    let energy_drift = trajectory
        .iter()
        .map(|s| ((energy(pair, s) - e0) / e0).abs())
        .fold(0.0, f64::max);
    Ok(Simulation {
        pair,
        delta,
        horizon,
        verdict: onset.map_or(InstabilityVerdict::NoTransferObserved, |onset| {
            InstabilityVerdict::EnergyTransfer { onset }
        }),
        trajectory,
        max_abs_z,
        energy_drift,
    })
}

/// Monodromy of `ξ'' + (ω + Θ_ω²) ξ = 0` for the pair's `ω`.
pub fn mode_monodromy(pair: ModePair, delta: f64) -> Result<MonodromyReport> {
    monodromy(
        &omega_coefficient(delta, pair.omega())?,
        DEFAULT_INTEGRATOR_TOL,
    )
}

/// Linear stability of mode `m` with respect to mode `n`. Depends on the
/// pair only through `ω`, so `(m, n)` and `(km, kn)` agree.
pub fn mode_stability(pair: ModePair, delta: f64) -> Result<Stability> {
    Ok(mode_monodromy(pair, delta)?.classification)
}

/// Bisects for the amplitude where [`mode_stability`] switches between
/// `Unstable` and not `Unstable`, given one amplitude on each side.
pub fn stability_switch(pair: ModePair, a: f64, b: f64, tol: f64) -> Result<f64> {
    let unstable = |d: f64| mode_stability(pair, d).map(|s| s == Stability::Unstable);
    let (mut lo, mut hi) = (a, b);
    let at_lo = unstable(lo)?;
    if at_lo == unstable(hi)? {
        return Err(Error::domain("b", b, "both ends have the same stability"));
    }
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if unstable(mid)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `t,w,w_dot,z,z_dot,energy` with 17 significant digits.
pub fn trajectory_csv(pair: ModePair, trajectory: &[BeamState]) -> String {
    let mut out = String::from("t,w,w_dot,z,z_dot,energy\n");
    for s in trajectory {
        let cols = [s.t, s.w, s.w_dot, s.z, s.z_dot, energy(pair, s)].map(format_float);
        let _ = writeln!(out, "{}", cols.join(","));
    }
    out
}
