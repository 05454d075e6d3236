//! Floquet analysis of Hill equations `ξ'' + p(t) ξ = 0`.
//!
//! The monodromy matrix is the principal fundamental matrix evaluated after
//! one period of `p`. Since the system is trace-free its determinant is 1,
//! so the multipliers are fixed by the trace alone: `|tr| < 2` means both
//! multipliers lie on the unit circle and every solution is bounded.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::duffing::DuffingParams;
use crate::elliptic::jacobi_unchecked;
use crate::error::{Error, Result};
use crate::ode::{integrate, IntegratorOptions};

pub const DEFAULT_INTEGRATOR_TOL: f64 = 1e-10;
pub const DEFAULT_TOL_BOUNDARY: f64 = 1e-4;
/// Level used for the published charts, which plotted `|tr| = 1.98`.
pub const CHART_LEVEL: f64 = 1.98;

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A continuous periodic coefficient `p(t)` with least period `period`.
#[derive(Clone)]
pub struct PeriodicCoefficient {
    eval: Eval,
    period: f64,
    analytic_min: Option<f64>,
    analytic_max: Option<f64>,
    single_extremum_pair: bool,
}

impl fmt::Debug for PeriodicCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicCoefficient")
            .field("period", &self.period)
            .field("analytic_min", &self.analytic_min)
            .field("analytic_max", &self.analytic_max)
            .field("single_extremum_pair", &self.single_extremum_pair)
            .finish()
    }
}

impl PeriodicCoefficient {
    pub fn new<F>(period: f64, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !period.is_finite() || period <= 0.0 {
            return Err(Error::domain("period", period, "period must be positive"));
        }
        Ok(Self {
            eval: Arc::new(eval),
            period,
            analytic_min: None,
            analytic_max: None,
            single_extremum_pair: false,
        })
    }

    /// Attaches exact bounds `min <= p(t) <= max`.
    pub fn with_bounds(mut self, min: f64, max: f64) -> Self {
        self.analytic_min = Some(min);
        self.analytic_max = Some(max);
        self
    }

    /// Declares that `p` has exactly one maximum and one minimum per period.
    pub fn with_single_extremum_pair(mut self, yes: bool) -> Self {
        self.single_extremum_pair = yes;
        self
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn analytic_min(&self) -> Option<f64> {
        self.analytic_min
    }

    pub fn analytic_max(&self) -> Option<f64> {
        self.analytic_max
    }

    pub fn single_extremum_pair(&self) -> bool {
        self.single_extremum_pair
    }

    /// `t -> p(t + t0)`; same period, bounds and extremum structure.
    pub fn shifted(&self, t0: f64) -> Self {
        let inner = Arc::clone(&self.eval);
        Self {
            eval: Arc::new(move |t| inner(t + t0)),
            ..self.clone()
        }
    }
}

/// `p(t) = γ + y(t)²` with `y'' + y + y³ = 0`, `y(0) = δ`, `y'(0) = 0`.
///
/// The period of `p` is half the Duffing period.
pub fn squared_duffing_coefficient(delta: f64, gamma: f64) -> Result<PeriodicCoefficient> {
    if !gamma.is_finite() {
        return Err(Error::domain("gamma", gamma, "must be finite"));
    }
    let duffing = DuffingParams::unscaled(delta)?;
    duffing_square_plus(duffing, gamma)
}

/// `p(t) = ω + Θ_ω(t)²` with `Θ_ω'' + (Θ_ω + Θ_ω³)/ω = 0`, `Θ_ω(0) = δ`.
pub fn omega_coefficient(delta: f64, omega: f64) -> Result<PeriodicCoefficient> {
    let duffing = DuffingParams::new(delta, omega)?;
    duffing_square_plus(duffing, omega)
}

fn duffing_square_plus(duffing: DuffingParams, shift: f64) -> Result<PeriodicCoefficient> {
    let d2 = duffing.delta() * duffing.delta();
    let k = duffing.modulus();
    let freq = duffing.frequency();
    let coeff = PeriodicCoefficient::new(0.5 * duffing.period(), move |t| {
        let cn = jacobi_unchecked(t * freq, k).cn;
        shift + d2 * cn * cn
    })?;
    Ok(coeff
        .with_bounds(shift, shift + d2)
        .with_single_extremum_pair(true))
}

/// Parameter plane of the two Hill families: `(δ, γ)` for `γ + y²` and
/// `(δ, ω)` for `ω + Θ_ω²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Gamma,
    Omega,
}

impl Plane {
    pub fn coefficient(self, delta: f64, value: f64) -> Result<PeriodicCoefficient> {
        match self {
            Plane::Gamma => squared_duffing_coefficient(delta, value),
            Plane::Omega => omega_coefficient(delta, value),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Plane::Gamma => "gamma",
            Plane::Omega => "omega",
        }
    }
}

/// Mathieu coefficient `a + 2q cos 2t`, period `pi`.
pub fn mathieu_coefficient(a: f64, q: f64) -> PeriodicCoefficient {
    let amp = 2.0 * q.abs();
    PeriodicCoefficient::new(PI, move |t| a + 2.0 * q * (2.0 * t).cos())
        .expect("pi is a valid period")
        .with_bounds(a - amp, a + amp)
        .with_single_extremum_pair(q != 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
    Boundary,
}

impl Stability {
    /// `Stable` iff `|tr| < level - tol`, `Unstable` iff `|tr| > level + tol`.
    pub fn classify(trace: f64, level: f64, tol_boundary: f64) -> Self {
        let a = trace.abs();
        if a < level - tol_boundary {
            Stability::Stable
        } else if a > level + tol_boundary {
            Stability::Unstable
        } else {
            Stability::Boundary
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MonodromyOptions {
    /// Absolute and relative tolerance of the integrator, in `[1e-12, 1e-6]`.
    pub tol: f64,
    /// Width of the band around `|tr| = level` classified as `Boundary`.
    pub tol_boundary: f64,
    /// Stability level for `|tr|`; 2 is the exact Floquet criterion.
    pub level: f64,
    pub max_steps: usize,
}

impl Default for MonodromyOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_INTEGRATOR_TOL,
            tol_boundary: DEFAULT_TOL_BOUNDARY,
            level: 2.0,
            max_steps: 10_000_000,
        }
    }
}

impl MonodromyOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(1e-12..=1e-6).contains(&self.tol) {
            return Err(Error::domain(
                "tol",
                self.tol,
                "integrator tolerance must lie in [1e-12, 1e-6]",
            ));
        }
        if !(self.level > 0.0 && self.level <= 2.0) {
            return Err(Error::domain(
                "level",
                self.level,
                "trace level must lie in (0, 2]",
            ));
        }
        Ok(())
    }

    fn integrator(&self) -> IntegratorOptions {
        IntegratorOptions {
            max_steps: self.max_steps,
            ..IntegratorOptions::with_tol(self.tol)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyReport {
    /// Columns are the solutions started from `(1, 0)` and `(0, 1)`.
    pub matrix: [[f64; 2]; 2],
    pub trace: f64,
    pub multipliers: [Complex64; 2],
    pub classification: Stability,
    /// `|det - 1|`.
    pub det_residual: f64,
}

/// Floquet multipliers of a unimodular 2x2 matrix with the given trace.
pub fn multipliers_from_trace(trace: f64) -> [Complex64; 2] {
    let disc = Complex64::new(trace * trace - 4.0, 0.0).sqrt();
    let half = Complex64::new(0.5 * trace, 0.0);
    [half + 0.5 * disc, half - 0.5 * disc]
}

/// Monodromy matrix with default classification settings.
pub fn monodromy(p: &PeriodicCoefficient, tol: f64) -> Result<MonodromyReport> {
    monodromy_with(p, &MonodromyOptions::with_tol(tol))
}

pub fn monodromy_with(p: &PeriodicCoefficient, opts: &MonodromyOptions) -> Result<MonodromyReport> {
    opts.validate()?;
    let rhs = |t: f64, s: &[f64; 4]| {
        let q = p.eval(t);
        [s[1], -q * s[0], s[3], -q * s[2]]
    };
    let sol = integrate(
        rhs,
        0.0,
        [1.0, 0.0, 0.0, 1.0],
        p.period(),
        &opts.integrator(),
    )?;
    let [x1, v1, x2, v2] = sol.y;
    let matrix = [[x1, x2], [v1, v2]];
    let trace = x1 + v2;
    let det = x1 * v2 - x2 * v1;
    Ok(MonodromyReport {
        matrix,
        trace,
        multipliers: multipliers_from_trace(trace),
        classification: Stability::classify(trace, opts.level, opts.tol_boundary),
        det_residual: (det - 1.0).abs(),
    })
}

/// Rotation number of a Hill equation, in units of half turns per period.
///
/// It equals `ℓ` exactly inside the instability interval `U_ℓ` and lies in
/// `(ℓ, ℓ+1)` on the stability interval between `U_ℓ` and `U_{ℓ+1}`. For a
/// constant coefficient `c` over a period `T` it is `sqrt(c) T / pi`.
///
/// The Prüfer angle `ξ = r sin θ`, `ξ' = r cos θ` is integrated along with
/// the fundamental matrix over one period; the induced circle map is then
/// iterated `iterations` times, so the result is within `1/iterations` of the
/// exact value.
pub fn rotation_number(
    p: &PeriodicCoefficient,
    tol: f64,
    iterations: usize,
) -> Result<(f64, MonodromyReport)> {
    let opts = MonodromyOptions::with_tol(tol);
    opts.validate()?;
    let rhs = |t: f64, s: &[f64; 5]| {
        let q = p.eval(t);
        let (sin, cos) = s[4].sin_cos();
        [s[1], -q * s[0], s[3], -q * s[2], cos * cos + q * sin * sin]
    };
    let sol = integrate(
        rhs,
        0.0,
        [1.0, 0.0, 0.0, 1.0, 0.0],
        p.period(),
        &opts.integrator(),
    )?;
    let [x1, v1, x2, v2, theta] = sol.y;
    let matrix = [[x1, x2], [v1, v2]];
    let lift = CircleLift::new(matrix, theta);
    let mut phi = 0.0;
    let n = iterations.max(1);
    for _ in 0..n {
        phi = lift.apply(phi);
    }
    let trace = x1 + v2;
    let det = x1 * v2 - x2 * v1;
    let report = MonodromyReport {
        matrix,
        trace,
        multipliers: multipliers_from_trace(trace),
        classification: Stability::classify(trace, 2.0, DEFAULT_TOL_BOUNDARY),
        det_residual: (det - 1.0).abs(),
    };
    Ok((phi / (n as f64 * PI), report))
}

/// Lift to the real line of the angle map `φ -> arg(M (sin φ, cos φ))`,
/// anchored at the integrated Prüfer angle for `φ = 0`.
struct CircleLift {
    matrix: [[f64; 2]; 2],
    table: Vec<f64>,
}

const LIFT_TABLE: usize = 512;

impl CircleLift {
    fn new(matrix: [[f64; 2]; 2], anchor: f64) -> Self {
        let mut table = Vec::with_capacity(LIFT_TABLE + 1);
        let mut prev_angle = Self::angle(&matrix, 0.0);
        let mut value = anchor;
        table.push(value);
        for j in 1..=LIFT_TABLE {
            let a = Self::angle(&matrix, j as f64 * PI / LIFT_TABLE as f64);
            value += Self::forward(a - prev_angle);
            prev_angle = a;
            table.push(value);
        }
        Self { matrix, table }
    }

    fn angle(m: &[[f64; 2]; 2], phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        let xi = m[0][0] * s + m[0][1] * c;
        let xi_dot = m[1][0] * s + m[1][1] * c;
        xi.atan2(xi_dot)
    }

    /// The map preserves orientation, so each increment lies in `[0, pi]`;
    /// wrapping into `[-pi/2, 3pi/2)` absorbs round-off on either side.
    fn forward(d: f64) -> f64 {
        let two_pi = 2.0 * PI;
        let mut d = d.rem_euclid(two_pi);
        if d >= 1.5 * PI {
            d -= two_pi;
        }
        d
    }

    fn apply(&self, phi: f64) -> f64 {
        let turns = (phi / PI).floor();
        let r = phi - turns * PI;
        let j = ((r / PI * LIFT_TABLE as f64) as usize).min(LIFT_TABLE - 1);
        let grid = j as f64 * PI / LIFT_TABLE as f64;
        let base = self.table[j]
            + Self::forward(Self::angle(&self.matrix, r) - Self::angle(&self.matrix, grid));
        turns * PI + base
    }
}

/// Which closed-form solution of `ξ'' + (γ + y²) ξ = 0` to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactSolution {
    /// `ξ = cn(t sqrt(1+δ²))` solves the equation at `γ = 1`.
    CnAtGammaOne,
    /// `ξ = sn(t sqrt(1+δ²))` solves it at `γ = 1 + δ²/2`.
    SnAtParabola,
    /// `ξ = dn(t sqrt(1+δ²))` solves it at `γ = -δ²/2`.
    DnAtNegativeParabola,
}

impl ExactSolution {
    pub fn gamma(self, delta: f64) -> f64 {
        let d2 = delta * delta;
        match self {
            ExactSolution::CnAtGammaOne => 1.0,
            ExactSolution::SnAtParabola => 1.0 + 0.5 * d2,
            ExactSolution::DnAtNegativeParabola => -0.5 * d2,
        }
    }
}

/// Largest `|ξ'' + (γ + y²) ξ|` over `t_samples`, with `ξ''` obtained
/// analytically from the derivative identities of `sn`, `cn`, `dn`.
pub fn exact_solution_residual(kind: ExactSolution, delta: f64, t_samples: &[f64]) -> Result<f64> {
    let duffing = DuffingParams::unscaled(delta)?;
    let k = duffing.modulus();
    let k2 = k.value() * k.value();
    let s = duffing.frequency();
    let s2 = s * s;
    let gamma = kind.gamma(delta);
    let d2 = delta * delta;
    let mut worst: f64 = 0.0;
    for &t in t_samples {
        let j = jacobi_unchecked(t * s, k);
        let (xi, xi_ddot) = match kind {
            ExactSolution::CnAtGammaOne => (j.cn, -s2 * j.cn * (j.dn * j.dn - k2 * j.sn * j.sn)),
            ExactSolution::SnAtParabola => (j.sn, -s2 * j.sn * (j.dn * j.dn + k2 * j.cn * j.cn)),
            ExactSolution::DnAtNegativeParabola => {
                (j.dn, -s2 * k2 * j.dn * (j.cn * j.cn - j.sn * j.sn))
            }
        };
        let p = gamma + d2 * j.cn * j.cn;
        worst = worst.max((xi_ddot + p * xi).abs());
    }
    Ok(worst)
}
