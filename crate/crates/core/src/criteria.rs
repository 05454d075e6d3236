//! Sufficient stability conditions for Hill equations.
//!
//! Three classical tests are implemented for arbitrary coefficients:
//!
//! * **Li-Zhang** (an `L²` Lyapunov-type test): `p >= 0` and
//!   `T³ ∫₀ᵀ p² dt < (64/3) σ⁴`.
//! * **Zhukovskii**: `ℓ²π²/T² <= p(t) <= (ℓ+1)²π²/T²` for some integer `ℓ >= 0`.
//! * **Burdina**: `p > 0` with a single maximum and minimum per period, and
//!   with `A = ∫₀ᵀ sqrt(p) dt`, `B = ½ log(max p / min p)`,
//!   `ℓπ < A - B` and `A + B < (ℓ+1)π`.
//!
//! For the squared Duffing coefficients the Burdina phase integral reduces to
//! the elliptic-type integrals [`phi`] and [`psi`], giving closed-form
//! conditions that need no time integration.
//!
//! Every test only ever certifies stability. A failed test says nothing, so
//! the outcome is [`Outcome::Inconclusive`] rather than "unstable".

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::elliptic::sigma_constant;
use crate::error::{Error, Result};
use crate::hill::{PeriodicCoefficient, Plane};
use crate::quadrature::{integrate, QuadratureOptions};

/// Smallest slack accepted on a strict inequality.
pub const MIN_MARGIN: f64 = 1e-10;

/// Samples per period used when a coefficient carries no analytic bounds.
const BOUND_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Criterion {
    LiZhang,
    Zhukovskii,
    Burdina,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [
        Criterion::LiZhang,
        Criterion::Zhukovskii,
        Criterion::Burdina,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::LiZhang => "li_zhang",
            Criterion::Zhukovskii => "zhukovskii",
            Criterion::Burdina => "burdina",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    GuaranteedStable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub criterion: Criterion,
    pub outcome: Outcome,
    pub witness_ell: Option<u32>,
    pub quantities: BTreeMap<String, f64>,
    /// Why the test could not be applied, when a precondition failed.
    pub note: Option<String>,
}

impl CriterionVerdict {
    fn new(criterion: Criterion) -> Self {
        Self {
            criterion,
            outcome: Outcome::Inconclusive,
            witness_ell: None,
            quantities: BTreeMap::new(),
            note: None,
        }
    }

    fn with(mut self, name: &str, value: f64) -> Self {
        self.quantities.insert(name.to_string(), value);
        self
    }

    fn skipped(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn stable(mut self, ell: Option<u32>) -> Self {
        self.outcome = Outcome::GuaranteedStable;
        self.witness_ell = ell;
        self
    }

    pub fn is_stable(&self) -> bool {
        self.outcome == Outcome::GuaranteedStable
    }

    /// `S` or `I`, as written in criteria maps.
    pub fn symbol(&self) -> char {
        if self.is_stable() {
            'S'
        } else {
            'I'
        }
    }

    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.quantities.get(name).copied()
    }
}

fn quad_opts() -> QuadratureOptions {
    QuadratureOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_intervals: 20_000,
    }
}

/// Lower and upper bounds of `p` over one period: the analytic ones when
/// available, otherwise sampled extremes widened by the observed slope.
pub fn coefficient_bounds(p: &PeriodicCoefficient) -> (f64, f64) {
    if let (Some(lo), Some(hi)) = (p.analytic_min(), p.analytic_max()) {
        return (lo, hi);
    }
    let h = p.period() / BOUND_SAMPLES as f64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut slope: f64 = 0.0;
    let mut prev = p.eval(0.0);
    for i in 0..=BOUND_SAMPLES {
        let v = p.eval(i as f64 * h);
        lo = lo.min(v);
        hi = hi.max(v);
        slope = slope.max((v - prev).abs() / h);
        prev = v;
    }
    let pad = slope * h;
    (lo - pad, hi + pad)
}

/// Li-Zhang test: `p >= 0` and `T³ ∫₀ᵀ p² < (64/3) σ⁴`, with `T` the
/// period of `p`.
pub fn li_zhang(p: &PeriodicCoefficient) -> CriterionVerdict {
    let v = CriterionVerdict::new(Criterion::LiZhang);
    let (lo, _) = coefficient_bounds(p);
    if lo < 0.0 {
        return v
            .with("min", lo)
            .skipped("coefficient takes negative values");
    }
    let t = p.period();
    let bound = 64.0 / 3.0 * sigma_constant().powi(4);
    let q = match integrate(|s| p.eval(s).powi(2), 0.0, t, quad_opts()) {
        Ok(q) => q,
        Err(e) => return v.skipped(e.to_string()),
    };
    let t3 = t * t * t;
    let lhs = t3 * q.value;
    let margin = (t3 * q.error).max(MIN_MARGIN);
    let v = v.with("lhs", lhs).with("bound", bound).with("period", t);
    if lhs < bound - margin {
        v.stable(None)
    } else {
        v
    }
}

/// Zhukovskii test with the unique candidate `ℓ = floor(T sqrt(min p) / π)`.
pub fn zhukovskii(p: &PeriodicCoefficient) -> CriterionVerdict {
    let v = CriterionVerdict::new(Criterion::Zhukovskii);
    let (lo, hi) = coefficient_bounds(p);
    let v = v.with("min", lo).with("max", hi);
    if lo < 0.0 {
        return v.skipped("coefficient takes negative values");
    }
    let t = p.period();
    let unit = PI * PI / (t * t);
    let ell = ((lo / unit).sqrt()).floor();
    let lower = ell * ell * unit;
    let upper = (ell + 1.0) * (ell + 1.0) * unit;
    let v = v.with("lower_level", lower).with("upper_level", upper);
    // for ell = 0 the lower inequality is just p >= 0
    let lower_ok = ell == 0.0 || lo >= lower + MIN_MARGIN;
    if lower_ok && hi <= upper - MIN_MARGIN {
        v.stable(Some(ell as u32))
    } else {
        v
    }
}

/// Burdina test on an arbitrary coefficient.
pub fn burdina(p: &PeriodicCoefficient) -> CriterionVerdict {
    let v = CriterionVerdict::new(Criterion::Burdina);
    if !p.single_extremum_pair() {
        return v.skipped("coefficient is not known to have a single extremum pair");
    }
    let (lo, hi) = coefficient_bounds(p);
    if lo <= 0.0 {
        return v.with("min", lo).skipped("coefficient is not positive");
    }
    let q = match integrate(|s| p.eval(s).max(0.0).sqrt(), 0.0, p.period(), quad_opts()) {
        Ok(q) => q,
        Err(e) => return v.skipped(e.to_string()),
    };
    let half_log = 0.5 * (hi / lo).ln();
    let margin = q.error.max(MIN_MARGIN);
    burdina_window(v, "phase_integral", q.value, half_log, margin)
}

/// Shared final step: is `[A - B, A + B]` strictly inside `(ℓπ, (ℓ+1)π)`?
fn burdina_window(
    v: CriterionVerdict,
    name: &str,
    phase: f64,
    half_log: f64,
    margin: f64,
) -> CriterionVerdict {
    let ell = (phase / PI).floor().max(0.0);
    let v = v.with(name, phase).with("half_log_ratio", half_log);
    if phase - half_log > ell * PI + margin && phase + half_log < (ell + 1.0) * PI - margin {
        v.stable(Some(ell as u32))
    } else {
        v
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::domain(name, value, "must be positive"));
    }
    Ok(())
}

/// `∫₀^{π/2} sqrt((c + δ² sin²θ) / (2 + δ² + δ² sin²θ)) dθ`.
fn phase_kernel(delta: f64, c: f64) -> Result<f64> {
    let d2 = delta * delta;
    let q = integrate(
        |th| {
            let s2 = th.sin().powi(2);
            ((c + d2 * s2) / (2.0 + d2 + d2 * s2)).sqrt()
        },
        0.0,
        FRAC_PI_2,
        quad_opts(),
    )?;
    Ok(q.value)
}

/// `Φ(δ, γ) = 2 sqrt 2 ∫₀^{π/2} sqrt((γ + δ² sin²θ)/(2 + δ² + δ² sin²θ)) dθ`,
/// which equals `∫₀^{T/2} sqrt(γ + y(t)²) dt` over one period of the
/// squared Duffing coefficient. `γ = 0` is allowed.
pub fn phi(delta: f64, gamma: f64) -> Result<f64> {
    check_positive("delta", delta)?;
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::domain("gamma", gamma, "must be nonnegative"));
    }
    Ok(2.0 * SQRT_2 * phase_kernel(delta, gamma)?)
}

/// `Ψ(δ, ω) = 2 sqrt(2ω) ∫₀^{π/2} sqrt((ω + δ² sin²θ)/(2 + δ² + δ² sin²θ)) dθ`,
/// the phase integral of `ω + Θ_ω²` over its period.
pub fn psi(delta: f64, omega: f64) -> Result<f64> {
    check_positive("delta", delta)?;
    check_positive("omega", omega)?;
    let d2 = delta * delta;
    let q = integrate(
        |th| {
            let s2 = th.sin().powi(2);
            ((omega + d2 * s2) / (2.0 + d2 + d2 * s2)).sqrt()
        },
        0.0,
        FRAC_PI_2,
        quad_opts(),
    )?;
    Ok(2.0 * (2.0 * omega).sqrt() * q.value)
}

/// Burdina test for `ξ'' + (γ + y²) ξ = 0` in closed form:
/// `log(1 + δ²/γ) < 2 min{Φ - ℓπ, (ℓ+1)π - Φ}`.
pub fn burdina_condition_gamma(delta: f64, gamma: f64) -> CriterionVerdict {
    closed_form_burdina(delta, gamma, "phi", phi)
}

/// Burdina test for `ξ'' + (ω + Θ_ω²) ξ = 0` with `Ψ` in place of `Φ`.
pub fn burdina_condition_omega(delta: f64, omega: f64) -> CriterionVerdict {
    closed_form_burdina(delta, omega, "psi", psi)
}

fn closed_form_burdina(
    delta: f64,
    c: f64,
    name: &str,
    phase: fn(f64, f64) -> Result<f64>,
) -> CriterionVerdict {
    let v = CriterionVerdict::new(Criterion::Burdina);
    if !(delta > 0.0 && c > 0.0) {
        return v.skipped("requires delta > 0 and a positive minimum");
    }
    let value = match phase(delta, c) {
        Ok(x) => x,
        Err(e) => return v.skipped(e.to_string()),
    };
    let log_term = (delta * delta / c).ln_1p();
    burdina_window(
        v.with("log_term", log_term),
        name,
        value,
        0.5 * log_term,
        MIN_MARGIN,
    )
}

/// `g(δ) = (T³/8) ∫₀^{T/2} y⁴ dt`, the Li-Zhang quantity of `y²`, computed as
/// `64 I₄ I₀³` with `I_j = ∫₀^{π/2} sin^j α / sqrt(2/δ² + 1 + sin²α) dα`.
///
/// Increases from 0 towards `(64/3) σ⁴`.
pub fn g_function(delta: f64) -> Result<f64> {
    check_positive("delta", delta)?;
    let c = 2.0 / (delta * delta) + 1.0;
    let i4 = integrate(
        |a| {
            let s2 = a.sin().powi(2);
            s2 * s2 / (c + s2).sqrt()
        },
        0.0,
        FRAC_PI_2,
        quad_opts(),
    )?
    .value;
    let i0 = integrate(
        |a| 1.0 / (c + a.sin().powi(2)).sqrt(),
        0.0,
        FRAC_PI_2,
        quad_opts(),
    )?
    .value;
    Ok(64.0 * i4 * i0.powi(3))
}

/// The three verdicts for one point of a parameter plane. The Burdina
/// column uses the closed form.
pub fn evaluate_all(plane: Plane, delta: f64, value: f64) -> [CriterionVerdict; 3] {
    let coefficient = plane.coefficient(delta, value);
    let (lz, zk) = match &coefficient {
        Ok(p) => (li_zhang(p), zhukovskii(p)),
        Err(e) => (
            CriterionVerdict::new(Criterion::LiZhang).skipped(e.to_string()),
            CriterionVerdict::new(Criterion::Zhukovskii).skipped(e.to_string()),
        ),
    };
    let bd = match plane {
        Plane::Gamma => burdina_condition_gamma(delta.abs(), value),
        Plane::Omega => burdina_condition_omega(delta.abs(), value),
    };
    [lz, zk, bd]
}
