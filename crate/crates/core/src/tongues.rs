//! Resonance tongues in the `(δ, γ)` and `(δ, ω)` planes.
//!
//! Numerically, a tongue is where `|tr M| > 2` for the monodromy matrix `M`.
//! This module scans planes cell by cell, locates tongue edges by bisection
//! on `|tr| - level`, and collects the closed-form facts that are known
//! about the tongues: the exact first tongue `1 < γ < 1 + δ²/2`, the stable
//! strip `-δ²/2 < γ < 1`, the small-amplitude parabolas bounding `U_ℓ` for
//! `ℓ >= 2`, and the large-amplitude classification of `ω`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hill::{
    monodromy_with, rotation_number, MonodromyOptions, Plane, Stability, DEFAULT_TOL_BOUNDARY,
};

/// Inclusive, evenly spaced axis `lo + i (hi - lo) / (count - 1)`. A
/// single point is written `lo == hi` with `count == 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::domain("hi", hi, "axis endpoints must be finite"));
        }
        if count == 1 && lo == hi {
            return Ok(Self { lo, hi, count });
        }
        if lo >= hi {
            return Err(Error::domain("hi", hi, "axis range must satisfy lo < hi"));
        }
        if count < 2 {
            return Err(Error::domain(
                "count",
                count as f64,
                "an axis needs at least two points",
            ));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.hi;
        }
        self.lo + i as f64 * (self.hi - self.lo) / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    pub integrator_tol: f64,
    pub tol_boundary: f64,
    /// `|tr|` level separating stable from unstable cells.
    pub level: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            integrator_tol: crate::hill::DEFAULT_INTEGRATOR_TOL,
            tol_boundary: DEFAULT_TOL_BOUNDARY,
            level: 2.0,
        }
    }
}

impl ScanSettings {
    fn monodromy(&self) -> MonodromyOptions {
        MonodromyOptions {
            tol: self.integrator_tol,
            tol_boundary: self.tol_boundary,
            level: self.level,
            ..MonodromyOptions::default()
        }
    }
}

/// Monodromy traces and classifications over a rectangular grid. Indexing
/// is `[i][j]` with `i` along the δ axis and `j` along the second axis.
/// Failed cells hold `NaN` and no classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityGrid {
    pub plane: Plane,
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    pub trace: Vec<Vec<f64>>,
    pub classification: Vec<Vec<Option<Stability>>>,
    pub settings: ScanSettings,
}

impl StabilityGrid {
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64, Option<Stability>)> + '_ {
        self.x_axis.iter().enumerate().flat_map(move |(i, &x)| {
            self.y_axis
                .iter()
                .enumerate()
                .map(move |(j, &y)| (x, y, self.trace[i][j], self.classification[i][j]))
        })
    }

    /// `x,y,trace,class` with 17 significant digits and `nan` for failed
    /// cells. The output depends only on the grid contents.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,trace,class\n");
        for (x, y, tr, class) in self.cells() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                format_float(x),
                format_float(y),
                format_float(tr),
                class.map_or("nan", Stability::as_str)
            );
        }
        out
    }
}

/// Scientific notation with 17 significant digits; `nan` for NaN. Negative
/// zero prints as zero.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{:.16e}", v + 0.0)
    }
}

/// Monodromy trace at every grid cell. Cells are independent and computed in
/// parallel on the current rayon pool; results land in fixed slots so the
/// grid does not depend on scheduling.
pub fn scan(
    plane: Plane,
    x_range: AxisRange,
    y_range: AxisRange,
    settings: ScanSettings,
) -> Result<StabilityGrid> {
    let opts = settings.monodromy();
    // surface configuration errors before spawning work
    opts.validate()?;
    let xs = x_range.values();
    let ys = y_range.values();
    let cells: Vec<(f64, Option<Stability>)> = (0..xs.len() * ys.len())
        .into_par_iter()
        .map(|idx| {
            let (x, y) = (xs[idx / ys.len()], ys[idx % ys.len()]);
            match plane
                .coefficient(x, y)
                .and_then(|p| monodromy_with(&p, &opts))
            {
                Ok(r) => (r.trace, Some(r.classification)),
                Err(_) => (f64::NAN, None),
            }
        })
        .collect();
    let mut trace = Vec::with_capacity(xs.len());
    let mut classification = Vec::with_capacity(xs.len());
    for row in cells.chunks(ys.len()) {
        trace.push(row.iter().map(|c| c.0).collect());
        classification.push(row.iter().map(|c| c.1).collect());
    }
    Ok(StabilityGrid {
        plane,
        x_axis: xs,
        y_axis: ys,
        trace,
        classification,
        settings,
    })
}

/// Exact first tongue of `ξ'' + (γ + y²) ξ = 0`: `1 < γ < 1 + δ²/2`.
pub fn first_tongue_gamma(delta: f64) -> (f64, f64) {
    (1.0, 1.0 + 0.5 * delta * delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StripVerdict {
    Stable,
    Unstable,
    /// No closed-form statement applies.
    Outside,
}

/// `Stable` for `-δ²/2 < γ < 1`, `Unstable` for `γ < -δ²/2`.
pub fn stability_strip_gamma(delta: f64, gamma: f64) -> StripVerdict {
    let lower = -0.5 * delta * delta;
    if gamma > lower && gamma < 1.0 {
        StripVerdict::Stable
    } else if gamma < lower {
        StripVerdict::Unstable
    } else {
        StripVerdict::Outside
    }
}

/// Leading-order parabolas enclosing the tongue `U_ℓ`, `ℓ >= 2`, as
/// `δ -> 0`. Valid up to `O(δ⁴)`.
///
/// * γ plane: `ℓ² + (3ℓ²/4 - 1/2 ∓ 1/(πℓ)) δ²`
/// * ω plane: `ℓ + (3ℓ/8 - 1/4 ∓ 1/(2πℓ)) δ²`
pub fn asymptotic_tongue_bounds(plane: Plane, ell: u32, delta: f64) -> Result<(f64, f64)> {
    if ell < 2 {
        return Err(Error::domain(
            "ell",
            ell as f64,
            "parabolic bounds hold for tongues with ell >= 2",
        ));
    }
    let l = ell as f64;
    let d2 = delta * delta;
    Ok(match plane {
        Plane::Gamma => {
            let base = 0.75 * l * l - 0.5;
            let spread = 1.0 / (PI * l);
            (l * l + (base - spread) * d2, l * l + (base + spread) * d2)
        }
        Plane::Omega => {
            let base = 0.375 * l - 0.25;
            let spread = 0.5 / (PI * l);
            (l + (base - spread) * d2, l + (base + spread) * d2)
        }
    })
}

/// Where the tongue `U_ℓ` emanates from on the `δ = 0` axis.
pub fn tongue_tip(plane: Plane, ell: u32) -> f64 {
    let l = ell as f64;
    match plane {
        Plane::Gamma => l * l,
        Plane::Omega => l,
    }
}

/// Edges of one tongue at fixed δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TongueBoundarySample {
    pub plane: Plane,
    pub ell: u32,
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
    /// Largest `|tr|` seen inside the tongue.
    pub peak_trace: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketOptions {
    /// `|tr|` level whose crossings are located.
    pub threshold: f64,
    /// Bisection stops once the bracket is this narrow.
    pub param_tol: f64,
    pub integrator_tol: f64,
    /// Search window; derived from the tongue index and δ when `None`.
    pub window: Option<(f64, f64)>,
    pub samples: usize,
}

impl Default for BracketOptions {
    fn default() -> Self {
        Self {
            threshold: 2.0,
            param_tol: 1e-6,
            integrator_tol: 1e-11,
            window: None,
            samples: 400,
        }
    }
}

/// Default search window for `U_ℓ` at amplitude δ.
///
/// Small δ uses the parabolic bounds, widened by their own gap plus `5δ⁴`
/// but never by more than half the spacing of neighbouring tips. `U_1`
/// starts exactly where the parameter is 1 in both planes, so its window is
/// anchored there. In the ω plane its upper edge tends to 3 as δ grows.
pub fn default_window(plane: Plane, ell: u32, delta: f64) -> (f64, f64) {
    let d2 = delta * delta;
    if ell == 1 {
        return match plane {
            Plane::Gamma => (0.75, 1.25 + 0.6 * d2),
            Plane::Omega => (0.75, (1.5 + 0.3 * d2).min(3.75)),
        };
    }
    let (a, b) = asymptotic_tongue_bounds(plane, ell, delta).expect("ell >= 2");
    let spacing = match plane {
        Plane::Gamma => 2.0 * ell as f64 + 1.0,
        Plane::Omega => 1.0,
    };
    let pad = ((b - a) + 5.0 * d2 * d2 + 1e-9).min(0.5 * spacing);
    (a - pad, b + pad)
}

type Matrix = [[f64; 2]; 2];

/// Locates the two parameter values (γ or ω) where `|tr|` crosses
/// `threshold` around tongue `ℓ` at fixed δ.
///
/// Both coefficient families are even in `t`, so the monodromy matrix has
/// equal diagonal entries and `x1² - 1 = x2 v1`. At the exact level 2 the
/// tongue edges are therefore the simple zeros of `x2` and `v1`, which stay
/// detectable when the tongue is far thinner than the sampling step and
/// `|tr| - 2` is lost in rounding. Below level 2 the edges are the sign
/// changes of `|tr| - threshold`. Every sign change found on the sampled
/// window is bisected down to `param_tol`. A closed tongue, where both
/// zeros coincide and `M = ±I`, comes back with `lower` and `upper` within a
/// few `param_tol` of each other and a peak trace of 2.
pub fn trace_level_bracket(
    plane: Plane,
    ell: u32,
    delta: f64,
    opts: &BracketOptions,
) -> Result<TongueBoundarySample> {
    if ell == 0 {
        return Err(Error::domain("ell", 0.0, "tongue index starts at 1"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::domain("delta", delta, "must be positive"));
    }
    if !(opts.threshold > 0.0 && opts.threshold <= 2.0) {
        return Err(Error::domain(
            "threshold",
            opts.threshold,
            "must lie in (0, 2]",
        ));
    }
    let mono = MonodromyOptions::with_tol(opts.integrator_tol);
    let matrix = |v: f64| -> Result<Matrix> {
        Ok(monodromy_with(&plane.coefficient(delta, v)?, &mono)?.matrix)
    };
    let trace = |m: &Matrix| m[0][0] + m[1][1];
    let exact = opts.threshold == 2.0;
    let edge_fns: Vec<fn(&Matrix, f64) -> f64> = if exact {
        vec![|m, _| m[0][1], |m, _| m[1][0]]
    } else {
        vec![|m, level| (m[0][0] + m[1][1]).abs() - level]
    };
    let inside = |m: &Matrix| {
        if exact {
            m[0][1] * m[1][0] > 0.0
        } else {
            trace(m).abs() > opts.threshold
        }
    };
    let anchor = if ell == 1 {
        1.0
    } else {
        let (a, b) = asymptotic_tongue_bounds(plane, ell, delta)?;
        0.5 * (a + b)
    };

    let (mut lo, mut hi) = opts
        .window
        .unwrap_or_else(|| default_window(plane, ell, delta));
    let floor = if plane == Plane::Omega {
        1e-6
    } else {
        f64::NEG_INFINITY
    };
    lo = lo.max(floor);
    let n = opts.samples.max(8);
    for _ in 0..8 {
        let xs: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let ms: Vec<Matrix> = xs.iter().map(|&v| matrix(v)).collect::<Result<_>>()?;
        // an unstable window end means the tongue may continue past it
        if inside(&ms[0]) && lo > floor {
            lo = (lo - (hi - lo)).max(floor);
            continue;
        }
        if inside(&ms[n - 1]) {
            hi += hi - lo;
            continue;
        }

        let mut edges: Vec<(f64, usize)> = Vec::new();
        for (kind, g) in edge_fns.iter().enumerate() {
            for i in 0..n - 1 {
                let (ga, gb) = (g(&ms[i], opts.threshold), g(&ms[i + 1], opts.threshold));
                if (ga > 0.0) != (gb > 0.0) {
                    let f = |v: f64| matrix(v).map(|m| g(&m, opts.threshold) > 0.0);
                    edges.push((bisect(f, xs[i], xs[i + 1], ga > 0.0, opts.param_tol)?, kind));
                }
            }
        }
        edges.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut best: Option<(f64, f64, f64)> = None;
        for pair in edges.windows(2) {
            let ((a, ka), (b, kb)) = (pair[0], pair[1]);
            let m = matrix(0.5 * (a + b))?;
            // x2 and v1 vanishing together: a closed tongue
            let closed = ka != kb && b - a <= 4.0 * opts.param_tol;
            if !(inside(&m) || closed) {
                continue;
            }
            let key = |x: &(f64, f64, f64)| {
                if ell == 1 {
                    (x.0 - anchor).abs()
                } else {
                    (0.5 * (x.0 + x.1) - anchor).abs()
                }
            };
            let peak = xs
                .iter()
                .zip(&ms)
                .filter(|(&x, _)| x > a && x < b)
                .map(|(_, m)| trace(m).abs())
                .fold(trace(&m).abs(), f64::max);
            let cand = (a, b, peak);
            if best.is_none_or(|cur| key(&cand) < key(&cur)) {
                best = Some(cand);
            }
        }
        return match best {
            Some((lower, upper, peak_trace)) => Ok(TongueBoundarySample {
                plane,
                ell,
                delta,
                lower,
                upper,
                peak_trace,
            }),
            None => Err(Error::BracketNotFound { ell, delta, lo, hi }),
        };
    }
    Err(Error::BracketNotFound { ell, delta, lo, hi })
}

/// Bisection on a sign predicate with `positive(a) == pos_at_a`.
fn bisect<F: Fn(f64) -> Result<bool>>(
    positive: F,
    mut a: f64,
    mut b: f64,
    pos_at_a: bool,
    tol: f64,
) -> Result<f64> {
    while (b - a).abs() > tol {
        let mid = 0.5 * (a + b);
        if positive(mid)? == pos_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsymptoticClass {
    UnstableAtInfinity,
    StableAtInfinity,
    Boundary,
}

/// Large-amplitude behaviour of `ξ'' + (ω + Θ_ω²) ξ = 0`.
///
/// The endpoints are the triangular numbers `j(j+1)/2`; `ω` between the
/// `j`-th and `(j+1)`-th lies in `I_S` for even `j` and in `I_U` for odd `j`.
pub fn asymptotic_classification(omega: f64) -> Result<AsymptoticClass> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain("omega", omega, "must be positive"));
    }
    let tri = |j: u64| (j * (j + 1) / 2) as f64;
    let mut j = (((8.0 * omega + 1.0).sqrt() - 1.0) / 2.0).floor() as u64;
    // correct the float estimate
    while tri(j) > omega {
        j -= 1;
    }
    while tri(j + 1) <= omega {
        j += 1;
    }
    Ok(if tri(j) == omega {
        AsymptoticClass::Boundary
    } else if j.is_multiple_of(2) {
        AsymptoticClass::StableAtInfinity
    } else {
        AsymptoticClass::UnstableAtInfinity
    })
}

/// Minimum number of resonance lines crossed along `δ ∈ (0, ∞)` at fixed
/// `ω ∈ (0, 7]`, tabulated. `ω = 1` lies on a resonance line and has no
/// entry.
pub fn crossing_count(omega: f64) -> Result<u32> {
    if !(omega > 0.0 && omega <= 7.0) || omega == 1.0 {
        return Err(Error::domain(
            "omega",
            omega,
            "tabulated for omega in (0, 1) and (1, 7]",
        ));
    }
    Ok(match omega {
        w if w < 1.0 => 0,
        w if w <= 2.0 => 1,
        w if w < 3.0 => 3,
        3.0 => 2,
        w if w <= 4.0 => 4,
        w if w <= 5.0 => 6,
        w if w < 6.0 => 8,
        6.0 => 7,
        _ => 9,
    })
}

/// Position of a point relative to the tongue structure, counted in
/// resonance lines from the bottom: the stable zone below `U_1` is 0, `U_ℓ`
/// is `2ℓ - 1`, and the stable zone between `U_ℓ` and `U_{ℓ+1}` is `2ℓ`.
/// Derived from the rotation number, so tongues thinner than any scan step
/// are still accounted for.
pub fn band_position(plane: Plane, delta: f64, value: f64, integrator_tol: f64) -> Result<i64> {
    let p = plane.coefficient(delta, value)?;
    let (rho, report) = rotation_number(&p, integrator_tol, 4096)?;
    // the raw trace, not the classification: boundary cells still belong to a side
    Ok(if report.trace.abs() > 2.0 {
        2 * rho.round() as i64 - 1
    } else {
        2 * rho.floor() as i64
    })
}

/// Counts resonance lines crossed along `ω = const` over the given δ values
/// by summing jumps of [`band_position`].
pub fn recount_crossings(omega: f64, deltas: &[f64], integrator_tol: f64) -> Result<u32> {
    let bands: Vec<i64> = deltas
        .par_iter()
        .map(|&d| band_position(Plane::Omega, d, omega, integrator_tol))
        .collect::<Result<_>>()?;
    Ok(bands
        .windows(2)
        .map(|w| (w[1] - w[0]).unsigned_abs() as u32)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_endpoints_exact() {
        let a = AxisRange::new(-2.0, 6.0, 160).unwrap();
        assert_eq!(a.value(0), -2.0);
        assert_eq!(a.value(159), 6.0);
        assert!(AxisRange::new(1.0, 1.0, 5).is_err());
        assert!(AxisRange::new(0.0, 1.0, 1).is_err());
        assert!(AxisRange::new(1.0, 1.0, 0).is_err());
        assert_eq!(AxisRange::new(1.5, 1.5, 1).unwrap().values(), vec![1.5]);
    }

    #[test]
    fn first_tongue_formula() {
        assert_eq!(first_tongue_gamma(0.0), (1.0, 1.0));
        assert_eq!(first_tongue_gamma(2.0), (1.0, 3.0));
    }

    #[test]
    fn strip_verdicts() {
        assert_eq!(stability_strip_gamma(1.0, 0.0), StripVerdict::Stable);
        assert_eq!(stability_strip_gamma(1.0, -1.0), StripVerdict::Unstable);
        assert_eq!(stability_strip_gamma(1.0, 2.0), StripVerdict::Outside);
        assert_eq!(stability_strip_gamma(1.0, -0.5), StripVerdict::Outside);
    }

    #[test]
    fn asymptotic_bounds_values() {
        assert_eq!(
            asymptotic_tongue_bounds(Plane::Gamma, 2, 0.0).unwrap(),
            (4.0, 4.0)
        );
        let (a, b) = asymptotic_tongue_bounds(Plane::Gamma, 2, 0.1).unwrap();
        assert!((a - (4.0 + (2.5 - 0.5 / PI) * 0.01)).abs() < 1e-15);
        assert!((b - (4.0 + (2.5 + 0.5 / PI) * 0.01)).abs() < 1e-15);
        assert!(asymptotic_tongue_bounds(Plane::Omega, 1, 0.1).is_err());
    }

    #[test]
    fn classification_at_infinity() {
        assert_eq!(
            asymptotic_classification(2.0).unwrap(),
            AsymptoticClass::UnstableAtInfinity
        );
        assert_eq!(
            asymptotic_classification(4.0).unwrap(),
            AsymptoticClass::StableAtInfinity
        );
        assert_eq!(
            asymptotic_classification(3.0).unwrap(),
            AsymptoticClass::Boundary
        );
        assert_eq!(
            asymptotic_classification(0.5).unwrap(),
            AsymptoticClass::StableAtInfinity
        );
        assert_eq!(
            asymptotic_classification(7.0).unwrap(),
            AsymptoticClass::UnstableAtInfinity
        );
        assert_eq!(
            asymptotic_classification(21.0).unwrap(),
            AsymptoticClass::Boundary
        );
        assert!(asymptotic_classification(0.0).is_err());
    }

    #[test]
    fn table_lookup() {
        assert_eq!(crossing_count(0.5).unwrap(), 0);
        assert_eq!(crossing_count(2.0).unwrap(), 1);
        assert_eq!(crossing_count(4.5).unwrap(), 6);
        assert_eq!(crossing_count(6.0).unwrap(), 7);
        assert_eq!(crossing_count(7.0).unwrap(), 9);
        assert!(crossing_count(1.0).is_err());
        assert!(crossing_count(7.5).is_err());
    }

    #[test]
    fn csv_marks_failed_cells() {
        let grid = StabilityGrid {
            plane: Plane::Gamma,
            x_axis: vec![1.0],
            y_axis: vec![0.0, 1.0],
            trace: vec![vec![1.5, f64::NAN]],
            classification: vec![vec![Some(Stability::Stable), None]],
            settings: ScanSettings::default(),
        };
        let csv = grid.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,y,trace,class");
        assert_eq!(
            lines[1],
            "1.0000000000000000e0,0.0000000000000000e0,1.5000000000000000e0,stable"
        );
        assert_eq!(
            lines[2],
            "1.0000000000000000e0,1.0000000000000000e0,nan,nan"
        );
    }

    #[test]
    fn bracket_rejects_bad_input() {
        let o = BracketOptions::default();
        assert!(trace_level_bracket(Plane::Gamma, 0, 1.0, &o).is_err());
        assert!(trace_level_bracket(Plane::Gamma, 1, -1.0, &o).is_err());
    }
}
