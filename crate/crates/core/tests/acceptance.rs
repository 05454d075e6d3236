//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach the output.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::test_runner::{Config, TestCaseError, TestRunner};

use hill_duffing::beam::{mode_stability, simulate, stability_switch, ModePair, SimulateOptions};
use hill_duffing::criteria::{
    burdina_condition_gamma, burdina_condition_omega, evaluate_all, g_function, li_zhang, phi, psi,
};
use hill_duffing::duffing::DuffingParams;
use hill_duffing::elliptic::{jacobi, sigma_constant, EllipticModulus};
use hill_duffing::hill::{monodromy, squared_duffing_coefficient, Plane, Stability};
use hill_duffing::tongues::{
    asymptotic_classification, asymptotic_tongue_bounds, crossing_count, recount_crossings, scan,
    trace_level_bracket, AsymptoticClass, AxisRange, BracketOptions, ScanSettings,
};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_lines() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for delta in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let d2 = delta * delta;
        for (gamma, want) in [(1.0, -2.0), (1.0 + 0.5 * d2, -2.0), (-0.5 * d2, 2.0)] {
            let p = squared_duffing_coefficient(delta, gamma).map_err(|e| e.to_string())?;
            let tr = monodromy(&p, 1e-10).map_err(|e| e.to_string())?.trace;
            ensure((tr - want).abs() <= 1e-5, || {
                format!("δ = {delta}, γ = {gamma}: trace {tr}")
            })?;
            worst = worst.max((tr - want).abs());
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "max |trace - expected| = {worst:.1e}, {elapsed:.2?}"
    ))
}

fn gamma_zero() -> Outcome {
    let bound = 64.0 / 3.0 * sigma_constant().powi(4);
    for delta in [0.1, 1.0, 10.0, 100.0] {
        let p = squared_duffing_coefficient(delta, 0.0).map_err(|e| e.to_string())?;
        let v = li_zhang(&p);
        ensure(v.is_stable(), || {
            format!("li_zhang inconclusive at δ = {delta}")
        })?;
        let g = g_function(delta).map_err(|e| e.to_string())?;
        ensure(bound - g > 0.0, || {
            format!("g({delta}) = {g} not below {bound}")
        })?;
    }
    let g = g_function(1e6).map_err(|e| e.to_string())?;
    let rel = (g / bound - 1.0).abs();
    ensure(rel < 1e-3, || format!("g(1e6) = {g}, relative gap {rel:e}"))?;
    Ok(format!("bound {bound:.12}, g(1e6) relative gap {rel:.1e}"))
}

fn phase_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for delta in [0.5, 1.0, 3.0, 10.0] {
        let gamma = 2.0 + delta * delta;
        let v = phi(delta, gamma).map_err(|e| e.to_string())?;
        let err = (v - 2f64.sqrt() * PI).abs();
        ensure(err < 1e-9, || format!("δ = {delta}: Φ = {v}"))?;
        ensure(burdina_condition_gamma(delta, gamma).is_stable(), || {
            format!("Burdina inconclusive at δ = {delta}")
        })?;
        worst = worst.max(err);
    }
    Ok(format!("max |Φ - √2π| = {worst:.1e}"))
}

fn psi_limits() -> Outcome {
    for omega in [1.0, 2.0, 4.0] {
        let small = psi(1e-6, omega).map_err(|e| e.to_string())?;
        ensure((small - PI * omega).abs() < 1e-5, || {
            format!("Ψ(1e-6, {omega}) = {small}")
        })?;
        let large = psi(1e4, omega).map_err(|e| e.to_string())?;
        let want = PI * (omega / 2.0).sqrt();
        ensure(((large - want) / want).abs() < 1e-2, || {
            format!("Ψ(1e4, {omega}) = {large}")
        })?;
    }
    Ok("small and large amplitude limits for ω = 1, 2, 4".into())
}

fn stable_runs(flags: &[(f64, bool)]) -> Vec<(f64, f64)> {
    let mut runs = Vec::new();
    let mut open: Option<f64> = None;
    for (i, &(d, s)) in flags.iter().enumerate() {
        match (s, open) {
            (true, None) => open = Some(d),
            (false, Some(a)) => {
                runs.push((a, flags[i - 1].0));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(a) = open {
        runs.push((a, flags.last().unwrap().0));
    }
    runs
}

fn burdina_interval() -> Outcome {
    let flags: Vec<(f64, bool)> = (1..=10_000)
        .map(|i| {
            let d = i as f64 * 1e-3;
            (d, burdina_condition_omega(d, 4.0).is_stable())
        })
        .collect();
    let runs = stable_runs(&flags);
    ensure(runs.len() == 2, || {
        format!("stable set has {} intervals: {runs:?}", runs.len())
    })?;
    let got = [runs[0].0, runs[0].1, runs[1].0, runs[1].1];
    let want = [0.0, 1.167, 1.277, 2.63];
    for (g, w) in got.iter().zip(want) {
        ensure((g - w).abs() <= 0.005, || format!("endpoints {got:?}"))?;
    }
    Ok(format!(
        "({:.3}, {:.3}) ∪ ({:.3}, {:.3})",
        got[0], got[1], got[2], got[3]
    ))
}

fn beam_interval() -> Outcome {
    let start = Instant::now();
    let pair = ModePair::new(1, 2).map_err(|e| e.to_string())?;
    for (delta, want) in [
        (3.0, Stability::Unstable),
        (3.2, Stability::Unstable),
        (3.4, Stability::Unstable),
        (2.9, Stability::Stable),
        (3.5, Stability::Stable),
    ] {
        let got = mode_stability(pair, delta).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("δ = {delta}: {got}"))?;
    }
    let lo = stability_switch(pair, 2.9, 3.0, 1e-4).map_err(|e| e.to_string())?;
    let hi = stability_switch(pair, 3.4, 3.5, 1e-4).map_err(|e| e.to_string())?;
    ensure(
        (lo - 2.93).abs() <= 0.02 && (hi - 3.45).abs() <= 0.02,
        || format!("interval ({lo}, {hi})"),
    )?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "unstable for δ in ({lo:.4}, {hi:.4}), {elapsed:.2?}"
    ))
}

fn beam_coincidence() -> Outcome {
    let pair = ModePair::new(1, 2).map_err(|e| e.to_string())?;
    let opts = SimulateOptions::default();
    let run = |d: f64| simulate(pair, d, &opts).map_err(|e| e.to_string());
    let quiet = run(2.92)?;
    ensure(!quiet.verdict.is_transfer(), || {
        format!("δ = 2.92: {:?}", quiet.verdict)
    })?;
    let mut onsets = Vec::new();
    for delta in [2.94, 3.01, 3.44] {
        let sim = run(delta)?;
        let onset = sim
            .verdict
            .onset()
            .ok_or_else(|| format!("δ = {delta}: no transfer"))?;
        onsets.push(onset);
    }
    ensure(onsets[2] > onsets[1], || {
        format!(
            "onset at 3.44 ({}) not after 3.01 ({})",
            onsets[2], onsets[1]
        )
    })?;
    Ok(format!(
        "2.92 quiet; onsets 2.94: {:.2}, 3.01: {:.2}, 3.44: {:.2}",
        onsets[0], onsets[1], onsets[2]
    ))
}

fn asymptotic_tongues() -> Outcome {
    let delta: f64 = 0.2;
    let slack = 5.0 * delta.powi(4);
    let mut parts = Vec::new();
    for plane in [Plane::Gamma, Plane::Omega] {
        let (a, b) = asymptotic_tongue_bounds(plane, 2, delta).map_err(|e| e.to_string())?;
        let s = trace_level_bracket(plane, 2, delta, &BracketOptions::default())
            .map_err(|e| e.to_string())?;
        ensure(s.lower >= a - slack && s.upper <= b + slack, || {
            format!(
                "{} plane: [{}, {}] outside [{}, {}]",
                plane.as_str(),
                s.lower,
                s.upper,
                a - slack,
                b + slack
            )
        })?;
        parts.push(format!(
            "{}: [{:.6}, {:.6}]",
            plane.as_str(),
            s.lower,
            s.upper
        ));
    }
    Ok(parts.join(", "))
}

fn omega_limits() -> Outcome {
    let s = trace_level_bracket(Plane::Omega, 1, 50.0, &BracketOptions::default())
        .map_err(|e| e.to_string())?;
    ensure((s.upper - 3.0).abs() < 0.1, || {
        format!("upper edge {}", s.upper)
    })?;
    let grid = scan(
        Plane::Omega,
        AxisRange::new(0.1, 10.0, 25).map_err(|e| e.to_string())?,
        AxisRange::new(0.05, 0.95, 19).map_err(|e| e.to_string())?,
        ScanSettings::default(),
    )
    .map_err(|e| e.to_string())?;
    let mut cells = 0;
    for (d, w, tr, class) in grid.cells() {
        ensure(class == Some(Stability::Stable), || {
            format!("cell ({d}, {w}): trace {tr}, {class:?}")
        })?;
        cells += 1;
    }
    Ok(format!(
        "U1 upper edge at δ = 50: {:.4}; {cells} cells with ω < 1 stable",
        s.upper
    ))
}

fn table_parity() -> Outcome {
    for w in [0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5] {
        let even = crossing_count(w).map_err(|e| e.to_string())? % 2 == 0;
        let class = asymptotic_classification(w).map_err(|e| e.to_string())?;
        ensure(even == (class == AsymptoticClass::StableAtInfinity), || {
            format!("ω = {w}: parity vs {class:?}")
        })?;
    }
    let deltas: Vec<f64> = (0..=2000).map(|i| 0.05 + 0.01 * i as f64).collect();
    let mut counts = Vec::new();
    for w in [0.5, 1.5, 4.0] {
        let table = crossing_count(w).map_err(|e| e.to_string())?;
        let recount = recount_crossings(w, &deltas, 1e-10).map_err(|e| e.to_string())?;
        ensure(recount == table, || {
            format!("ω = {w}: recount {recount}, table {table}")
        })?;
        counts.push(recount);
    }
    Ok(format!("parity holds; recounts {counts:?}"))
}

fn runner_with(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        failure_persistence: None,
        ..Config::with_cases(cases)
    })
}

fn property_suites() -> Outcome {
    let fail = |name: &str, e: proptest::test_runner::TestError<_>| format!("{name}: {e}");

    let mut runner = runner_with(1000);
    runner
        .run(&(-50.0..50.0f64, 0.0..0.71f64), |(u, k)| {
            let j = jacobi(u, EllipticModulus::new(k).unwrap()).unwrap();
            let a = (j.sn * j.sn + j.cn * j.cn - 1.0).abs();
            let b = (j.dn * j.dn + k * k * j.sn * j.sn - 1.0).abs();
            if a.max(b) < 1e-10 {
                Ok(())
            } else {
                Err(TestCaseError::fail(format!(
                    "u = {u}, k = {k}: {a:e}, {b:e}"
                )))
            }
        })
        .map_err(|e| fail("jacobi identities", e))?;

    let mut runner = runner_with(100);
    runner
        .run(&(0.01..=5.0f64, -5.0..10.0f64), |(d, g)| {
            let r = monodromy(&squared_duffing_coefficient(d, g).unwrap(), 1e-10).unwrap();
            if r.det_residual < 1e-8 {
                Ok(())
            } else {
                Err(TestCaseError::fail(format!(
                    "({d}, {g}): {}",
                    r.det_residual
                )))
            }
        })
        .map_err(|e| fail("unit determinant", e))?;

    let mut runner = runner_with(500);
    runner
        .run(&(0.05..4.0f64, -2.0..12.0f64), |(d, g)| {
            let class = monodromy(&squared_duffing_coefficient(d, g).unwrap(), 1e-10)
                .unwrap()
                .classification;
            match evaluate_all(Plane::Gamma, d, g)
                .iter()
                .find(|v| v.is_stable())
            {
                Some(v) if class == Stability::Unstable => Err(TestCaseError::fail(format!(
                    "{:?} certifies unstable ({d}, {g})",
                    v.criterion
                ))),
                _ => Ok(()),
            }
        })
        .map_err(|e| fail("criterion soundness", e))?;

    let pair = ModePair::new(1, 2).map_err(|e| e.to_string())?;
    let mut drift: f64 = 0.0;
    for delta in [0.5, 2.0, 3.2] {
        let period = DuffingParams::unscaled(delta)
            .map_err(|e| e.to_string())?
            .period();
        let opts = SimulateOptions {
            horizon: Some(100.0 * period),
            ..Default::default()
        };
        let sim = simulate(pair, delta, &opts).map_err(|e| e.to_string())?;
        ensure(sim.energy_drift < 1e-6, || {
            format!("energy drift {} at δ = {delta}", sim.energy_drift)
        })?;
        drift = drift.max(sim.energy_drift);
    }

    let csv = || {
        scan(
            Plane::Gamma,
            AxisRange::new(0.1, 3.0, 10).unwrap(),
            AxisRange::new(-2.0, 6.0, 20).unwrap(),
            ScanSettings::default(),
        )
        .map(|g| g.to_csv())
        .map_err(|e| e.to_string())
    };
    ensure(csv()? == csv()?, || "scan reruns differ".to_string())?;
    Ok(format!("all suites hold; max energy drift {drift:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Check; 11] = [
        ("exact resonant lines", exact_lines),
        ("stability at gamma = 0", gamma_zero),
        ("phase identity on gamma = 2 + delta^2", phase_identity),
        ("psi limits", psi_limits),
        ("closed-form stable set at omega = 4", burdina_interval),
        ("beam instability interval", beam_interval),
        ("linear/nonlinear coincidence", beam_coincidence),
        ("asymptotic tongues", asymptotic_tongues),
        ("omega-plane limits", omega_limits),
        ("crossing table parity and recount", table_parity),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!(
                "PASS {:>2} {name}: {detail} [{:.2?}]",
                i + 1,
                start.elapsed()
            ),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{:.2?}]", i + 1, start.elapsed());
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
