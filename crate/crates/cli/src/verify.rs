use std::f64::consts::{PI, SQRT_2};

use hill_duffing::beam::{simulate, stability_switch, ModePair, SimulateOptions};
use hill_duffing::criteria::{
    burdina_condition_gamma, burdina_condition_omega, g_function, phi, psi,
};
use hill_duffing::duffing::DuffingParams;
use hill_duffing::elliptic::{complete_k, jacobi, sigma_constant, EllipticModulus};
use hill_duffing::hill::{
    exact_solution_residual, monodromy, squared_duffing_coefficient, ExactSolution, Plane,
};
use hill_duffing::tongues::{
    asymptotic_tongue_bounds, crossing_count, recount_crossings, trace_level_bracket,
    BracketOptions,
};

use crate::args::Suite;
use crate::{CliError, CliResult};

type SuiteFn = fn() -> Vec<Check>;

struct Check {
    name: String,
    measured: String,
    expected: String,
    pass: bool,
}

impl Check {
    fn close(name: impl Into<String>, measured: f64, expected: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            measured: format!("{measured}"),
            expected: format!("{expected} ± {tol:e}"),
            pass: (measured - expected).abs() <= tol,
        }
    }

    fn holds(name: impl Into<String>, measured: String, expected: &str, pass: bool) -> Self {
        Check {
            name: name.into(),
            measured,
            expected: expected.to_string(),
            pass,
        }
    }

    fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Check::holds(name, format!("error: {err}"), "a value", false)
    }
}

fn elliptic() -> Vec<Check> {
    let mut out = vec![Check::close(
        "sigma",
        sigma_constant(),
        1.3110287771460599,
        1e-14,
    )];
    let k = EllipticModulus::new(std::f64::consts::FRAC_1_SQRT_2).expect("valid modulus");
    out.push(Check::close(
        "K(1/sqrt 2) = sqrt 2 sigma",
        complete_k(k),
        SQRT_2 * sigma_constant(),
        1e-14,
    ));
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let u = -40.0 + 0.4 * i as f64;
        let kv = 0.7 * (i % 20) as f64 / 19.0;
        let j =
            jacobi(u, EllipticModulus::new(kv).expect("valid modulus")).expect("finite argument");
        worst = worst
            .max((j.sn * j.sn + j.cn * j.cn - 1.0).abs())
            .max((j.dn * j.dn - kv * kv * j.cn * j.cn - (1.0 - kv * kv)).abs());
    }
    out.push(Check::close(
        "Jacobi identities, worst residual",
        worst,
        0.0,
        1e-12,
    ));
    match DuffingParams::unscaled(1e-8) {
        Ok(p) => out.push(Check::close(
            "Duffing period as delta -> 0",
            p.period(),
            2.0 * PI,
            1e-10,
        )),
        Err(e) => out.push(Check::failed("Duffing period as delta -> 0", e)),
    }
    out
}

fn exact_lines() -> Vec<Check> {
    let mut out = Vec::new();
    for delta in [0.5, 1.0, 2.0] {
        for (kind, want) in [
            (ExactSolution::CnAtGammaOne, -2.0),
            (ExactSolution::SnAtParabola, -2.0),
            (ExactSolution::DnAtNegativeParabola, 2.0),
        ] {
            let gamma = kind.gamma(delta);
            let name = format!("trace at delta {delta}, gamma {gamma}");
            match squared_duffing_coefficient(delta, gamma).and_then(|p| monodromy(&p, 1e-10)) {
                Ok(r) => out.push(Check::close(name, r.trace, want, 1e-5)),
                Err(e) => out.push(Check::failed(name, e)),
            }
            let ts: Vec<f64> = (0..100).map(|i| 0.1 * i as f64).collect();
            let name = format!("{kind:?} residual at delta {delta}");
            match exact_solution_residual(kind, delta, &ts) {
                Ok(r) => out.push(Check::close(name, r, 0.0, 1e-10)),
                Err(e) => out.push(Check::failed(name, e)),
            }
        }
    }
    out
}

fn criteria() -> Vec<Check> {
    let mut out = Vec::new();
    for delta in [0.5, 1.0, 3.0] {
        let gamma = 2.0 + delta * delta;
        let name = format!("Phi(delta, 2 + delta^2) at delta {delta}");
        match phi(delta, gamma) {
            Ok(v) => out.push(Check::close(name, v, SQRT_2 * PI, 1e-9)),
            Err(e) => out.push(Check::failed(name, e)),
        }
        let v = burdina_condition_gamma(delta, gamma);
        out.push(Check::holds(
            format!("Burdina on gamma = 2 + delta^2 at delta {delta}"),
            v.symbol().to_string(),
            "S",
            v.is_stable(),
        ));
    }
    let bound = 64.0 / 3.0 * sigma_constant().powi(4);
    match g_function(1e6) {
        Ok(g) => out.push(Check::close(
            "g(1e6) / (64/3) sigma^4",
            g / bound,
            1.0,
            1e-3,
        )),
        Err(e) => out.push(Check::failed("g(1e6)", e)),
    }
    match psi(1e-6, 4.0) {
        Ok(v) => out.push(Check::close("Psi(0+, 4)", v, 4.0 * PI, 1e-5)),
        Err(e) => out.push(Check::failed("Psi(0+, 4)", e)),
    }
    for (delta, stable) in [(0.5, true), (1.2, false), (2.0, true), (3.0, false)] {
        let v = burdina_condition_omega(delta, 4.0);
        out.push(Check::holds(
            format!("Burdina at omega 4, delta {delta}"),
            v.symbol().to_string(),
            if stable { "S" } else { "I" },
            v.is_stable() == stable,
        ));
    }
    out
}

fn tongues() -> Vec<Check> {
    let mut out = Vec::new();
    let opts = BracketOptions::default();
    match trace_level_bracket(Plane::Gamma, 1, 1.0, &opts) {
        Ok(s) => {
            out.push(Check::close("U1 lower edge at delta 1", s.lower, 1.0, 1e-4));
            out.push(Check::close("U1 upper edge at delta 1", s.upper, 1.5, 1e-4));
        }
        Err(e) => out.push(Check::failed("U1 at delta 1", e)),
    }
    match trace_level_bracket(Plane::Omega, 1, 50.0, &opts) {
        Ok(s) => out.push(Check::close(
            "omega-plane U1 upper edge at delta 50",
            s.upper,
            3.0,
            0.1,
        )),
        Err(e) => out.push(Check::failed("omega-plane U1 at delta 50", e)),
    }
    let delta: f64 = 0.2;
    for plane in [Plane::Gamma, Plane::Omega] {
        let name = format!(
            "{}-plane U2 at delta {delta} within parabolic bounds",
            plane.as_str()
        );
        match asymptotic_tongue_bounds(plane, 2, delta)
            .and_then(|b| Ok((b, trace_level_bracket(plane, 2, delta, &opts)?)))
        {
            Ok(((a, b), s)) => {
                let slack = 5.0 * delta.powi(4);
                out.push(Check::holds(
                    name,
                    format!("[{:.6}, {:.6}]", s.lower, s.upper),
                    &format!("inside [{:.6}, {:.6}]", a - slack, b + slack),
                    s.lower >= a - slack && s.upper <= b + slack,
                ))
            }
            Err(e) => out.push(Check::failed(name, e)),
        }
    }
    let deltas: Vec<f64> = (0..=2000).map(|i| 0.05 + 0.01 * i as f64).collect();
    for omega in [0.5, 1.5, 4.0] {
        let name = format!("tongue crossings at omega {omega}");
        match crossing_count(omega).and_then(|t| Ok((t, recount_crossings(omega, &deltas, 1e-10)?)))
        {
            Ok((table, count)) => out.push(Check::holds(
                name,
                count.to_string(),
                &table.to_string(),
                count == table,
            )),
            Err(e) => out.push(Check::failed(name, e)),
        }
    }
    out
}

fn beam() -> Vec<Check> {
    let mut out = Vec::new();
    let pair = ModePair::new(1, 2).expect("distinct modes");
    for (delta, transfer) in [(2.92, false), (2.94, true)] {
        let name = format!("energy transfer at delta {delta}");
        match simulate(pair, delta, &SimulateOptions::default()) {
            Ok(sim) => out.push(Check::holds(
                name,
                format!("{:?}", sim.verdict),
                if transfer {
                    "EnergyTransfer"
                } else {
                    "NoTransferObserved"
                },
                sim.verdict.is_transfer() == transfer,
            )),
            Err(e) => out.push(Check::failed(name, e)),
        }
    }
    for ((a, b), want) in [((2.9, 3.0), 2.93), ((3.4, 3.5), 3.45)] {
        let name = format!("stability switch in ({a}, {b})");
        match stability_switch(pair, a, b, 1e-4) {
            Ok(x) => out.push(Check::close(name, x, want, 0.02)),
            Err(e) => out.push(Check::failed(name, e)),
        }
    }
    out
}

pub fn run(suite: Suite) -> CliResult<()> {
    let suites: &[(&str, SuiteFn)] = &[
        ("elliptic", elliptic),
        ("exact-lines", exact_lines),
        ("criteria", criteria),
        ("tongues", tongues),
        ("beam", beam),
    ];
    let selected = suites.iter().filter(|(name, _)| match suite {
        Suite::All => true,
        Suite::Elliptic => *name == "elliptic",
        Suite::ExactLines => *name == "exact-lines",
        Suite::Criteria => *name == "criteria",
        Suite::Tongues => *name == "tongues",
        Suite::Beam => *name == "beam",
    });
    let mut failed = 0;
    for (name, checks) in selected {
        for c in checks() {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            println!(
                "{tag} {name}: {}: measured {} expected {}",
                c.name, c.measured, c.expected
            );
            failed += usize::from(!c.pass);
        }
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Verify(failed))
    }
}
