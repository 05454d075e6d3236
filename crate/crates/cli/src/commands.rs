use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use hill_duffing::beam::{simulate, trajectory_csv, ModePair, SimulateOptions};
use hill_duffing::criteria::{evaluate_all, Criterion};
use hill_duffing::duffing::DuffingParams;
use hill_duffing::hill::{Plane, CHART_LEVEL};
use hill_duffing::tongues::{
    format_float, scan as scan_grid, trace_level_bracket, AxisRange, BracketOptions, ScanSettings,
};

use crate::args::{BeamArgs, BracketArgs, CriteriaMapArgs, DuffingArgs, GridArgs, ScanArgs};
use crate::{write_file, CliError, CliResult};

#[derive(Serialize)]
struct Meta<'a, S: Serialize> {
    command: &'a str,
    plane: Plane,
    x: AxisRange,
    y: AxisRange,
    settings: S,
    workers: usize,
    library_version: &'a str,
    wall_time_s: f64,
}

fn prefix(grid: &GridArgs, command: &str) -> PathBuf {
    grid.out.clone().unwrap_or_else(|| PathBuf::from(command))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_grid<S: Serialize>(out: &Path, csv: &str, meta: &Meta<'_, S>) -> CliResult<()> {
    let json = serde_json::to_string_pretty(meta).map_err(|e| CliError::Usage(e.to_string()))?;
    let csv_path = with_suffix(out, ".csv");
    write_file(&csv_path, csv)?;
    write_file(&with_suffix(out, ".meta.json"), &(json + "\n"))?;
    println!("wrote {}", csv_path.display());
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e)),
    }
}

pub fn scan(a: &ScanArgs, workers: usize) -> CliResult<()> {
    let start = Instant::now();
    let (x, y) = a.grid.axes();
    let settings = ScanSettings {
        integrator_tol: a.integrator_tol,
        tol_boundary: a.tol_boundary,
        level: if a.paper_figures {
            CHART_LEVEL
        } else {
            a.threshold
        },
    };
    let grid = scan_grid(a.grid.plane.into(), x, y, settings)?;
    let meta = Meta {
        command: "scan",
        plane: grid.plane,
        x,
        y,
        settings,
        workers,
        library_version: hill_duffing::VERSION,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_grid(&prefix(&a.grid, "scan"), &grid.to_csv(), &meta)
}

pub fn criteria_map(a: &CriteriaMapArgs, workers: usize) -> CliResult<()> {
    let start = Instant::now();
    let (x, y) = a.grid.axes();
    let plane: Plane = a.grid.plane.into();
    let (xs, ys) = (x.values(), y.values());
    let cells: Vec<(f64, f64)> = xs
        .iter()
        .flat_map(|&d| ys.iter().map(move |&v| (d, v)))
        .collect();
    let verdicts: Vec<String> = cells
        .par_iter()
        .map(|&(d, v)| {
            evaluate_all(plane, d, v)
                .iter()
                .map(|r| r.symbol().to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let mut csv = String::from("x,y");
    for c in Criterion::ALL {
        csv.push(',');
        csv.push_str(c.as_str());
    }
    csv.push('\n');
    for ((d, v), row) in cells.iter().zip(&verdicts) {
        let _ = writeln!(csv, "{},{},{row}", format_float(*d), format_float(*v));
    }
    let meta = Meta {
        command: "criteria-map",
        plane,
        x,
        y,
        settings: Criterion::ALL.map(Criterion::as_str),
        workers,
        library_version: hill_duffing::VERSION,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_grid(&prefix(&a.grid, "criteria"), &csv, &meta)
}

pub fn tongue_bracket(a: &BracketArgs) -> CliResult<()> {
    let opts = BracketOptions {
        threshold: a.threshold,
        param_tol: a.param_tol,
        integrator_tol: a.integrator_tol,
        window: a.window,
        ..BracketOptions::default()
    };
    let plane: Plane = a.plane.into();
    let samples: Vec<_> = a
        .delta
        .0
        .par_iter()
        .map(|&d| trace_level_bracket(plane, a.ell, d, &opts))
        .collect();
    let mut csv = String::from("plane,ell,delta,lower,upper,peak_trace\n");
    for (d, s) in a.delta.0.iter().zip(samples) {
        match s {
            Ok(s) => {
                let cols = [s.delta, s.lower, s.upper, s.peak_trace].map(format_float);
                let _ = writeln!(csv, "{},{},{}", plane.as_str(), a.ell, cols.join(","));
            }
            Err(e) => {
                eprintln!("δ = {d}: {e}");
                let _ = writeln!(
                    csv,
                    "{},{},{},nan,nan,nan",
                    plane.as_str(),
                    a.ell,
                    format_float(*d)
                );
            }
        }
    }
    emit(a.out.as_deref(), &csv)
}

pub fn beam(a: &BeamArgs) -> CliResult<()> {
    let pair = ModePair::new(a.m, a.n)?;
    let opts = SimulateOptions {
        z_ratio: a.z_ratio,
        horizon: a.horizon,
        tol: a.tol,
        growth_factor: a.growth_factor,
        samples: a.samples,
    };
    let sim = simulate(pair, a.delta, &opts)?;
    write_file(&a.out, &trajectory_csv(pair, &sim.trajectory))?;
    match sim.verdict.onset() {
        Some(t) => println!("verdict: EnergyTransfer onset {}", format_float(t)),
        None => println!("verdict: NoTransferObserved"),
    }
    println!(
        "pair ({}, {}) omega {} delta {} horizon {} max|z|/|z0| {} energy drift {}",
        pair.m(),
        pair.n(),
        format_float(pair.omega()),
        format_float(a.delta),
        format_float(sim.horizon),
        format_float(sim.max_abs_z / (a.z_ratio * a.delta).abs()),
        format_float(sim.energy_drift)
    );
    Ok(())
}

pub fn duffing_eval(a: &DuffingArgs) -> CliResult<()> {
    let params = DuffingParams::new(a.delta, a.omega)?;
    let mut csv = String::from("t,y,y_dot\n");
    for &t in &a.t.0 {
        let (y, v) = params.state(t);
        let _ = writeln!(
            csv,
            "{},{},{}",
            format_float(t),
            format_float(y),
            format_float(v)
        );
    }
    eprintln!("period {}", format_float(params.period()));
    emit(a.out.as_deref(), &csv)
}
