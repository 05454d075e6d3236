use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hill_duffing::hill::{Plane, DEFAULT_INTEGRATOR_TOL, DEFAULT_TOL_BOUNDARY};
use hill_duffing::tongues::AxisRange;

#[derive(Debug, Parser)]
#[command(
    name = "hillduffing",
    version,
    about = "Stability charts for Hill equations with squared Duffing coefficients"
)]
pub struct Cli {
    /// Worker threads for grid scans. HILLDUFFING_WORKERS takes precedence.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monodromy trace and classification over a (δ, γ) or (δ, ω) grid.
    Scan(ScanArgs),
    /// Li-Zhang, Zhukovskii and Burdina verdicts (S/I) over a grid.
    CriteriaMap(CriteriaMapArgs),
    /// Edges of one resonance tongue at fixed amplitudes.
    TongueBracket(BracketArgs),
    /// Two-mode beam simulation with trajectory output.
    Beam(BeamArgs),
    /// Built-in numerical checks; exit 1 if any fails.
    Verify(VerifyArgs),
    /// Closed-form Duffing solution sampled in time.
    DuffingEval(DuffingArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlaneArg {
    Gamma,
    Omega,
}

impl From<PlaneArg> for Plane {
    fn from(p: PlaneArg) -> Self {
        match p {
            PlaneArg::Gamma => Plane::Gamma,
            PlaneArg::Omega => Plane::Omega,
        }
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_enum)]
    pub plane: PlaneArg,
    /// δ axis as lo:hi:count, endpoints included.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub x: Option<AxisRange>,
    /// γ or ω axis as lo:hi:count, endpoints included.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub y: Option<AxisRange>,
    /// Output prefix; files are <out>.csv and <out>.meta.json.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

impl GridArgs {
    /// Axes of the published charts when none are given. δ = 0 is left out
    /// because the coefficient is constant there.
    pub fn axes(&self) -> (AxisRange, AxisRange) {
        let (x, y) = match self.plane {
            PlaneArg::Gamma => ((0.05, 5.0, 100), (-2.0, 10.0, 241)),
            PlaneArg::Omega => ((0.05, 5.0, 100), (0.05, 7.0, 140)),
        };
        let axis = |(lo, hi, n)| AxisRange::new(lo, hi, n).expect("static axis");
        (
            self.x.unwrap_or_else(|| axis(x)),
            self.y.unwrap_or_else(|| axis(y)),
        )
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = DEFAULT_INTEGRATOR_TOL)]
    pub integrator_tol: f64,
    #[arg(long, default_value_t = DEFAULT_TOL_BOUNDARY)]
    pub tol_boundary: f64,
    /// |tr| level separating stable from unstable cells.
    #[arg(long, default_value_t = 2.0, conflicts_with = "paper_figures")]
    pub threshold: f64,
    /// Use the 1.98 level of the published charts.
    #[arg(long)]
    pub paper_figures: bool,
}

#[derive(Debug, Args)]
pub struct CriteriaMapArgs {
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct BracketArgs {
    #[arg(long, value_enum)]
    pub plane: PlaneArg,
    /// Tongue index ℓ ≥ 1.
    #[arg(long)]
    pub ell: u32,
    /// A single δ or a range lo:hi:count.
    #[arg(long, value_parser = parse_values, allow_hyphen_values = true)]
    pub delta: Values,
    #[arg(long, default_value_t = 2.0)]
    pub threshold: f64,
    /// Search window lo:hi in γ or ω.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<(f64, f64)>,
    #[arg(long, default_value_t = 1e-6)]
    pub param_tol: f64,
    #[arg(long, default_value_t = 1e-11)]
    pub integrator_tol: f64,
    /// CSV destination; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BeamArgs {
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: f64,
    /// Final time; 50 periods of the driving mode by default.
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub z_ratio: f64,
    #[arg(long, default_value_t = 20.0)]
    pub growth_factor: f64,
    #[arg(long, default_value_t = 1e-11)]
    pub tol: f64,
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
    /// Trajectory CSV path.
    #[arg(long, short, default_value = "beam.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Elliptic,
    ExactLines,
    Criteria,
    Tongues,
    Beam,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
}

#[derive(Debug, Args)]
pub struct DuffingArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Sample times: a single t or lo:hi:count.
    #[arg(long, value_parser = parse_values, allow_hyphen_values = true, default_value = "0:10:101")]
    pub t: Values,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Values(pub Vec<f64>);

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn parse_range(s: &str) -> Result<AxisRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(format!("expected lo:hi:count, got `{s}`"));
    };
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| format!("`{count}` is not a count"))?;
    AxisRange::new(parse_f64(lo)?, parse_f64(hi)?, count).map_err(|e| e.to_string())
}

fn parse_values(s: &str) -> Result<Values, String> {
    if s.contains(':') {
        Ok(Values(parse_range(s)?.values()))
    } else {
        Ok(Values(vec![parse_f64(s)?]))
    }
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(format!("window `{s}` is empty"))
    }
}
