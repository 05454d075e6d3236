mod args;
mod commands;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

const WORKERS_ENV: &str = "HILLDUFFING_WORKERS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(PathBuf, std::io::Error),
    Verify(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(..) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Verify(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<hill_duffing::Error> for CliError {
    fn from(e: hill_duffing::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Writes through a sibling temporary file so a failed run leaves no
/// partial output behind.
pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| CliError::Io(tmp.clone(), e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn worker_count(flag: usize) -> CliResult<usize> {
    let n = match std::env::var(WORKERS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            CliError::Usage(format!("{WORKERS_ENV}=`{v}` is not a positive integer"))
        })?,
        Err(_) => flag,
    };
    if n == 0 {
        return Err(CliError::Usage("worker count must be at least 1".into()));
    }
    Ok(n)
}

fn run(cli: Cli) -> CliResult<()> {
    let workers = worker_count(cli.workers)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Scan(a) => commands::scan(&a, workers),
        Command::CriteriaMap(a) => commands::criteria_map(&a, workers),
        Command::TongueBracket(a) => commands::tongue_bracket(&a),
        Command::Beam(a) => commands::beam(&a),
        Command::Verify(a) => verify::run(a.suite),
        Command::DuffingEval(a) => commands::duffing_eval(&a),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
