//! Command-line front end. Exit codes: 0 success, 1 I/O, 2 validation,
//! 3 solver stall.

pub mod document;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

pub use document::{BackendParams, ConfigEcho, ProblemFile, ResultDocument};
pub use verify::{PropertyResult, Suite};

use crate::error::Error;
use crate::gleason::{self, DEFAULT_DISTANCE_TOLERANCE, DEFAULT_PART_SLACK};
use crate::kernels::{self, KernelKind};
use crate::problem::compute_np_norm;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Stall(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Stall(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            CliError::Invalid(e.to_string())
        } else {
            CliError::Stall(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "picknorm", version, about = "Certified Nevanlinna-Pick norm brackets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bracket the NP norm of a problem file.
    Compute {
        file: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
        /// Record wall-clock time in `timing_ms` (otherwise null).
        #[arg(long)]
        timing: bool,
    },
    /// Gleason distance matrix and part partition of the file's sites.
    Gleason {
        file: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        theorem4: bool,
        #[arg(long, default_value_t = DEFAULT_PART_SLACK)]
        part_slack: f64,
    },
    /// Run a property suite.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// L1 norms of the dlvp kernels at powers of two up to `lmax`, as CSV.
    KernelProbe {
        #[arg(long, default_value_t = 128)]
        lmax: usize,
    },
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read_problem(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    ProblemFile::parse(&text)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| CliError::Io(e.to_string()))
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Compute {
            file,
            tol,
            json: _,
            csv,
            timing,
        } => {
            let pf = read_problem(&file)?;
            let problem = pf.problem(tol)?;
            let start = Instant::now();
            let (result, stalled) = match compute_np_norm(&problem) {
                Ok(r) => (r, false),
                Err(Error::SolverStall { partial: Some(r), .. }) => (*r, true),
                Err(e) => return Err(e.into()),
            };
            let mut doc = ResultDocument::new(&pf, &problem, &result, stalled);
            if timing {
                doc.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            if csv {
                emit(out, &format!("{}\n{}", ResultDocument::csv_header(), doc.csv_row()))?;
            } else {
                emit(out, &to_json(&doc)?)?;
            }
            Ok(if stalled { 3 } else { 0 })
        }
        Command::Gleason {
            file,
            tol,
            theorem4,
            part_slack,
        } => {
            let pf = read_problem(&file)?;
            let backend = pf.backend()?;
            let sites = pf.sites()?;
            let tolerance = tol.or(pf.tolerance).unwrap_or(DEFAULT_DISTANCE_TOLERANCE);
            let mut report = gleason::part_partition(&backend, &sites, part_slack, tolerance)?;
            if theorem4 {
                report.theorem4 = Some(gleason::theorem4_check(&backend, &sites, tolerance)?);
            }
            emit(out, &to_json(&report)?)?;
            Ok(0)
        }
        Command::Verify { suite, seed } => {
            let results = verify::run_suite(suite, seed);
            out.write_all(verify::render(&results).as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
            Ok(if results.iter().all(PropertyResult::passed) { 0 } else { 1 })
        }
        Command::KernelProbe { lmax } => {
            if lmax == 0 {
                return Err(CliError::Invalid("field `lmax`: must be at least 1".into()));
            }
            let mut text = String::from("l,grid,l1_norm");
            let mut l = 1;
            while l <= lmax {
                let k = kernels::kernel_coeffs(KernelKind::Dlvp, l)?;
                let grid = 64 * l;
                let norm = kernels::kernel_l1_norm(&k, grid)?;
                text.push_str(&format!("\n{l},{grid},{norm:.15}"));
                l *= 2;
            }
            emit(out, &text)?;
            Ok(0)
        }
    }
}
