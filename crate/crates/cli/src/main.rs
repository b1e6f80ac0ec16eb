use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::RunConfig;

const EXIT_NUMERIC: u8 = 2;
const EXIT_VIOLATED: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

/// Oscillation of solutions of f'' + A f = 0 in the unit disc.
#[derive(Debug, Parser)]
#[command(name = "disc-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Locate the zeros of one solution and write them as CSV.
    Zeros(RunArgs),
    /// Check the oscillation bounds and write JSON reports.
    Verify(RunArgs),
    /// Draw the disc with zeros and overlays as SVG.
    Plot(PlotArgs),
    /// Reproduce one of the worked examples (1 to 5, or schwarz).
    Examples(ExampleArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Coefficient, e.g. `hille:a=-8`, `legendre:n=3`, `series:0`.
    #[arg(long)]
    coef: Option<String>,
    /// Combination `α,β` of the reference basis.
    #[arg(long, allow_hyphen_values = true)]
    sol: Option<String>,
    /// Initial data `f(0),f'(0)`.
    #[arg(long, allow_hyphen_values = true)]
    ic: Option<String>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with defaults for any of these options.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated theorem names.
    #[arg(long, value_delimiter = ',')]
    theorems: Option<Vec<String>>,
    /// Constant of the `N_A ≤ 1 + C(1 − |z|)` condition; estimated when absent.
    #[arg(long = "C")]
    c: Option<f64>,
    /// Bound on `N_A` used by the growth check; estimated when absent.
    #[arg(long = "K")]
    k: Option<f64>,
    /// Exponent of the growth check and the integral limit.
    #[arg(long)]
    p: Option<f64>,
    /// Angles of the polar grid.
    #[arg(long)]
    angles: Option<usize>,
    /// Radial levels `1 − 2^{−j}` of the polar grid.
    #[arg(long)]
    levels: Option<u32>,
    /// Number of sampled solutions when no `--sol`/`--ic` is given.
    #[arg(long)]
    samples: Option<usize>,
    /// Boundary angle for the accumulation scan.
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<f64>,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, Failure> {
        let base = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            coef: self.coef,
            sol: self.sol,
            ic: self.ic,
            rmax: self.rmax,
            tol: self.tol,
            out: self.out,
            theorems: self.theorems,
            c: self.c,
            k: self.k,
            p: self.p,
            angles: self.angles,
            levels: self.levels,
            samples: self.samples,
            zeta: self.zeta,
        };
        let cfg = base.overlay(flags);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Zero CSV written by `zeros`.
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    /// Draw the horodisc family with this parameter C.
    #[arg(long)]
    pub horodisc: Option<f64>,
    /// Number of horodisc directions.
    #[arg(long, default_value_t = 12)]
    pub directions: usize,
    /// Carleson square `angle:length`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub carleson: Vec<String>,
    /// Four-arc domain `τ,ρ`.
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long)]
    pub size: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    pub id: String,
    /// Directory for the bundled report.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

/// Failure classes, one per exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<disc_lab::Error> for Failure {
    fn from(e: disc_lab::Error) -> Self {
        use disc_lab::Error as E;
        match e {
            E::Parse(_) | E::ParameterConstraint(_) => Failure::Usage(e.to_string()),
            E::Io(_) => Failure::Io(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("DISC_LAB_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Failure::Usage(format!("DISC_LAB_THREADS={v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    configure_threads()?;
    match cli.command {
        Command::Zeros(a) => commands::zeros(&a.into_config()?).map(|_| true),
        Command::Verify(a) => commands::verify(&a.into_config()?),
        Command::Plot(a) => commands::plot(&a).map(|_| true),
        Command::Examples(a) => commands::examples(&a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VIOLATED),
        Err(f) => {
            eprintln!("disc-lab: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
