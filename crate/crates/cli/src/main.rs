//! `chp`: data for every figure and experiment from one seeded binary.

mod commands;
mod config;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{read_config_file, Defaults, RunConfig};
use output::Output;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(chp_core::Error),
    Io(String),
}

impl From<chp_core::Error> for CliError {
    fn from(e: chp_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use chp_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Core(E::Config(_) | E::DegenerateInstanceClass(_)) => 2,
            CliError::Core(E::Resource(_)) => 3,
            CliError::Core(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "chp", version, about = "Spin squeezing and close Hadamard oracle-decision simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal squeezing across system sizes, plus the central histograms.
    SqueezeScan,
    /// Spherical Q-function and Dicke distribution of a coherent or squeezed state.
    Qfunc,
    /// Run the quantum decision procedure on problem instances.
    Solve,
    /// Classical query counts and decision-tree depths.
    Classical,
    /// Transform-oracle-transform output distributions per hidden index.
    Spectrum,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SqueezeScan => "squeeze-scan",
            Command::Qfunc => "qfunc",
            Command::Solve => "solve",
            Command::Classical => "classical",
            Command::Spectrum => "spectrum",
        }
    }

    fn defaults(&self) -> Defaults {
        let qubits: &'static [u32] = match self {
            Command::SqueezeScan => &[2, 3, 4, 5, 6, 7, 8, 9, 10],
            Command::Qfunc => &[6],
            Command::Solve => &[4],
            Command::Classical => &[3, 4, 5, 6, 7, 8, 9, 10],
            Command::Spectrum => &[3],
        };
        Defaults { qubits }
    }
}

#[derive(Debug, Args)]
struct Opts {
    /// Qubit counts: `6`, `2..10` or `3,5`; the dimension is N = 2^n.
    #[arg(long, global = true)]
    n: Option<String>,
    /// Spin values instead of --n: `63/2` or `3/2..1023/2`.
    #[arg(long = "s-range", global = true)]
    s_range: Option<String>,
    /// restricted, unrestricted or fourier.
    #[arg(long, global = true)]
    variant: Option<String>,
    /// Error weight(s) or `all`.
    #[arg(long, global = true)]
    errors: Option<String>,
    /// Repetition counts (solve) or probe counts (classical), comma separated.
    #[arg(long, global = true)]
    reps: Option<String>,
    #[arg(long, global = true)]
    trials: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Q-function grid, `T` or `TxP` (θ steps × φ steps).
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Golden-section tolerance on μ.
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// coherent or squeezed.
    #[arg(long, global = true)]
    state: Option<String>,
    /// Use the in-phase worst-case syndrome for unrestricted runs.
    #[arg(long = "worst-case", global = true)]
    worst_case: bool,
    /// `key=value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Opts {
    fn merge_into(&self, map: &mut BTreeMap<String, String>) {
        let flags = [
            ("n", self.n.clone()),
            ("s-range", self.s_range.clone()),
            ("variant", self.variant.clone()),
            ("errors", self.errors.clone()),
            ("reps", self.reps.clone()),
            ("trials", self.trials.clone()),
            ("seed", self.seed.clone()),
            ("grid", self.grid.clone()),
            ("tol", self.tol.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("format", self.format.clone()),
            ("state", self.state.clone()),
            ("worst-case", self.worst_case.then(|| "true".to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                // --n and --s-range are alternatives; a flag replaces either one from the file.
                match key {
                    "n" => drop(map.remove("s-range")),
                    "s-range" => drop(map.remove("n")),
                    _ => {}
                }
                map.insert(key.to_string(), v);
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut map = match &cli.opts.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    cli.opts.merge_into(&mut map);
    let cfg = RunConfig::resolve(&map, cli.command.defaults())?;
    let mut out = Output::create(&cfg.out, cfg.format)?;
    let summary = match cli.command {
        Command::SqueezeScan => commands::squeeze_scan(&cfg, &mut out)?,
        Command::Qfunc => commands::qfunc(&cfg, &mut out)?,
        Command::Solve => commands::solve(&cfg, &mut out)?,
        Command::Classical => commands::classical(&cfg, &mut out)?,
        Command::Spectrum => commands::spectrum(&cfg, &mut out)?,
    };
    out.finish(cli.command.name(), &cfg, summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
