//! `distapprox`: experiment runner for the distributed approximation algorithms.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when an
//! invariant, the message budget or a verification check fails.

mod config;
mod runner;
mod solution;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use distapprox::graph::{format_graph, generate, read_graph, GenParams, GraphKind, WeightMode};

use config::{ConfigFile, Settings};

/// Failures of the command line tool.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(distapprox::Error),
    Io { path: PathBuf, source: std::io::Error },
    /// A guarantee checked by the runner itself does not hold.
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Lib(e) => e.exit_code() as u8,
            CliError::Violation(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Violation(msg) => write!(f, "violation: {msg}"),
        }
    }
}

impl From<distapprox::Error> for CliError {
    fn from(e: distapprox::Error) -> Self {
        CliError::Lib(e)
    }
}

#[derive(Parser)]
#[command(name = "distapprox", version, about = "Run, check and compare distributed approximation algorithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an algorithm over one or more trials and write results.csv.
    Run(RunArgs),
    /// Re-check a solution file against a graph file.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Write a generated graph in the text format.
    Generate {
        /// Generator spec such as `random_bipartite:8,8,0.4`.
        #[arg(long = "gen")]
        spec: String,
        #[arg(long, default_value = "node")]
        mode: String,
        #[arg(long, default_value_t = 20)]
        max_weight: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flags of `run`; each overrides the matching config file key.
#[derive(Args)]
struct RunArgs {
    /// `key = value` file with optional `[algorithm]` sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// mwvc-bipartite, mwvc-general, mwm-rand, mwm-det, cluster-only or fractional-only.
    #[arg(long)]
    alg: Option<String>,
    /// Generator spec such as `random_bipartite:8,8,0.4`.
    #[arg(long = "gen")]
    spec: Option<String>,
    /// Graph file in the text format.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Approximation parameter; density loss for cluster-only.
    #[arg(long)]
    eps: Option<String>,
    /// Failure probability for mwm-rand, accuracy for fractional-only (default 0.25).
    #[arg(long)]
    delta: Option<String>,
    /// Base seed; trial t uses seed + t.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// Compare against the exact solvers; blank when the instance is too large.
    #[arg(long)]
    oracle: bool,
    /// Output directory (default `results`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest generated weight (default 20).
    #[arg(long)]
    max_weight: Option<String>,
    /// Bits allowed per message; defaults to 4⌈log2 n⌉.
    #[arg(long)]
    bit_budget: Option<String>,
    /// Leave wall_ms blank so repeated runs produce identical files.
    #[arg(long)]
    no_timing: bool,
    /// Independent-set provider for mwvc-general: greedy, two-coloring or auto.
    #[arg(long)]
    provider: Option<String>,
    /// Fixed iteration count for mwm-rand.
    #[arg(long)]
    iterations: Option<String>,
    /// Cap on the bipartition family sequence length for mwm-det.
    #[arg(long)]
    family_k: Option<String>,
    /// Bipartite matching solver for the mwm loops: exact or throttled.
    #[arg(long)]
    solver: Option<String>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    threads: Option<String>,
}

impl RunArgs {
    fn settings(&self) -> Settings {
        let mut s = Settings::default();
        let strings = [
            ("alg", &self.alg),
            ("gen", &self.spec),
            ("eps", &self.eps),
            ("delta", &self.delta),
            ("seed", &self.seed),
            ("trials", &self.trials),
            ("max_weight", &self.max_weight),
            ("bit_budget", &self.bit_budget),
            ("provider", &self.provider),
            ("iterations", &self.iterations),
            ("family_k", &self.family_k),
            ("solver", &self.solver),
            ("threads", &self.threads),
        ];
        for (key, value) in strings {
            if let Some(v) = value {
                s.set(key, v.clone());
            }
        }
        if let Some(p) = &self.graph {
            s.set("graph", p.to_string_lossy());
        }
        if let Some(p) = &self.out {
            s.set("out", p.to_string_lossy());
        }
        if self.oracle {
            s.set("oracle", "true");
        }
        if self.no_timing {
            s.set("no_timing", "true");
        }
        s
    }
}

fn read_text(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    let file = args.config.as_ref().map(read_text).transpose()?.map(|t| ConfigFile::parse(&t)).transpose()?;
    let cfg = config::resolve(file.as_ref(), &args.settings())?;
    let written = runner::run(&cfg)?;
    eprintln!("{written} trial(s) written to {}", cfg.out.join("results.csv").display());
    Ok(())
}

fn verify(graph: &PathBuf, solution: &PathBuf) -> Result<bool, CliError> {
    let g = read_graph(graph)?;
    let parsed = solution::parse_solution(&read_text(solution)?)?;
    let report = solution::verify(&g, &parsed);
    print!("{}", report.render());
    Ok(report.passed())
}

fn generate_graph(spec: &str, mode: &str, max_weight: u64, seed: u64, out: Option<&PathBuf>) -> Result<(), CliError> {
    let kind: GraphKind = spec.parse().map_err(|e: distapprox::Error| CliError::Usage(e.to_string()))?;
    let mode: WeightMode = mode.parse().map_err(|_| CliError::Usage(format!("unknown weight mode `{mode}`")))?;
    let g = generate(&kind, &GenParams { max_weight, mode }, seed)?;
    let text = format_graph(&g);
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Verify { graph, solution } => match verify(graph, solution) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(2),
            Err(e) => Err(e),
        },
        Command::Generate { spec, mode, max_weight, seed, out } => {
            generate_graph(spec, mode, *max_weight, *seed, out.as_ref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
