use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hjlab::commands::{self, Console, CounterexampleArgs, KSelection};
use hjlab::{LabError, RunConfig};
use hjlab_core::counterexample::CutoffProfile;

#[derive(Debug, Parser)]
#[command(name = "hjlab", version, about = "Maximal regularity experiments for viscous Hamilton–Jacobi equations")]
struct Cli {
    /// Run configuration (JSON) for `solve` and `sweep`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for ensembles.
    #[arg(long, global = true, env = "HJLAB_THREADS")]
    threads: Option<usize>,
    /// Suppress progress messages.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cutoff {
    Smooth,
    Sharp,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the exponents (δ, p, β, η) as JSON.
    Params {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Solve one instance.
    Solve,
    /// Solve an ensemble with seeds seed, seed+1, ...
    Sweep,
    /// Tabulate norms of the radial counterexample family.
    Counterexample {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        dim: u32,
        /// Defaults to the critical exponent d(γ−1)/γ.
        #[arg(long)]
        q: Option<f64>,
        /// Comma-separated ε values; defaults to 2^-4, ..., 2^-9.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long, value_enum, default_value = "smooth")]
        cutoff: Cutoff,
    },
    /// Check a stored solution against the identities and inequalities.
    Audit {
        solution_dir: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Recompute the superlevel curve of a stored solution.
    Curve {
        solution_dir: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        k_min: f64,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long, default_value_t = 64)]
        count: usize,
        /// Comma-separated explicit k values; overrides the geometric grid.
        #[arg(long, value_delimiter = ',')]
        k: Vec<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, LabError> {
    let path = path.ok_or_else(|| LabError::Config("--config is required".into()))?;
    RunConfig::load(path)
}

fn run(cli: Cli) -> Result<i32, LabError> {
    let console = Console { quiet: cli.quiet };
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    match cli.command {
        Command::Params { gamma, q, dim, delta } => {
            println!("{}", commands::cmd_params(gamma, q, dim, delta)?);
            Ok(0)
        }
        Command::Solve => {
            let cfg = load_config(cli.config.as_deref())?;
            let root = hjlab::runner::output_root(&cfg, cli.out.as_deref());
            commands::cmd_solve(&cfg, &root, console)
        }
        Command::Sweep => {
            let cfg = load_config(cli.config.as_deref())?;
            let root = hjlab::runner::output_root(&cfg, cli.out.as_deref());
            commands::cmd_sweep(&cfg, &root, threads, console)
        }
        Command::Counterexample { gamma, dim, q, eps, cutoff } => {
            let args = CounterexampleArgs {
                gamma,
                dim,
                q,
                eps: if eps.is_empty() { CounterexampleArgs::default_eps() } else { eps },
                cutoff: match cutoff {
                    Cutoff::Smooth => CutoffProfile::Smooth,
                    Cutoff::Sharp => CutoffProfile::Sharp,
                },
            };
            let root = cli.out.unwrap_or_else(|| PathBuf::from("hjlab-out"));
            commands::cmd_counterexample(&args, &root, console)
        }
        Command::Audit { solution_dir, delta } => {
            commands::cmd_audit(&solution_dir, cli.out.as_deref(), delta, console)
        }
        Command::Curve { solution_dir, k_min, k_max, count, k, delta } => {
            let ks = if !k.is_empty() {
                KSelection::Explicit(k)
            } else {
                let k_max = k_max.ok_or_else(|| {
                    LabError::Config("curve needs --k-max or an explicit --k list".into())
                })?;
                KSelection::Geometric { k_min, k_max, count }
            };
            commands::cmd_curve(&solution_dir, cli.out.as_deref(), &ks, delta)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("hjlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
