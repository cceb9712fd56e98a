use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pathint_cli::config::parse_config;
use pathint_cli::experiments::{render_from_manifest, run, Mode, RunContext};
use pathint_cli::{parallel, CliError};

/// Stochastic-control experiments: feedback trajectories, Monte Carlo
/// comparisons, and the receding-horizon path-integral controller.
#[derive(Parser)]
#[command(name = "pathint", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: `out/<experiment>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Skip SVG rendering.
    #[arg(long)]
    no_svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one feedback trajectory.
    Simulate(RunArgs),
    /// Monte Carlo ensemble with reweighting diagnostics.
    Mc(RunArgs),
    /// Cubic quantum rule vs the 2bX/3 benchmark on common noise.
    CompareEx3(RunArgs),
    /// Receding-horizon path-integral controller vs the cooperative benchmark.
    PiCompare(RunArgs),
    /// Scan the first-order-condition residual over a control interval.
    FocScan(RunArgs),
    /// Grid-refinement defect study of the Hamiltonian operator.
    MghDefect(RunArgs),
    /// Re-render figure.svg from the CSVs in an output directory.
    Render {
        /// Directory containing manifest.json and the CSV artifacts.
        #[arg(long)]
        out: PathBuf,
    },
}

fn execute(mode: Mode, args: &RunArgs) -> Result<(), CliError> {
    let mut config = parse_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(config.experiment.id()));
    let ctx = RunContext {
        out_dir,
        seed: config.seed,
        n_paths: config.n_paths,
        config_hash: config.source_hash.clone(),
        render_svg: !args.no_svg,
    };
    let pool = parallel::thread_pool(args.threads)?;
    pool.install(|| run(mode, &config, &ctx))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(args) => execute(Mode::Simulate, args),
        Command::Mc(args) => execute(Mode::MonteCarlo, args),
        Command::CompareEx3(args) => execute(Mode::CompareEx3, args),
        Command::PiCompare(args) => execute(Mode::PiCompare, args),
        Command::FocScan(args) => execute(Mode::FocScan, args),
        Command::MghDefect(args) => execute(Mode::MghDefect, args),
        Command::Render { out } => render_from_manifest(out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("pathint: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}
