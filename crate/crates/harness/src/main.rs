use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pa_harness::{plot_file, run_experiment, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(name = "pa-sim", version, about = "Seeded regret experiments for repeated principal-agent games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write per-seed CSVs, a summary and optionally a plot.
    Run(RunArgs),
    /// Render a summary CSV as an SVG plot.
    Plot {
        #[arg(long)]
        summary: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment (figure1).
    #[arg(long)]
    preset: Option<String>,
    /// Subroutine used by IPA entries: ucb or eps-greedy.
    #[arg(long)]
    subroutine: Option<String>,
    /// Override the output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override the number of seeds.
    #[arg(long)]
    seeds: Option<usize>,
}

fn run(args: RunArgs) -> Result<(), HarnessError> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => ExperimentConfig::preset(name)?,
        (None, None) => unreachable!("clap requires one of --config/--preset"),
    };
    if let Some(sub) = &args.subroutine {
        cfg.algorithms = cfg
            .algorithms
            .iter()
            .map(|a| a.with_subroutine(sub))
            .collect::<Result<_, _>>()?;
    }
    if let Some(dir) = args.output {
        cfg.output_dir = dir;
    }
    if let Some(n) = args.seeds {
        cfg.seeds.count = n;
    }
    cfg.validate()?;
    let out = run_experiment(&cfg)?;
    let last = cfg.horizon as usize - 1;
    for c in &out.summary.columns {
        println!(
            "{:<16} mean regret at T={}: {:.3} (stderr {:.3})",
            c.key, cfg.horizon, c.mean[last], c.stderr[last]
        );
    }
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Plot { summary, out } => plot_file(&summary, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
