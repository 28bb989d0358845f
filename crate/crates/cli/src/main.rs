use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use univalent::experiment::{run_experiment, ExperimentConfig, REGISTRY};
use univalent::Error;

/// Runs experiments described by JSON configs.
#[derive(Parser)]
#[command(name = "univalent", version)]
struct Cli {
    /// List registered experiments and exit.
    #[arg(long)]
    list: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment in a config file.
    Run {
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output path; defaults to the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const CONFIG_ERROR: u8 = 2;
const NOT_CERTIFIED: u8 = 3;

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        Error::Config(_) => ExitCode::from(CONFIG_ERROR),
        _ => ExitCode::FAILURE,
    }
}

fn run(config: PathBuf, seed: Option<u64>, out: Option<PathBuf>) -> ExitCode {
    let mut cfg = match ExperimentConfig::load(&config) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let written = match out.or(cfg.output.clone()) {
        Some(path) => report.write(&path, cfg.format),
        None => report.render(cfg.format).map(|text| print!("{text}")),
    };
    if let Err(e) = written {
        return fail(&e);
    }
    if !report.certified {
        eprintln!("warning: {} did not pass its duality certificate", report.experiment);
        return ExitCode::from(NOT_CERTIFIED);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for (name, about) in REGISTRY {
            println!("{name:<24}{about}");
        }
        return ExitCode::SUCCESS;
    }
    match cli.command {
        Some(Command::Run { config, seed, out }) => run(config, seed, out),
        None => {
            eprintln!("error: expected `run <config>` or `--list`");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}
