use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use k4free_lab::config::{Command, ExperimentConfig};
use k4free_lab::formats::{emit, read_text};
use k4free_lab::{execute, Result};

#[derive(Parser)]
#[command(name = "k4lab", about = "K4-free random graph process experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// One run and its summary.
    Simulate(Flags),
    /// Grid of (n, run) with scaling fits.
    Sweep(Flags),
    /// Triple ledgers and martingale audit for one configuration.
    Track(Flags),
    /// Hypothesis checklist for the built-in ledger variables.
    DemCheck(Flags),
    /// Density monitors on a terminated run.
    DensityCheck(Flags),
    /// K4-freeness and maximality of a run or an edge list.
    Certify(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// Flat key=value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// One n or a comma-separated list.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    runs: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// paper or desk.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long = "W")]
    w: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// termination, steps=K or t=X.
    #[arg(long)]
    stop: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// auto or a JSON file with U, A, B, C.
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    subset_samples: Option<String>,
    #[arg(long)]
    pair_samples: Option<String>,
    #[arg(long)]
    check_interval: Option<String>,
    /// Worker threads; 0 picks one per core.
    #[arg(long)]
    workers: Option<String>,
    /// Edge list to certify.
    #[arg(long)]
    input: Option<String>,
    /// Where simulate writes the edge list.
    #[arg(long)]
    edges: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("n", &self.n),
            ("runs", &self.runs),
            ("seed", &self.seed),
            ("mode", &self.mode),
            ("epsilon", &self.epsilon),
            ("W", &self.w),
            ("mu", &self.mu),
            ("gamma", &self.gamma),
            ("stop", &self.stop),
            ("out", &self.out),
            ("format", &self.format),
            ("sigma", &self.sigma),
            ("subset-samples", &self.subset_samples),
            ("pair-samples", &self.pair_samples),
            ("check-interval", &self.check_interval),
            ("workers", &self.workers),
            ("input", &self.input),
            ("edges", &self.edges),
        ]
    }
}

fn build(command: Command, flags: &Flags) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(command);
    if let Some(path) = &flags.config {
        cfg.apply_file_text(&path.display().to_string(), &read_text(path)?)?;
    }
    for (key, value) in flags.pairs() {
        if let Some(v) = value {
            cfg.apply(key, v)?;
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match &cli.command {
        Sub::Simulate(f) => (Command::Simulate, f),
        Sub::Sweep(f) => (Command::Sweep, f),
        Sub::Track(f) => (Command::Track, f),
        Sub::DemCheck(f) => (Command::DemCheck, f),
        Sub::DensityCheck(f) => (Command::DensityCheck, f),
        Sub::Certify(f) => (Command::Certify, f),
    };
    let result = build(command, flags).and_then(|cfg| {
        let run = execute(&cfg)?;
        emit(cfg.out.as_deref(), &run.bytes)?;
        Ok(run)
    });
    match result {
        Ok(run) => {
            eprintln!("{} finished in {:.3}s", command.name(), run.elapsed_secs);
            if run.certified {
                ExitCode::SUCCESS
            } else {
                eprintln!("certification failed");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
