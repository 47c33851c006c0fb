use std::path::PathBuf;
use std::process::ExitCode;

use bolab_cli::{execute, CliError, Command, Config};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bolab", version, about = "Benjamin-Ono numerical lab")]
struct Cli {
    /// TOML configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random ensemble.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Print only the final status line.
    #[arg(long, global = true)]
    quiet: bool,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Exact identities, commutator dichotomy and the Hilbert oracle.
    Identities,
    /// Evolve one initial datum and record conserved quantities and norms.
    Solve {
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        /// Also run the solver validation battery.
        #[arg(long)]
        suite: bool,
    },
    /// Weighted-norm persistence ladders, threshold scans and smoothing budgets.
    Persistence {
        /// Number of boxes in the ladder.
        #[arg(long)]
        ladder_levels: Option<usize>,
    },
    /// A2 classification, truncated-weight audit and weighted Hilbert bounds.
    Weights,
    /// General Argument, D^1/2 weight bounds and inequality ensembles.
    Commutators,
}

fn build(cli: &Cli) -> Result<(Command, Config), CliError> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let command = match &cli.command {
        Sub::Identities => Command::Identities,
        Sub::Solve { dt, t_end, suite } => {
            if let Some(dt) = dt {
                config.solve.dt = *dt;
            }
            if let Some(t_end) = t_end {
                config.solve.t_end = *t_end;
            }
            config.solve.suite |= suite;
            Command::Solve
        }
        Sub::Persistence { ladder_levels } => {
            if let Some(levels) = ladder_levels {
                config.persistence.ladder.levels = *levels;
            }
            Command::Persistence
        }
        Sub::Weights => Command::Weights,
        Sub::Commutators => Command::Commutators,
    };
    Ok((command, config))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build(&cli).and_then(|(command, config)| {
        if cli.print_config {
            print!("{}", config.to_toml());
            return Ok(0);
        }
        let summary = execute(command, &config, &cli.out)?;
        if !cli.quiet {
            for line in summary.lines() {
                println!("{line}");
            }
        }
        println!(
            "{} {} -> {}",
            if summary.pass() { "PASS" } else { "FAIL" },
            command.name(),
            cli.out.display()
        );
        Ok(summary.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
