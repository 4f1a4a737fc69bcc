mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Ctx;
use config::{Overrides, RunConfig};

/// Cannon codings, pressure, Manhattan curves and orbit counting for
/// hyperbolic groups.
#[derive(Parser)]
#[command(name = "orbitcount", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    rcone: Option<usize>,
    #[arg(long, global = true)]
    nmax: Option<usize>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Build and validate the coding.
    Automaton,
    /// Components, periods, maximal sets and arithmeticity.
    Analyze,
    Growth,
    Manhattan,
    Scan,
    Count,
    Correlate,
    Mixing,
    /// Every command above, plus a combined summary.
    Report,
}

fn run(cli: &Cli) -> orbitcount::Result<serde_json::Value> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| orbitcount::Error::Input("--config is required".into()))?;
    let ov = Overrides {
        out: cli.out.clone(),
        depth: cli.depth,
        rcone: cli.rcone,
        nmax: cli.nmax,
        eps: cli.eps,
        tol: cli.tol,
    };
    let ctx = Ctx::new(RunConfig::load(path, &ov)?)?;
    match cli.command {
        Command::Automaton => commands::cmd_automaton(&ctx),
        Command::Analyze => commands::cmd_analyze(&ctx),
        Command::Growth => commands::cmd_growth(&ctx),
        Command::Manhattan => commands::cmd_manhattan(&ctx),
        Command::Scan => commands::cmd_scan(&ctx),
        Command::Count => commands::cmd_count(&ctx),
        Command::Correlate => commands::cmd_correlate(&ctx),
        Command::Mixing => commands::cmd_mixing(&ctx),
        Command::Report => commands::cmd_report(&ctx),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
