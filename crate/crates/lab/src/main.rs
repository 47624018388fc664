use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use minkflat::config::Config;
use minkflat::{execute, Subcommand};

/// Infimal convolutions, flat convex curves and their Minkowski sums.
#[derive(Parser, Debug)]
#[command(name = "minkflat", version)]
struct Cli {
    #[arg(value_enum)]
    command: Subcommand,
    /// key = value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides `grid`
    #[arg(long)]
    grid: Option<usize>,
    /// Overrides `depth`
    #[arg(long)]
    depth: Option<usize>,
    /// Overrides `tol`
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    };
    let mut cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", e.to_json());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(g) = cli.grid {
        cfg.set("grid", g);
    }
    if let Some(d) = cli.depth {
        cfg.set("depth", d);
    }
    if let Some(t) = cli.tol {
        cfg.set("tol", t);
    }
    let outcome = execute(cli.command, &cfg, &cli.out);
    for c in &outcome.checks {
        println!("{} {}: {:e} (bound {:e})", if c.pass { "pass" } else { "FAIL" }, c.name, c.measured, c.bound);
    }
    if let Some(e) = &outcome.error {
        eprintln!("{e}");
    }
    ExitCode::from(outcome.exit_code as u8)
}
