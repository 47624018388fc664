//! Command-line front end, config and artifact plumbing around
//! `minkflat-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cmd;
pub mod config;
pub mod error;
pub mod output;
pub mod specs;

use std::path::Path;

use clap::ValueEnum;

use config::Config;
use error::LabError;
use output::{Artifacts, Check};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Subcommand {
    Infconv,
    BomanBlowup,
    RotateSweep,
    Curve,
    Hinge,
    Cantor,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Infconv => "infconv",
            Subcommand::BomanBlowup => "boman-blowup",
            Subcommand::RotateSweep => "rotate-sweep",
            Subcommand::Curve => "curve",
            Subcommand::Hinge => "hinge",
            Subcommand::Cantor => "cantor",
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub exit_code: i32,
    pub error: Option<serde_json::Value>,
}

/// Runs a subcommand and writes its artifacts under `out`. A failed check
/// is a construction failure (exit 4) but the artifacts are still written.
pub fn execute(sub: Subcommand, cfg: &Config, out: &Path) -> Outcome {
    let mut art = Artifacts::new(out);
    let res = match sub {
        Subcommand::Infconv => cmd::infconv::run(cfg, &mut art),
        Subcommand::BomanBlowup => cmd::blowup::run(cfg, &mut art),
        Subcommand::RotateSweep => cmd::sweep::run(cfg, &mut art),
        Subcommand::Curve => cmd::curve::run(cfg, &mut art),
        Subcommand::Hinge => cmd::hinge::run(cfg, &mut art),
        Subcommand::Cantor => cmd::cantor::run(cfg, &mut art),
    };
    let (checks, e) = match res {
        Err(e) => (Vec::new(), e),
        Ok(checks) => {
            let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            let e = match art.finish(sub.name(), cfg, &checks) {
                Err(e) => e,
                Ok(_) if failed.is_empty() => return Outcome { checks, exit_code: 0, error: None },
                Ok(_) => LabError::Construction(format!("failed checks: {}", failed.join("; "))),
            };
            (checks, e)
        }
    };
    let error = e.to_json();
    let _ = std::fs::create_dir_all(out).and_then(|_| {
        std::fs::write(
            out.join("error.json"),
            format!("{}\n", serde_json::to_string_pretty(&error).unwrap_or_default()),
        )
    });
    Outcome { checks, exit_code: e.exit_code(), error: Some(error) }
}
