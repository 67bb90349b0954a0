//! `fglab`: verification campaigns over flag geometries of finite projective spaces.

mod config;
mod run;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use config::{CommonArgs, Command, ConfigError, Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "fglab", version, about = "Exact verification campaigns for embeddings of point-hyperplane flag geometries")]
#[command(after_help = "Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error.\n\
Set FGLAB_MAX_ORDER to change the largest accepted field order.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

fn emit_error(e: &ConfigError) -> ExitCode {
    println!("{}", json!({"error": {"kind": e.kind, "message": e.message}}));
    ExitCode::from(2)
}

fn write_report(cfg: &RunConfig, body: &str) -> Result<(), ConfigError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| ConfigError::new("OutputWrite", format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| ConfigError::new("OutputWrite", e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let message = e.to_string();
            return emit_error(&ConfigError::new("Usage", message.lines().next().unwrap_or_default()));
        }
    };
    let cfg = match RunConfig::resolve(cli.command, cli.common) {
        Ok(cfg) => cfg,
        Err(e) => return emit_error(&e),
    };
    let start = Instant::now();
    let mut report = match run::run(&cfg) {
        Ok(r) => r,
        Err(e) => return emit_error(&e),
    };
    report.param("config", serde_json::to_value(&cfg).expect("serializable"));
    if cfg.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    let body = match cfg.format {
        Format::Json => report.to_json_string(),
        Format::Csv => report.to_csv(),
    };
    if let Err(e) = write_report(&cfg, &body) {
        return emit_error(&e);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
