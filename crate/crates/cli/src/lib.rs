//! Experiment harness: configuration, orchestration and run records.

pub mod checks;
pub mod commands;
pub mod config;
pub mod record;

#[cfg(test)]
mod tests;

use std::path::PathBuf;

use config::{parse_config, Cli};
use record::{Failure, RunRecord};

/// Run one command and write `<out>/run.json`; returns the exit status.
pub fn run(cli: Cli) -> i32 {
    let fallback_out = cli
        .flags
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out"));
    let (config, outcome) = match parse_config(cli.command, cli.flags) {
        Ok(config) => {
            let outcome = commands::dispatch(&config);
            (Some(config), outcome)
        }
        Err(e) => (None, Err(Failure::from(e))),
    };
    let record = RunRecord::new(config.clone(), outcome);
    let out = config.map(|c| c.out).unwrap_or(fallback_out);
    if let Some(err) = &record.error {
        eprintln!("error [{}]: {}", err.kind, err.message);
    }
    let written = std::fs::create_dir_all(&out)
        .map_err(|e| mixlap_core::Error::Io(e.to_string()))
        .and_then(|_| mixlap_core::io::write_json(&out.join("run.json"), &record));
    if let Err(e) = written {
        eprintln!("error [Io]: could not write run record: {e}");
    }
    println!(
        "{}",
        serde_json::to_string(&record.result).unwrap_or_default()
    );
    record.exit_code
}
