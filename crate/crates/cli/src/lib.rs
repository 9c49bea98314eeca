//! Batch driver: flags and parameter files in, one JSON envelope per result out.

pub mod args;
pub mod commands;
pub mod output;

pub use args::{Cli, Command, Flags};
pub use commands::{run, Outcome, DEFAULT_SEED};
pub use output::{write_csv, write_jsonl, Format, ResultEnvelope};

use std::time::Instant;

/// Runs one subcommand and wraps its outputs in envelopes.
pub fn execute(cmd: Command, flags: &Flags) -> wglab_core::Result<(Vec<ResultEnvelope>, Option<String>)> {
    let start = Instant::now();
    let outcome = run(cmd, flags)?;
    let ms = if flags.no_timing { 0.0 } else { start.elapsed().as_secs_f64() * 1e3 };
    let envs = outcome
        .outputs
        .into_iter()
        .map(|outputs| ResultEnvelope {
            cmd: cmd.name().to_string(),
            inputs: outcome.inputs.clone(),
            outputs,
            seed: flags.seed.unwrap_or(DEFAULT_SEED),
            version: env!("CARGO_PKG_VERSION").to_string(),
            ms,
        })
        .collect();
    Ok((envs, outcome.failure))
}
