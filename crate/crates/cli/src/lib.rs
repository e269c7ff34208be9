//! Command-line front end for mirror billiards: configuration and subcommands.

pub mod commands;
pub mod config;

use anyhow::{Context, Result};

pub use commands::Outcome;
pub use config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Trace one line; write a segment CSV and an SVG slice.
    Trace,
    /// Zero-resistance and invisibility residuals per direction.
    Verify,
    /// Resistance force per direction.
    Resistance,
    /// Reachable phase volume against 4 pi |C \ B|.
    PhaseVolume,
    /// Binary STL mesh of the body.
    ExportMesh,
}

/// Runs `cmd`; report-producing commands also write the report to `cfg.out`.
pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome> {
    let outcome = match cmd {
        Command::Trace => commands::cmd_trace(cfg)?,
        Command::Verify => commands::cmd_verify(cfg)?,
        Command::Resistance => commands::cmd_resistance(cfg)?,
        Command::PhaseVolume => commands::cmd_phase_volume(cfg)?,
        Command::ExportMesh => commands::cmd_export_mesh(cfg)?,
    };
    if matches!(
        cmd,
        Command::Verify | Command::Resistance | Command::PhaseVolume
    ) {
        if let Some(path) = &cfg.out {
            std::fs::write(path, &outcome.report)
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(outcome)
}
