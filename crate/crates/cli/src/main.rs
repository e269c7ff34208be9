use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser};

use mirror_billiards_cli::config::{AmbientKind, BodyKindName, Property};
use mirror_billiards_cli::{run, Command, RunConfig};

#[derive(Parser)]
#[command(
    name = "mirror-billiards",
    version,
    about = "Billiard scattering by parabolic mirror bodies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

/// Every flag overrides the matching key of `--config`.
#[derive(Args)]
struct Flags {
    /// TOML file with the same keys as these flags (snake_case).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true, value_enum)]
    body_kind: Option<BodyKindName>,
    #[arg(long, global = true)]
    body_file: Option<PathBuf>,
    /// Slab thickness.
    #[arg(long, global = true)]
    z_extent: Option<f64>,
    /// Ball radius, cuboid half-width or wedge depth.
    #[arg(long, global = true)]
    fixture_size: Option<f64>,
    #[arg(long, global = true, value_enum)]
    ambient: Option<AmbientKind>,
    /// Sphere radius or box half-width.
    #[arg(long, global = true)]
    ambient_size: Option<f64>,
    /// Direction `x,y,z`; repeat for several.
    #[arg(long, global = true, allow_hyphen_values = true)]
    dir: Vec<String>,
    #[arg(long, global = true)]
    samples: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Report file, trajectory file stem, or STL path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Residual bound (verify), sigma multiple (resistance) or relative
    /// tolerance (phase-volume).
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Chordal tolerance of the STL mesh.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true, value_enum)]
    property: Option<Property>,
    /// Point `x,y,z` on the traced line.
    #[arg(long, global = true, allow_hyphen_values = true)]
    through: Option<String>,
    /// SVG projection plane such as `xy` or `xz`.
    #[arg(long, global = true)]
    plane: Option<String>,
    #[arg(long, global = true)]
    max_bounces: Option<usize>,
}

fn parse_triple(s: &str) -> Result<[f64; 3]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        bail!("expected three comma-separated numbers, got {s:?}");
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p
            .parse()
            .map_err(|e| anyhow::anyhow!("bad number {p:?} in {s:?}: {e}"))?;
    }
    Ok(out)
}

fn resolve(flags: Flags) -> Result<RunConfig> {
    let mut cfg = match &flags.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => {
            $(if let Some(v) = flags.$field { cfg.$field = v; })*
        };
    }
    set!(
        alpha,
        beta,
        gamma,
        body_kind,
        z_extent,
        fixture_size,
        ambient,
        samples,
        seed
    );
    set!(tolerance, property, plane, max_bounces);
    if flags.body_file.is_some() {
        cfg.body_file = flags.body_file;
    }
    if flags.ambient_size.is_some() {
        cfg.ambient_size = flags.ambient_size;
    }
    if flags.workers.is_some() {
        cfg.workers = flags.workers;
    }
    if flags.out.is_some() {
        cfg.out = flags.out;
    }
    if flags.threshold.is_some() {
        cfg.threshold = flags.threshold;
    }
    if !flags.dir.is_empty() {
        cfg.dir = flags
            .dir
            .iter()
            .map(|d| parse_triple(d))
            .collect::<Result<_>>()?;
    }
    if let Some(t) = &flags.through {
        cfg.through = parse_triple(t)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve(cli.flags).and_then(|cfg| run(cli.command, &cfg));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.report);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("threshold check failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
