//! Subcommand bodies. Each returns the text it prints and whether its
//! thresholds passed.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use mirror_billiards::billiard::{trace_line, TraceLimits, TraceStatus};
use mirror_billiards::export::{
    segments, tessellate, to_json_string, trajectory_svg, write_segments_csv, write_stl, Plane,
    SvgOptions,
};
use mirror_billiards::geom::{UnitVec3, Vec3};
use mirror_billiards::metrics::{
    phase_volume_audit, resistance, verify_direction, PhaseVolumeReport, ResistanceReport,
    VerdictReport,
};
use mirror_billiards::{AmbientBody, Body, McOptions};

use crate::config::{Property, RunConfig};

pub const DEFAULT_VERDICT_THRESHOLD: f64 = 1e-9;
pub const DEFAULT_RESISTANCE_SIGMAS: f64 = 3.0;
pub const DEFAULT_PHASE_TOLERANCE: f64 = 0.01;

pub struct Outcome {
    /// JSON summary printed on stdout.
    pub report: String,
    pub passed: bool,
}

struct Setup {
    body: Body,
    ambient: AmbientBody,
    opts: McOptions,
    limits: TraceLimits,
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    cfg.validate()?;
    let body = cfg.build_body()?;
    let ambient = cfg.build_ambient(&body)?;
    let opts = McOptions {
        samples: cfg.samples,
        seed: cfg.seed,
        workers: cfg.workers,
    };
    let limits = TraceLimits {
        max_bounces: cfg.max_bounces,
        ..TraceLimits::default()
    };
    Ok(Setup {
        body,
        ambient,
        opts,
        limits,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

#[derive(Serialize)]
struct VerifyOutput {
    property: Property,
    threshold: f64,
    passed: bool,
    reports: Vec<VerdictReport>,
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let threshold = cfg.threshold.unwrap_or(DEFAULT_VERDICT_THRESHOLD);
    let reports: Vec<VerdictReport> = cfg
        .directions()
        .into_iter()
        .map(|v| verify_direction(&s.body, &s.ambient, v, &s.opts, &s.limits))
        .collect();
    let passed = reports.iter().all(|r| match cfg.property {
        Property::Invisible => r.invisible(threshold),
        Property::ZeroResistance => r.zero_resistance(threshold),
    });
    let out = VerifyOutput {
        property: cfg.property,
        threshold,
        passed,
        reports,
    };
    Ok(Outcome {
        report: to_json_string(&out),
        passed,
    })
}

#[derive(Serialize)]
struct ResistanceOutput {
    sigmas: f64,
    passed: bool,
    reports: Vec<ResistanceReport>,
}

/// Passes when every component of every force is consistent with zero.
pub fn cmd_resistance(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let sigmas = cfg.threshold.unwrap_or(DEFAULT_RESISTANCE_SIGMAS);
    let reports: Vec<ResistanceReport> = cfg
        .directions()
        .into_iter()
        .map(|v| resistance(&s.body, &s.ambient, v, &s.opts, &s.limits))
        .collect();
    let passed = reports.iter().all(|r| r.consistent_with_zero(sigmas));
    let out = ResistanceOutput {
        sigmas,
        passed,
        reports,
    };
    Ok(Outcome {
        report: to_json_string(&out),
        passed,
    })
}

#[derive(Serialize)]
struct PhaseVolumeOutput {
    relative_tolerance: f64,
    /// `|l_body - reachable_bound| / reachable_bound`.
    relative_gap: f64,
    passed: bool,
    report: PhaseVolumeReport,
}

/// Passes when the reachable phase volume matches `4 pi |C \ B|` to the
/// relative tolerance.
pub fn cmd_phase_volume(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let tol = cfg.threshold.unwrap_or(DEFAULT_PHASE_TOLERANCE);
    let report = phase_volume_audit(&s.body, &s.ambient, &s.opts, &s.limits);
    let bound = report.reachable_bound.value;
    let relative_gap = (report.l_body.value - bound).abs() / bound;
    let passed = relative_gap <= tol;
    let out = PhaseVolumeOutput {
        relative_tolerance: tol,
        relative_gap,
        passed,
        report,
    };
    Ok(Outcome {
        report: to_json_string(&out),
        passed,
    })
}

#[derive(Serialize)]
struct TraceOutput {
    status: TraceStatus,
    bounces: usize,
    path_length: f64,
    entry_point: Vec3,
    exit_point: Vec3,
    exit_velocity: UnitVec3,
    polyline: Vec<Vec3>,
    csv: PathBuf,
    svg: PathBuf,
}

/// Traces the line through `cfg.through` along the first direction and
/// writes `<out>.csv` and `<out>.svg`.
pub fn cmd_trace(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let v = cfg.directions()[0];
    let through = Vec3::new(cfg.through[0], cfg.through[1], cfg.through[2]);
    let limits = TraceLimits {
        record_path: true,
        ..s.limits
    };
    let r = trace_line(&s.body, &s.ambient, through, v, &limits)?;
    let polyline = r.polyline.clone().unwrap_or_default();

    let stem = cfg.out.clone().unwrap_or_else(|| PathBuf::from("trace"));
    let csv_path = stem.with_extension("csv");
    let svg_path = stem.with_extension("svg");
    write_segments_csv(create(&csv_path)?, &segments(&polyline, r.status))
        .with_context(|| format!("writing {}", csv_path.display()))?;
    let plane = Plane::parse(&cfg.plane).expect("validated plane");
    let svg = trajectory_svg(
        &s.body,
        &s.ambient,
        &polyline,
        &SvgOptions {
            plane,
            slice: through[plane.normal_axis()],
            ..SvgOptions::default()
        },
    );
    std::fs::write(&svg_path, svg).with_context(|| format!("writing {}", svg_path.display()))?;

    let out = TraceOutput {
        status: r.status,
        bounces: r.bounces,
        path_length: r.path_length,
        entry_point: polyline.first().copied().unwrap_or(r.exit_point),
        exit_point: r.exit_point,
        exit_velocity: r.exit_velocity,
        polyline,
        csv: csv_path,
        svg: svg_path,
    };
    Ok(Outcome {
        report: to_json_string(&out),
        passed: true,
    })
}

#[derive(Serialize)]
struct MeshOutput {
    path: PathBuf,
    tolerance: f64,
    triangles: usize,
    volume: f64,
    components: usize,
    watertight: bool,
}

/// Writes a binary STL of the body to `out` (default `body.stl`).
pub fn cmd_export_mesh(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let body = cfg.build_body()?;
    let mesh = tessellate(&body, cfg.tolerance)?;
    let path = cfg.out.clone().unwrap_or_else(|| PathBuf::from("body.stl"));
    write_stl(create(&path)?, &mesh).with_context(|| format!("writing {}", path.display()))?;
    let out = MeshOutput {
        path,
        tolerance: cfg.tolerance,
        triangles: mesh.triangles.len(),
        volume: mesh.signed_volume(),
        components: mesh.connected_components(),
        watertight: mesh.is_watertight(),
    };
    Ok(Outcome {
        report: to_json_string(&out),
        passed: true,
    })
}
