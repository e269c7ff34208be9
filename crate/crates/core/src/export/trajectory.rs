//! Segment tables for traced trajectories.

use std::io::Write;

use serde::Serialize;

use crate::billiard::TraceStatus;
use crate::geom::Vec3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub x0: f64,
    pub y0: f64,
    pub z0: f64,
    pub x1: f64,
    pub y1: f64,
    pub z1: f64,
    pub segment_length: f64,
    pub status: TraceStatus,
}

/// Consecutive polyline vertices as segments, each tagged with the trace status.
pub fn segments(polyline: &[Vec3], status: TraceStatus) -> Vec<Segment> {
    polyline
        .windows(2)
        .map(|w| Segment {
            x0: w[0].x,
            y0: w[0].y,
            z0: w[0].z,
            x1: w[1].x,
            y1: w[1].y,
            z1: w[1].z,
            segment_length: (w[1] - w[0]).norm(),
            status,
        })
        .collect()
}

pub fn write_segments_csv<W: Write>(w: W, segments: &[Segment]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for s in segments {
        out.serialize(s)?;
    }
    out.flush()?;
    Ok(())
}
