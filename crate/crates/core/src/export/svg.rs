//! Static SVG figure: a planar slice of the body, the container outline and
//! a trajectory projected onto the same plane.

use std::fmt::Write as _;

use crate::bodies::Body;
use crate::geom::{AmbientBody, Axis, Vec3};

/// Coordinate plane `(horizontal, vertical)`; the third axis is the slice axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plane {
    pub horizontal: Axis,
    pub vertical: Axis,
}

impl Plane {
    pub const XY: Plane = Plane {
        horizontal: Axis::X,
        vertical: Axis::Y,
    };

    /// Parses names such as `xy`, `xz` or `zy`.
    pub fn parse(s: &str) -> Option<Plane> {
        let mut it = s.chars();
        let h = Axis::parse(&it.next()?.to_string())?;
        let v = Axis::parse(&it.next()?.to_string())?;
        (it.next().is_none() && h != v).then_some(Plane {
            horizontal: h,
            vertical: v,
        })
    }

    pub fn normal_axis(&self) -> Axis {
        self.horizontal.third(self.vertical)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvgOptions {
    pub plane: Plane,
    /// Coordinate of the slice along the plane's normal axis.
    pub slice: f64,
    /// Membership grid resolution along the horizontal axis.
    pub resolution: usize,
    pub width_px: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            plane: Plane::XY,
            slice: 0.0,
            resolution: 400,
            width_px: 800.0,
        }
    }
}

/// Renders the figure; `polyline` is the entry point, reflection points and exit point.
pub fn trajectory_svg(
    body: &Body,
    c: &AmbientBody,
    polyline: &[Vec3],
    opts: &SvgOptions,
) -> String {
    let (h, v, n) = (
        opts.plane.horizontal,
        opts.plane.vertical,
        opts.plane.normal_axis(),
    );
    let (lo, hi) = ambient_bounds(c);
    let (x0, x1, y0, y1) = (lo[h], hi[h], lo[v], hi[v]);
    let scale = opts.width_px / (x1 - x0);
    let height_px = (y1 - y0) * scale;
    let px = |p: Vec3| ((p[h] - x0) * scale, (y1 - p[v]) * scale);
    let stroke = 1.5;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{hh:.1}" viewBox="0 0 {w:.3} {hh:.3}">"#,
        w = opts.width_px,
        hh = height_px
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // Container outline.
    match *c {
        AmbientBody::Sphere { center, radius } => {
            let d = opts.slice - center[n];
            let r = (radius * radius - d * d).max(0.0).sqrt();
            let (cx, cy) = px(center);
            let _ = writeln!(
                s,
                r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="gray" stroke-width="{stroke}"/>"#,
                r * scale
            );
        }
        AmbientBody::Box { .. } => {
            let _ = writeln!(
                s,
                r#"<rect x="0" y="0" width="{:.3}" height="{height_px:.3}" fill="none" stroke="gray" stroke-width="{stroke}"/>"#,
                opts.width_px
            );
        }
    }

    // Body slice, one rect per run of inside cells in a grid row.
    let cols = opts.resolution.max(1);
    let cell = (x1 - x0) / cols as f64;
    let rows = ((y1 - y0) / cell).ceil() as usize;
    let _ = writeln!(s, r##"<g fill="#4a6fa5" stroke="none">"##);
    for r in 0..rows {
        let yc = y1 - (r as f64 + 0.5) * cell;
        let mut run: Option<usize> = None;
        for col in 0..=cols {
            let inside = col < cols && {
                let xc = x0 + (col as f64 + 0.5) * cell;
                body.contains(Vec3::ZERO.with(h, xc).with(v, yc).with(n, opts.slice))
            };
            match (inside, run) {
                (true, None) => run = Some(col),
                (false, Some(start)) => {
                    let _ = writeln!(
                        s,
                        r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
                        start as f64 * cell * scale,
                        r as f64 * cell * scale,
                        (col - start) as f64 * cell * scale,
                        cell * scale
                    );
                    run = None;
                }
                _ => {}
            }
        }
    }
    let _ = writeln!(s, "</g>");

    if let (Some(&first), Some(&last)) = (polyline.first(), polyline.last()) {
        let pts: Vec<String> = polyline
            .iter()
            .map(|&p| {
                let (a, b) = px(p);
                format!("{a:.3},{b:.3}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#c0392b" stroke-width="{stroke}"/>"##,
            pts.join(" ")
        );
        for &p in &polyline[1..polyline.len() - 1] {
            let (a, b) = px(p);
            let _ = writeln!(s, r#"<circle cx="{a:.3}" cy="{b:.3}" r="3" fill="black"/>"#);
        }
        for (p, color) in [(first, "green"), (last, "orange")] {
            let (a, b) = px(p);
            let _ = writeln!(
                s,
                r#"<circle cx="{a:.3}" cy="{b:.3}" r="5" fill="{color}"/>"#
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn ambient_bounds(c: &AmbientBody) -> (Vec3, Vec3) {
    match *c {
        AmbientBody::Sphere { center, radius } => {
            let r = Vec3::new(radius, radius, radius);
            (center - r, center + r)
        }
        AmbientBody::Box { min, max } => (min, max),
    }
}
