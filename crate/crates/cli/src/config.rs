//! Run configuration: TOML file keys mirror the command-line flags.

use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use mirror_billiards::bodies::{
    make_ball, make_cuboid, make_invisible_union, make_slab_2d_body, make_two_dir_body, make_wedge,
    parse_body_file,
};
use mirror_billiards::geom::{AmbientBody, UnitVec3, Vec3};
use mirror_billiards::Body;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BodyKindName {
    TwoDir,
    Slab,
    Union,
    Empty,
    Ball,
    Cuboid,
    Wedge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AmbientKind {
    Sphere,
    Box,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Invisible,
    ZeroResistance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub body_kind: BodyKindName,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Thickness of the extruded planar figure.
    pub z_extent: f64,
    /// Ball radius, cuboid half-width or wedge depth.
    pub fixture_size: f64,
    /// Patch-list body; replaces `body_kind` when set.
    pub body_file: Option<PathBuf>,
    pub ambient: AmbientKind,
    /// Sphere radius or box half-width; chosen to enclose the body when unset.
    pub ambient_size: Option<f64>,
    pub dir: Vec<[f64; 3]>,
    pub samples: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    /// Verdict residual bound, resistance sigma multiple, or relative
    /// phase-volume tolerance; per-command default when unset.
    pub threshold: Option<f64>,
    /// Chordal tolerance for mesh export.
    pub tolerance: f64,
    pub property: Property,
    /// Point on the traced line.
    pub through: [f64; 3],
    /// SVG projection plane, e.g. `xy`.
    pub plane: String,
    pub max_bounces: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            body_kind: BodyKindName::TwoDir,
            alpha: 1.0,
            beta: 1.0,
            gamma: 0.6,
            z_extent: 1.0,
            fixture_size: 1.0,
            body_file: None,
            ambient: AmbientKind::Sphere,
            ambient_size: None,
            dir: vec![[0.0, -1.0, 0.0], [0.0, 0.0, -1.0]],
            samples: 100_000,
            seed: 1,
            workers: None,
            out: None,
            threshold: None,
            tolerance: 1e-3,
            property: Property::Invisible,
            through: [0.8, 0.0, 0.2],
            plane: "xy".into(),
            max_bounces: 64,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid config file")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Checks every constraint that does not need the body itself.
    pub fn validate(&self) -> Result<()> {
        ensure!(self.samples > 0, "samples must be positive");
        ensure!(self.workers != Some(0), "workers must be positive");
        ensure!(!self.dir.is_empty(), "at least one direction is required");
        for d in &self.dir {
            ensure!(
                d.iter().all(|x| x.is_finite()) && d.iter().any(|&x| x != 0.0),
                "direction {d:?} must be finite and non-zero"
            );
        }
        if let Some(s) = self.ambient_size {
            ensure!(
                s.is_finite() && s > 0.0,
                "ambient_size must be positive (got {s})"
            );
        }
        if let Some(t) = self.threshold {
            ensure!(
                t.is_finite() && t > 0.0,
                "threshold must be positive (got {t})"
            );
        }
        ensure!(
            self.tolerance.is_finite() && self.tolerance > 0.0,
            "tolerance must be positive (got {})",
            self.tolerance
        );
        ensure!(
            self.fixture_size.is_finite() && self.fixture_size > 0.0,
            "fixture_size must be positive (got {})",
            self.fixture_size
        );
        ensure!(
            self.through.iter().all(|x| x.is_finite()),
            "through must be finite"
        );
        ensure!(
            mirror_billiards::export::Plane::parse(&self.plane).is_some(),
            "plane must name two distinct axes, e.g. xy (got {:?})",
            self.plane
        );
        Ok(())
    }

    pub fn directions(&self) -> Vec<UnitVec3> {
        self.dir
            .iter()
            .map(|d| UnitVec3::new(Vec3::new(d[0], d[1], d[2])).expect("validated direction"))
            .collect()
    }

    pub fn build_body(&self) -> Result<Body> {
        if let Some(path) = &self.body_file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading body file {}", path.display()))?;
            let patches =
                parse_body_file(&text).with_context(|| format!("in {}", path.display()))?;
            return Ok(Body::from_patches(patches)?);
        }
        let (a, b, g, s) = (self.alpha, self.beta, self.gamma, self.fixture_size);
        Ok(match self.body_kind {
            BodyKindName::TwoDir => make_two_dir_body(a, b, g)?,
            BodyKindName::Slab => make_slab_2d_body(a, b, g, self.z_extent)?,
            BodyKindName::Union => make_invisible_union(a, b, g)?,
            BodyKindName::Empty => Body::empty(),
            BodyKindName::Ball => make_ball(Vec3::ZERO, s),
            BodyKindName::Cuboid => make_cuboid(Vec3::new(-s, -s, -s), Vec3::new(s, s, s)),
            BodyKindName::Wedge => make_wedge(0.02, s),
        })
    }

    /// The container, sized to enclose the body with margin when no size is given.
    pub fn build_ambient(&self, body: &Body) -> Result<AmbientBody> {
        let (lo, hi) = body.bbox.unwrap_or((Vec3::ZERO, Vec3::ZERO));
        let corners = [lo, hi];
        let size = match self.ambient_size {
            Some(s) => s,
            None => {
                let reach = match self.ambient {
                    AmbientKind::Sphere => corners_norm_max(lo, hi),
                    AmbientKind::Box => corners
                        .iter()
                        .flat_map(|p| [p.x.abs(), p.y.abs(), p.z.abs()])
                        .fold(0.0, f64::max),
                };
                ((1.15 * reach) * 2.0).ceil().max(2.0) / 2.0
            }
        };
        let c = match self.ambient {
            AmbientKind::Sphere => AmbientBody::sphere(size),
            AmbientKind::Box => AmbientBody::cube(size),
        };
        if body.bbox.is_some() {
            for x in [lo.x, hi.x] {
                for y in [lo.y, hi.y] {
                    for z in [lo.z, hi.z] {
                        let p = Vec3::new(x, y, z);
                        if c.signed_distance(p) >= 0.0 {
                            bail!(
                                "ambient {:?} of size {size} must strictly contain the body \
                                 (bounding-box corner {p} is outside)",
                                self.ambient
                            );
                        }
                    }
                }
            }
        }
        Ok(c)
    }
}

fn corners_norm_max(lo: Vec3, hi: Vec3) -> f64 {
    let m = lo.component_max(-lo).component_max(hi).component_max(-hi);
    m.norm()
}
