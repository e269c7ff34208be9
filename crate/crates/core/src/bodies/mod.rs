//! Mirror bodies: the parabolic family with zero resistance along `-y` and
//! `-z`, its four-copy invisible union, and a few test fixtures.
//!
//! Coordinates: the two design directions are `(0,-1,0)` and `(0,0,-1)`, the
//! quadratic argument of every parabolic face is `x`, and the single body is
//! centered at the common focus of its parabolas (the origin).

mod file;
mod solid;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Axis, Isometry, Patch, TrimConstraint, UnitVec3, Vec3};
use crate::sampling::{map_chunks, sample_rng, Estimate, McOptions, RunningStats};

pub use file::{parse_body_file, write_body_file, BodyFileError};
pub use solid::Solid;

/// First design direction, `(0, -1, 0)`.
pub const DESIGN_DIR_Y: UnitVec3 = UnitVec3::new_unchecked(Vec3::new(0.0, -1.0, 0.0));
/// Second design direction, `(0, 0, -1)`.
pub const DESIGN_DIR_Z: UnitVec3 = UnitVec3::new_unchecked(Vec3::new(0.0, 0.0, -1.0));

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BodyError {
    #[error("invalid body parameters: {0}")]
    InvalidParams(String),
}

/// Whether the inner planar faces at `|x| = gamma` exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `gamma <= 1/(2 alpha)`: curvilinear triangles, no inner faces.
    Triangular,
    /// `gamma > 1/(2 alpha)`: curvilinear trapezia.
    Trapezial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyKind {
    Slab2D,
    TwoDir3D,
    InvisibleUnion,
}

/// Construction parameters of the parabolic family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub kind: BodyKind,
}

impl BodySpec {
    pub fn new(alpha: f64, beta: f64, gamma: f64, kind: BodyKind) -> Result<Self, BodyError> {
        let spec = Self {
            alpha,
            beta,
            gamma,
            kind,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), BodyError> {
        let (a, b, g) = (self.alpha, self.beta, self.gamma);
        if !(a.is_finite() && b.is_finite() && g.is_finite()) {
            return Err(BodyError::InvalidParams(
                "alpha, beta and gamma must be finite".into(),
            ));
        }
        if a <= 0.0 {
            return Err(BodyError::InvalidParams(format!(
                "alpha must be positive (got {a})"
            )));
        }
        if 2.0 * a * b <= 1.0 {
            return Err(BodyError::InvalidParams(format!(
                "need 2*alpha*beta > 1 (got {})",
                2.0 * a * b
            )));
        }
        if g < 0.0 {
            return Err(BodyError::InvalidParams(format!(
                "gamma must be non-negative (got {g})"
            )));
        }
        if g >= b {
            return Err(BodyError::InvalidParams(format!(
                "need gamma < beta (got gamma = {g}, beta = {b})"
            )));
        }
        Ok(())
    }

    /// Offset `1/(4 alpha)`: the parabolas `y = +-(alpha x^2 - c)` share the
    /// focus at the origin.
    pub fn c(&self) -> f64 {
        1.0 / (4.0 * self.alpha)
    }

    /// Half-height of the cross-section at `|x|`: `alpha x^2 - c`.
    pub fn half_height(&self, x: f64) -> f64 {
        self.alpha * x * x - self.c()
    }

    /// Copy spacing of the invisible union: the length `2 (alpha beta^2 - c)`
    /// of the flat side at `|x| = beta`.
    pub fn h(&self) -> f64 {
        2.0 * self.half_height(self.beta)
    }

    pub fn regime(&self) -> Regime {
        if self.gamma <= 1.0 / (2.0 * self.alpha) {
            Regime::Triangular
        } else {
            Regime::Trapezial
        }
    }

    /// Smallest `|x|` carrying material.
    pub fn inner_x(&self) -> f64 {
        self.gamma.max(1.0 / (2.0 * self.alpha))
    }
}

/// A mirror body: patches for tracing plus a membership predicate.
#[derive(Clone, Debug, PartialEq)]
pub struct Body {
    pub patches: Vec<Patch>,
    pub solid: Solid,
    /// `None` for the empty body.
    pub bbox: Option<(Vec3, Vec3)>,
    pub spec: Option<BodySpec>,
}

impl Body {
    pub fn empty() -> Body {
        Body {
            patches: Vec::new(),
            solid: Solid::Empty,
            bbox: None,
            spec: None,
        }
    }

    /// A body described only by its patches; membership by ray parity.
    pub fn from_patches(patches: Vec<Patch>) -> Result<Body, BodyError> {
        let bbox = patch_bounds(&patches)?;
        Ok(Body {
            patches,
            solid: Solid::Parity,
            bbox,
            spec: None,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn contains(&self, p: Vec3) -> bool {
        match self.bbox {
            None => false,
            Some((lo, hi)) => {
                let inside_box = p.x >= lo.x
                    && p.x <= hi.x
                    && p.y >= lo.y
                    && p.y <= hi.y
                    && p.z >= lo.z
                    && p.z <= hi.z;
                inside_box && self.solid.contains(p, &self.patches)
            }
        }
    }

    pub fn bbox_volume(&self) -> f64 {
        self.bbox.map_or(0.0, |(lo, hi)| {
            let e = hi - lo;
            e.x * e.y * e.z
        })
    }

    fn moved(&self, iso: &Isometry) -> Body {
        let patches = self.patches.iter().map(|p| p.transformed(iso)).collect();
        let solid = match &self.solid {
            Solid::Empty => Solid::Empty,
            Solid::Parity => Solid::Parity,
            other => Solid::Moved {
                inner: Box::new(other.clone()),
                map: *iso,
            },
        };
        let bbox = self.bbox.map(|(lo, hi)| {
            let (a, b) = (iso.apply(lo), iso.apply(hi));
            (a.component_min(b), a.component_max(b))
        });
        Body {
            patches,
            solid,
            bbox,
            spec: self.spec,
        }
    }
}

fn patch_bounds(patches: &[Patch]) -> Result<Option<(Vec3, Vec3)>, BodyError> {
    let mut acc: Option<(Vec3, Vec3)> = None;
    for (i, p) in patches.iter().enumerate() {
        let (lo, hi) = p.bounds().ok_or_else(|| {
            BodyError::InvalidParams(format!("patch {i} is not bounded by its trim"))
        })?;
        acc = Some(match acc {
            None => (lo, hi),
            Some((a, b)) => (a.component_min(lo), b.component_max(hi)),
        });
    }
    Ok(acc)
}

fn abs_range(axis: Axis, max: f64) -> TrimConstraint {
    TrimConstraint::AbsRange {
        axis,
        min: 0.0,
        max,
    }
}

fn x_faces(spec: &BodySpec, extra_trim: impl Fn(f64) -> Vec<TrimConstraint>) -> Vec<Patch> {
    let mut out = Vec::new();
    for side in [1.0, -1.0] {
        out.push(Patch::plane(
            Vec3::new(side * spec.beta, 0.0, 0.0),
            UnitVec3::axis(Axis::X, side),
            extra_trim(spec.half_height(spec.beta)),
        ));
    }
    if spec.regime() == Regime::Trapezial {
        for side in [1.0, -1.0] {
            out.push(Patch::plane(
                Vec3::new(side * spec.gamma, 0.0, 0.0),
                UnitVec3::axis(Axis::X, -side),
                extra_trim(spec.half_height(spec.gamma)),
            ));
        }
    }
    out
}

/// The body `{ |y|, |z| <= alpha x^2 - 1/(4 alpha), gamma <= |x| <= beta }`.
pub fn make_two_dir_body(alpha: f64, beta: f64, gamma: f64) -> Result<Body, BodyError> {
    let spec = BodySpec::new(alpha, beta, gamma, BodyKind::TwoDir3D)?;
    let c = spec.c();
    let mut patches = Vec::new();
    for (height, other) in [(Axis::Y, Axis::Z), (Axis::Z, Axis::Y)] {
        for sign in [1.0, -1.0] {
            patches.push(Patch::parabolic(
                height,
                Axis::X,
                sign,
                alpha,
                vec![
                    TrimConstraint::AbsRange {
                        axis: Axis::X,
                        min: gamma,
                        max: beta,
                    },
                    TrimConstraint::Parabolic {
                        axis: other,
                        arg: Axis::X,
                        alpha,
                        c,
                    },
                ],
            ));
        }
    }
    patches.extend(x_faces(&spec, |g| {
        vec![abs_range(Axis::Y, g), abs_range(Axis::Z, g)]
    }));
    let g = spec.half_height(beta);
    Ok(Body {
        patches,
        solid: Solid::TwoDir { alpha, beta, gamma },
        bbox: Some((Vec3::new(-beta, -g, -g), Vec3::new(beta, g, g))),
        spec: Some(spec),
    })
}

/// The planar figure `{ |y| <= alpha x^2 - 1/(4 alpha), gamma <= |x| <= beta }`
/// extruded over `|z| <= z_extent / 2`.
pub fn make_slab_2d_body(
    alpha: f64,
    beta: f64,
    gamma: f64,
    z_extent: f64,
) -> Result<Body, BodyError> {
    let spec = BodySpec::new(alpha, beta, gamma, BodyKind::Slab2D)?;
    if !(z_extent.is_finite() && z_extent > 0.0) {
        return Err(BodyError::InvalidParams(format!(
            "z_extent must be positive (got {z_extent})"
        )));
    }
    let hz = 0.5 * z_extent;
    let c = spec.c();
    let mut patches = Vec::new();
    for sign in [1.0, -1.0] {
        patches.push(Patch::parabolic(
            Axis::Y,
            Axis::X,
            sign,
            alpha,
            vec![
                TrimConstraint::AbsRange {
                    axis: Axis::X,
                    min: gamma,
                    max: beta,
                },
                abs_range(Axis::Z, hz),
            ],
        ));
    }
    patches.extend(x_faces(&spec, |g| {
        vec![abs_range(Axis::Y, g), abs_range(Axis::Z, hz)]
    }));
    for side in [1.0, -1.0] {
        patches.push(Patch::plane(
            Vec3::new(0.0, 0.0, side * hz),
            UnitVec3::axis(Axis::Z, side),
            vec![
                TrimConstraint::AbsRange {
                    axis: Axis::X,
                    min: gamma,
                    max: beta,
                },
                TrimConstraint::Parabolic {
                    axis: Axis::Y,
                    arg: Axis::X,
                    alpha,
                    c,
                },
            ],
        ));
    }
    let g = spec.half_height(beta);
    Ok(Body {
        patches,
        solid: Solid::Slab {
            alpha,
            beta,
            gamma,
            half_z: hz,
        },
        bbox: Some((Vec3::new(-beta, -g, -hz), Vec3::new(beta, g, hz))),
        spec: Some(spec),
    })
}

/// Union of four copies of [`make_two_dir_body`] shifted by `0`, `h v1`,
/// `h v2` and `h (v1 + v2)`.
pub fn make_invisible_union(alpha: f64, beta: f64, gamma: f64) -> Result<Body, BodyError> {
    let base = make_two_dir_body(alpha, beta, gamma)?;
    let spec = base.spec.expect("constructed body carries its spec");
    let h = spec.h();
    let shifts = [
        Vec3::ZERO,
        *DESIGN_DIR_Y * h,
        *DESIGN_DIR_Z * h,
        (*DESIGN_DIR_Y + *DESIGN_DIR_Z) * h,
    ];
    let copies: Vec<Body> = shifts.iter().map(|&s| translate_body(&base, s)).collect();
    let mut body = union_of(&copies);
    body.spec = Some(BodySpec {
        kind: BodyKind::InvisibleUnion,
        ..spec
    });
    Ok(body)
}

/// Union of bodies that are known not to overlap.
pub fn union_of(parts: &[Body]) -> Body {
    let patches = parts
        .iter()
        .flat_map(|b| b.patches.iter().cloned())
        .collect();
    let bbox = parts
        .iter()
        .filter_map(|b| b.bbox)
        .reduce(|(a, b), (c, d)| (a.component_min(c), b.component_max(d)));
    let solid = if parts.iter().any(|b| b.solid == Solid::Parity) {
        Solid::Parity
    } else {
        Solid::Union(parts.iter().map(|b| b.solid.clone()).collect())
    };
    Body {
        patches,
        solid,
        bbox,
        spec: None,
    }
}

pub fn translate_body(body: &Body, offset: Vec3) -> Body {
    if offset == Vec3::ZERO {
        return body.clone();
    }
    body.moved(&Isometry::translation(offset))
}

/// Rotation by a quarter turn about the `x` axis: `(x, y, z) -> (x, -z, y)`.
pub fn rotate_body_quarter_turn_x(body: &Body) -> Body {
    body.moved(&Isometry::quarter_turn_x())
}

/// Monte Carlo volume: fraction of uniform bounding-box samples inside the body.
pub fn body_volume(body: &Body, opts: &McOptions) -> Estimate {
    let Some((lo, hi)) = body.bbox else {
        return Estimate::exact(0.0);
    };
    let extent = hi - lo;
    let chunks = map_chunks(opts.samples, opts.workers, |range| {
        let mut stats = RunningStats::default();
        for i in range {
            let mut rng = sample_rng(opts.seed, PURPOSE_VOLUME, i);
            let p = lo
                + Vec3::new(
                    extent.x * rng.random::<f64>(),
                    extent.y * rng.random::<f64>(),
                    extent.z * rng.random::<f64>(),
                );
            stats.push(if body.contains(p) { 1.0 } else { 0.0 });
        }
        stats
    });
    let mut total = RunningStats::default();
    chunks.iter().for_each(|s| total.merge(s));
    total.scaled(body.bbox_volume())
}

const PURPOSE_VOLUME: u64 = 0x766f6c;

/// Exact volume of the two-direction body: `2 * int_{inner}^{beta} (2 g(x))^2 dx`
/// with `g(x) = alpha x^2 - c`.
pub fn two_dir_volume_exact(spec: &BodySpec) -> f64 {
    let (a, c) = (spec.alpha, spec.c());
    // Antiderivative of 4 (a x^2 - c)^2 = 4 (a^2 x^4 - 2 a c x^2 + c^2).
    let prim = |x: f64| 4.0 * (a * a * x.powi(5) / 5.0 - 2.0 * a * c * x.powi(3) / 3.0 + c * c * x);
    2.0 * (prim(spec.beta) - prim(spec.inner_x()))
}

/// Unit-style fixture: the axis-aligned box `[min, max]` with outward faces.
pub fn make_cuboid(min: Vec3, max: Vec3) -> Body {
    let mut patches = Vec::new();
    for axis in Axis::ALL {
        let others: Vec<Axis> = Axis::ALL.into_iter().filter(|&a| a != axis).collect();
        let trim: Vec<TrimConstraint> = others
            .iter()
            .map(|&a| TrimConstraint::Range {
                axis: a,
                min: min[a],
                max: max[a],
            })
            .collect();
        patches.push(Patch::plane(
            Vec3::ZERO.with(axis, max[axis]),
            UnitVec3::axis(axis, 1.0),
            trim.clone(),
        ));
        patches.push(Patch::plane(
            Vec3::ZERO.with(axis, min[axis]),
            UnitVec3::axis(axis, -1.0),
            trim,
        ));
    }
    Body {
        patches,
        solid: Solid::Cuboid { min, max },
        bbox: Some((min, max)),
        spec: None,
    }
}

/// Fixture: a mirror ball.
pub fn make_ball(center: Vec3, radius: f64) -> Body {
    let r = Vec3::new(radius, radius, radius);
    Body {
        patches: vec![Patch::sphere(center, radius)],
        solid: Solid::Ball { center, radius },
        bbox: Some((center - r, center + r)),
        spec: None,
    }
}

/// Fixture: two thin mirrors forming a narrow wedge with its apex on the `z`
/// axis, opening towards `+y` with full angle `angle` and depth `depth`.
/// Rays fed into the mouth along `-y` bounce roughly `pi / angle` times.
pub fn make_wedge(angle: f64, depth: f64) -> Body {
    let half = 0.5 * angle;
    let mut patches = Vec::new();
    for side in [1.0, -1.0] {
        // Mirror line through the origin with direction (side sin, cos).
        let normal = UnitVec3::new(Vec3::new(half.cos(), -side * half.sin(), 0.0) * side)
            .expect("non-zero normal");
        patches.push(Patch::plane(
            Vec3::ZERO,
            normal,
            vec![
                TrimConstraint::Range {
                    axis: Axis::Y,
                    min: 0.0,
                    max: depth * half.cos(),
                },
                TrimConstraint::Range {
                    axis: Axis::Z,
                    min: -depth,
                    max: depth,
                },
            ],
        ));
    }
    let bbox = patch_bounds(&patches).expect("wedge patches are bounded");
    Body {
        patches,
        solid: Solid::Empty,
        bbox,
        spec: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezial_membership() {
        let b = make_two_dir_body(1.0, 1.0, 0.6).unwrap();
        assert_eq!(b.spec.unwrap().regime(), Regime::Trapezial);
        assert!(b.contains(Vec3::new(0.8, 0.0, 0.0)));
        assert!(!b.contains(Vec3::new(0.5, 0.0, 0.0)));
        assert!(!b.contains(Vec3::new(0.8, 0.5, 0.0)));
        // 4 parabolic faces, 2 outer and 2 inner flat faces.
        assert_eq!(b.patches.len(), 8);
    }

    #[test]
    fn triangular_regime_omits_inner_faces() {
        let b = make_two_dir_body(1.0, 1.0, 0.4).unwrap();
        assert_eq!(b.spec.unwrap().regime(), Regime::Triangular);
        assert_eq!(b.patches.len(), 6);
        // Boundary case gamma = 1/(2 alpha) is still triangular.
        let edge = BodySpec::new(1.0, 1.0, 0.5, BodyKind::TwoDir3D).unwrap();
        assert_eq!(edge.regime(), Regime::Triangular);
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(
            make_two_dir_body(1.0, 0.4, 0.1),
            Err(BodyError::InvalidParams(_))
        ));
        assert!(make_two_dir_body(1.0, 1.0, 1.0).is_err());
        assert!(make_two_dir_body(-1.0, 1.0, 0.1).is_err());
        assert!(make_two_dir_body(0.0, 1.0, 0.1).is_err());
        assert!(make_slab_2d_body(1.0, 1.0, 0.3, 0.0).is_err());
        assert!(make_invisible_union(1.0, 0.4, 0.1).is_err());
    }

    #[test]
    fn union_spacing() {
        let spec = BodySpec::new(1.0, 1.0, 0.6, BodyKind::InvisibleUnion).unwrap();
        assert!((spec.h() - 1.5).abs() < 1e-15);
        let u = make_invisible_union(1.0, 1.0, 0.6).unwrap();
        assert_eq!(u.patches.len(), 32);
        assert!(u.contains(Vec3::new(0.8, 0.0, 0.0)));
        assert!(u.contains(Vec3::new(0.8, -1.5, 0.0)));
        assert!(u.contains(Vec3::new(-0.8, -1.5, -1.5)));
        assert!(u.contains(Vec3::new(0.8, 0.0, -1.5)));
        assert!(!u.contains(Vec3::new(0.65, -0.75, 0.0)));
        let (lo, hi) = u.bbox.unwrap();
        assert!((lo - Vec3::new(-1.0, -2.25, -2.25)).norm() < 1e-15);
        assert!((hi - Vec3::new(1.0, 0.75, 0.75)).norm() < 1e-15);
    }

    #[test]
    fn slab_membership() {
        let s = make_slab_2d_body(1.0, 1.0, 0.3, 1.0).unwrap();
        assert!(s.contains(Vec3::new(0.9, 0.0, 0.4)));
        assert!(!s.contains(Vec3::new(0.9, 0.0, 0.6)));
        assert!(!s.contains(Vec3::new(0.2, 0.0, 0.0)));
    }

    #[test]
    fn transforms() {
        let b = make_two_dir_body(1.0, 1.0, 0.6).unwrap();
        assert_eq!(translate_body(&b, Vec3::ZERO), b);
        let moved = translate_body(&b, Vec3::new(0.0, -1.5, 0.0));
        assert!(moved.contains(Vec3::new(0.8, -1.5, 0.0)));
        assert!(!moved.contains(Vec3::new(0.8, 0.0, 0.0)));

        let slab = make_slab_2d_body(1.0, 1.0, 0.6, 0.2).unwrap();
        let turned = rotate_body_quarter_turn_x(&slab);
        // Thin in z before, thin in y after.
        assert!(slab.contains(Vec3::new(0.8, 0.3, 0.0)));
        assert!(turned.contains(Vec3::new(0.8, 0.0, 0.3)));
        assert!(!turned.contains(Vec3::new(0.8, 0.3, 0.0)));
        let heights: Vec<Axis> = turned
            .patches
            .iter()
            .filter_map(|p| match p.surface {
                crate::geom::Surface::ParabolicCylinder { height, .. } => Some(height),
                _ => None,
            })
            .collect();
        assert_eq!(heights, vec![Axis::Z, Axis::Z]);
    }

    #[test]
    fn exact_volume_formula() {
        let spec = BodySpec::new(1.0, 1.0, 0.6, BodyKind::TwoDir3D).unwrap();
        // Composite Simpson on 2 * (2 g)^2 over [0.6, 1].
        let f = |x: f64| 2.0 * (2.0 * (x * x - 0.25)).powi(2);
        let n = 2000;
        let h = 0.4 / n as f64;
        let mut s = f(0.6) + f(1.0);
        for i in 1..n {
            let x = 0.6 + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        let simpson = s * h / 3.0;
        assert!((two_dir_volume_exact(&spec) - simpson).abs() < 1e-12);
    }

    #[test]
    fn volume_estimates() {
        let opts = McOptions::new(200_000, 11);
        assert_eq!(body_volume(&Body::empty(), &opts), Estimate::exact(0.0));

        let cube = make_cuboid(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0));
        let v = body_volume(&cube, &opts);
        assert_eq!(v.value, 1.0);

        let b = make_two_dir_body(1.0, 1.0, 0.6).unwrap();
        let v = body_volume(&b, &opts);
        let exact = two_dir_volume_exact(&b.spec.unwrap());
        assert!(v.within_sigmas(exact, 3.0), "{v:?} vs {exact}");
    }

    #[test]
    fn wedge_is_bounded() {
        let w = make_wedge(0.02, 1.0);
        assert_eq!(w.patches.len(), 2);
        assert!(w.bbox.is_some());
    }
}
