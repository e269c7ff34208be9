//! Trimmed mirror patches and their exact ray intersections.
//!
//! A patch is a carrier surface (parabolic cylinder, plane, or sphere)
//! expressed in a local frame anchored at `origin`, restricted by a list of
//! closed-form trim inequalities evaluated in the same local frame.

use serde::{Deserialize, Serialize};

use super::vector::{Axis, Ray, UnitVec3, Vec3};
use super::{Isometry, EPS_DISC, EPS_T};

/// One inequality of a patch trim, evaluated on local coordinates `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrimConstraint {
    /// `min <= q[axis] <= max`
    Range { axis: Axis, min: f64, max: f64 },
    /// `min <= |q[axis]| <= max`
    AbsRange { axis: Axis, min: f64, max: f64 },
    /// `|q[axis]| <= alpha * q[arg]^2 - c`
    Parabolic {
        axis: Axis,
        arg: Axis,
        alpha: f64,
        c: f64,
    },
}

impl TrimConstraint {
    /// Approximate signed distance to the constraint boundary; `>= 0` inside.
    pub fn slack(&self, q: Vec3) -> f64 {
        match *self {
            TrimConstraint::Range { axis, min, max } => {
                let w = q[axis];
                (w - min).min(max - w)
            }
            TrimConstraint::AbsRange { axis, min, max } => {
                let w = q[axis].abs();
                (w - min).min(max - w)
            }
            TrimConstraint::Parabolic {
                axis,
                arg,
                alpha,
                c,
            } => {
                let u = q[arg];
                let gap = alpha * u * u - c - q[axis].abs();
                gap / (1.0 + 4.0 * alpha * alpha * u * u).sqrt()
            }
        }
    }

    fn transformed(&self, iso: &Isometry) -> TrimConstraint {
        match *self {
            TrimConstraint::Range { axis, min, max } => {
                let (axis, sign) = iso.image_axis(axis);
                if sign > 0.0 {
                    TrimConstraint::Range { axis, min, max }
                } else {
                    TrimConstraint::Range {
                        axis,
                        min: -max,
                        max: -min,
                    }
                }
            }
            TrimConstraint::AbsRange { axis, min, max } => TrimConstraint::AbsRange {
                axis: iso.image_axis(axis).0,
                min,
                max,
            },
            TrimConstraint::Parabolic {
                axis,
                arg,
                alpha,
                c,
            } => TrimConstraint::Parabolic {
                axis: iso.image_axis(axis).0,
                arg: iso.image_axis(arg).0,
                alpha,
                c,
            },
        }
    }
}

/// Minimum slack over a trim; `+inf` for an untrimmed surface.
pub fn trim_slack(trim: &[TrimConstraint], q: Vec3) -> f64 {
    trim.iter()
        .map(|c| c.slack(q))
        .fold(f64::INFINITY, f64::min)
}

/// Carrier surface in local coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Surface {
    /// `q[height] = sign * (alpha * q[arg]^2 - c)`. Material lies on the side
    /// where `sign * q[height] < alpha * q[arg]^2 - c`.
    ParabolicCylinder {
        height: Axis,
        arg: Axis,
        sign: f64,
        alpha: f64,
        c: f64,
    },
    /// Plane through `point` with outward unit `normal`.
    Plane { point: Vec3, normal: UnitVec3 },
    /// Sphere of `radius` centered at the local origin, normal pointing out.
    Sphere { radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub surface: Surface,
    /// World position of the local frame origin.
    pub origin: Vec3,
    pub trim: Vec<TrimConstraint>,
}

/// A ray/patch intersection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub point: Vec3,
    /// Unit normal pointing away from the body material.
    pub normal: UnitVec3,
    /// Signed distance from the hit to the trim boundary (negative: just outside).
    pub edge_distance: f64,
    /// The ray touches the carrier tangentially (double root).
    pub tangent: bool,
}

/// All intersections of a ray with one patch, sorted by `t`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PatchHits {
    pub hits: Vec<Hit>,
    /// The ray runs inside the carrier surface (parallel plane containing the
    /// origin, or a ruling line of a cylinder).
    pub grazing: bool,
}

impl Patch {
    pub fn parabolic(
        height: Axis,
        arg: Axis,
        sign: f64,
        alpha: f64,
        trim: Vec<TrimConstraint>,
    ) -> Patch {
        Patch {
            surface: Surface::ParabolicCylinder {
                height,
                arg,
                sign,
                alpha,
                c: 1.0 / (4.0 * alpha),
            },
            origin: Vec3::ZERO,
            trim,
        }
    }

    pub fn plane(point: Vec3, normal: UnitVec3, trim: Vec<TrimConstraint>) -> Patch {
        Patch {
            surface: Surface::Plane { point, normal },
            origin: Vec3::ZERO,
            trim,
        }
    }

    pub fn sphere(center: Vec3, radius: f64) -> Patch {
        Patch {
            surface: Surface::Sphere { radius },
            origin: center,
            trim: Vec::new(),
        }
    }

    /// Outward normal at a point of the carrier surface.
    pub fn normal_at(&self, p: Vec3) -> UnitVec3 {
        let q = p - self.origin;
        match self.surface {
            Surface::ParabolicCylinder {
                height,
                arg,
                sign,
                alpha,
                ..
            } => {
                let n = Vec3::ZERO
                    .with(arg, -2.0 * alpha * q[arg])
                    .with(height, sign);
                n.normalize().expect("parabolic normal is never zero")
            }
            Surface::Plane { normal, .. } => normal,
            Surface::Sphere { .. } => q.normalize().unwrap_or(UnitVec3::Z),
        }
    }

    /// Residual of the carrier-surface equation at `p` (zero on the surface).
    pub fn surface_residual(&self, p: Vec3) -> f64 {
        let q = p - self.origin;
        match self.surface {
            Surface::ParabolicCylinder {
                height,
                arg,
                sign,
                alpha,
                c,
            } => q[height] - sign * (alpha * q[arg] * q[arg] - c),
            Surface::Plane { point, normal } => (q - point).dot(*normal),
            Surface::Sphere { radius } => q.norm() - radius,
        }
    }

    pub fn trim_slack(&self, p: Vec3) -> f64 {
        trim_slack(&self.trim, p - self.origin)
    }

    /// Intersections with `t > t_min`, keeping candidates whose trim slack is at
    /// least `-margin`. Candidates just outside the trim are kept (with negative
    /// `edge_distance`) so callers can detect near-edge trajectories.
    pub fn intersect_with_margin(&self, ray: &Ray, t_min: f64, margin: f64) -> PatchHits {
        let local = Ray::new(ray.origin - self.origin, ray.dir);
        let (roots, grazing) = match self.surface {
            Surface::ParabolicCylinder {
                height,
                arg,
                sign,
                alpha,
                c,
            } => parabolic_roots(&local, height, arg, sign, alpha, c),
            Surface::Plane { point, normal } => plane_roots(&local, point, normal),
            Surface::Sphere { radius } => sphere_roots(&local, radius),
        };
        let mut hits: Vec<Hit> = roots
            .into_iter()
            .filter(|&(t, _)| t > t_min)
            .filter_map(|(t, tangent)| {
                let point = ray.at(t);
                let edge_distance = self.trim_slack(point);
                (edge_distance >= -margin).then(|| Hit {
                    t,
                    point,
                    normal: self.normal_at(point),
                    edge_distance,
                    tangent,
                })
            })
            .collect();
        hits.sort_by(|a, b| a.t.total_cmp(&b.t));
        let grazing = grazing && self.trim_slack(ray.origin) >= -margin;
        PatchHits { hits, grazing }
    }

    /// Intersections strictly inside the trim with `t > EPS_T`.
    pub fn intersect(&self, ray: &Ray) -> PatchHits {
        self.intersect_with_margin(ray, EPS_T, 0.0)
    }

    pub fn transformed(&self, iso: &Isometry) -> Patch {
        let surface = match self.surface {
            Surface::ParabolicCylinder {
                height,
                arg,
                sign,
                alpha,
                c,
            } => {
                let (height, hs) = iso.image_axis(height);
                Surface::ParabolicCylinder {
                    height,
                    arg: iso.image_axis(arg).0,
                    sign: sign * hs,
                    alpha,
                    c,
                }
            }
            Surface::Plane { point, normal } => Surface::Plane {
                point: iso.apply_linear(point),
                normal: UnitVec3::new_unchecked(iso.apply_linear(*normal)),
            },
            Surface::Sphere { radius } => Surface::Sphere { radius },
        };
        Patch {
            surface,
            origin: iso.apply(self.origin),
            trim: self.trim.iter().map(|c| c.transformed(iso)).collect(),
        }
    }

    /// World-space bounding box, or `None` if the trim leaves the patch unbounded.
    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let mut lo = [f64::NEG_INFINITY; 3];
        let mut hi = [f64::INFINITY; 3];
        for axis in Axis::ALL {
            let (a, b) = axis_bounds(&self.trim, axis);
            lo[axis.index()] = a;
            hi[axis.index()] = b;
        }
        match self.surface {
            Surface::ParabolicCylinder {
                height,
                arg,
                sign,
                alpha,
                c,
            } => {
                let (ua, ub) = (lo[arg.index()], hi[arg.index()]);
                let sq_max = (ua * ua).max(ub * ub);
                let sq_min = if ua <= 0.0 && ub >= 0.0 {
                    0.0
                } else {
                    (ua * ua).min(ub * ub)
                };
                let (h0, h1) = (sign * (alpha * sq_min - c), sign * (alpha * sq_max - c));
                let h = height.index();
                lo[h] = lo[h].max(h0.min(h1));
                hi[h] = hi[h].min(h0.max(h1));
            }
            Surface::Plane { point, normal } => {
                // Fill one unbounded axis from the plane equation.
                for axis in Axis::ALL {
                    let i = axis.index();
                    if lo[i].is_finite() && hi[i].is_finite() {
                        continue;
                    }
                    let n_axis = normal[axis];
                    if n_axis.abs() < 1e-12 {
                        return None;
                    }
                    let others: Vec<Axis> = Axis::ALL.into_iter().filter(|&a| a != axis).collect();
                    let (a0, a1) = (others[0], others[1]);
                    let mut vmin = f64::INFINITY;
                    let mut vmax = f64::NEG_INFINITY;
                    for &p in &[lo[a0.index()], hi[a0.index()]] {
                        for &r in &[lo[a1.index()], hi[a1.index()]] {
                            // n . (q - point) = 0 solved for q[axis].
                            let v = point[axis]
                                - (normal[a0] * (p - point[a0]) + normal[a1] * (r - point[a1]))
                                    / n_axis;
                            vmin = vmin.min(v);
                            vmax = vmax.max(v);
                        }
                    }
                    lo[i] = lo[i].max(vmin);
                    hi[i] = hi[i].min(vmax);
                }
            }
            Surface::Sphere { radius } => {
                for i in 0..3 {
                    lo[i] = lo[i].max(-radius);
                    hi[i] = hi[i].min(radius);
                }
            }
        }
        let lo = Vec3::from_array(lo);
        let hi = Vec3::from_array(hi);
        if !(lo.is_finite() && hi.is_finite()) {
            return None;
        }
        Some((lo + self.origin, hi + self.origin))
    }
}

/// Bounds a trim places on one local coordinate (infinite if unconstrained).
fn axis_bounds(trim: &[TrimConstraint], axis: Axis) -> (f64, f64) {
    let direct = |ax: Axis| {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for c in trim {
            match *c {
                TrimConstraint::Range { axis: a, min, max } if a == ax => {
                    lo = lo.max(min);
                    hi = hi.min(max);
                }
                TrimConstraint::AbsRange { axis: a, max, .. } if a == ax => {
                    lo = lo.max(-max);
                    hi = hi.min(max);
                }
                _ => {}
            }
        }
        (lo, hi)
    };
    let (mut lo, mut hi) = direct(axis);
    for c in trim {
        if let TrimConstraint::Parabolic {
            axis: a,
            arg,
            alpha,
            c: off,
        } = *c
        {
            if a == axis {
                let (ua, ub) = direct(arg);
                let bound = alpha * (ua * ua).max(ub * ub) - off;
                lo = lo.max(-bound);
                hi = hi.min(bound);
            }
        }
    }
    (lo, hi)
}

type Roots = (Vec<(f64, bool)>, bool);

fn parabolic_roots(ray: &Ray, height: Axis, arg: Axis, sign: f64, alpha: f64, c: f64) -> Roots {
    // alpha u(t)^2 - sign w(t) - c = 0 with u = q_a + t d_a, w = q_h + t d_h.
    let (qa, da) = (ray.origin[arg], ray.dir[arg]);
    let (qh, dh) = (ray.origin[height], ray.dir[height]);
    let a = alpha * da * da;
    let b = 2.0 * alpha * qa * da - sign * dh;
    let cc = alpha * qa * qa - sign * qh - c;
    solve_quadratic(a, b, cc)
}

/// Real roots of `a t^2 + b t + c`, each flagged when it is a (near-)double
/// root; the second value reports an identically vanishing polynomial.
fn solve_quadratic(a: f64, b: f64, c: f64) -> Roots {
    let scale = c.abs().max(b.abs()).max(a.abs());
    if scale == 0.0 {
        return (Vec::new(), true);
    }
    if a == 0.0 || a.abs() < 1e-300 {
        if b == 0.0 || b.abs() < 1e-15 * scale {
            // Constant polynomial: either no solution or the whole line.
            return (Vec::new(), c.abs() <= 1e-15 * scale.max(1.0));
        }
        return (vec![(-c / b, false)], false);
    }
    let disc = b * b - 4.0 * a * c;
    let norm = b * b + (4.0 * a * c).abs();
    if disc.abs() <= EPS_DISC * norm {
        return (vec![(-b / (2.0 * a), true)], false);
    }
    if disc < 0.0 {
        return (Vec::new(), false);
    }
    let q = -0.5 * (b + disc.sqrt().copysign(b));
    let mut roots = vec![(q / a, false)];
    if q != 0.0 {
        roots.push((c / q, false));
    }
    roots.sort_by(|x, y| x.0.total_cmp(&y.0));
    (roots, false)
}

fn plane_roots(ray: &Ray, point: Vec3, normal: UnitVec3) -> Roots {
    let denom = ray.dir.dot(*normal);
    let offset = (point - ray.origin).dot(*normal);
    if denom.abs() < super::EPS_PARALLEL {
        return (Vec::new(), offset.abs() < 1e-12);
    }
    (vec![(offset / denom, false)], false)
}

fn sphere_roots(ray: &Ray, radius: f64) -> Roots {
    let b = ray.origin.dot(*ray.dir);
    let c = ray.origin.norm_squared() - radius * radius;
    solve_quadratic(1.0, 2.0 * b, c)
}

/// Intersections of `ray` with a parabolic-cylinder patch, inside the trim.
pub fn intersect_parabolic_cylinder(ray: &Ray, patch: &Patch) -> PatchHits {
    debug_assert!(matches!(patch.surface, Surface::ParabolicCylinder { .. }));
    patch.intersect(ray)
}

/// Intersection of `ray` with a planar patch, inside the trim.
pub fn intersect_plane(ray: &Ray, patch: &Patch) -> PatchHits {
    debug_assert!(matches!(patch.surface, Surface::Plane { .. }));
    patch.intersect(ray)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn upper_y_patch() -> Patch {
        Patch::parabolic(
            Axis::Y,
            Axis::X,
            1.0,
            1.0,
            vec![
                TrimConstraint::Range {
                    axis: Axis::X,
                    min: 0.6,
                    max: 1.0,
                },
                TrimConstraint::Parabolic {
                    axis: Axis::Z,
                    arg: Axis::X,
                    alpha: 1.0,
                    c: 0.25,
                },
            ],
        )
    }

    #[test]
    fn vertical_ray_hits_upper_parabola() {
        let ray = Ray::new(Vec3::new(0.8, 2.0, 0.2), -UnitVec3::Y);
        let hits = intersect_parabolic_cylinder(&ray, &upper_y_patch());
        assert_eq!(hits.hits.len(), 1);
        let h = hits.hits[0];
        assert!((h.point - Vec3::new(0.8, 0.39, 0.2)).norm() < 1e-12);
        assert!((h.t - 1.61).abs() < 1e-12);
        assert!(!h.tangent);
        // Outward normal points up and towards the axis.
        assert!(h.normal.y > 0.0 && h.normal.x < 0.0);
    }

    #[test]
    fn ray_along_ruling_above_sheet_misses() {
        let ray = Ray::new(Vec3::new(0.8, 2.0, -5.0), UnitVec3::Z);
        let hits = intersect_parabolic_cylinder(&ray, &upper_y_patch());
        assert!(hits.hits.is_empty());
        assert!(!hits.grazing);
    }

    #[test]
    fn focal_line_meets_lower_parabola_at_mirror_point() {
        let lower = Patch::parabolic(
            Axis::Y,
            Axis::X,
            -1.0,
            1.0,
            vec![
                TrimConstraint::Range {
                    axis: Axis::X,
                    min: -1.0,
                    max: -0.6,
                },
                TrimConstraint::Parabolic {
                    axis: Axis::Z,
                    arg: Axis::X,
                    alpha: 1.0,
                    c: 0.25,
                },
            ],
        );
        let dir = Vec3::new(-0.8, -0.6, 0.0).normalize().unwrap();
        let ray = Ray::new(Vec3::new(1.0, 0.75, 0.2), dir);
        let hits = intersect_parabolic_cylinder(&ray, &lower);
        // Central symmetry through the focus: (1, 0.75) maps to (-1, -0.75).
        assert_eq!(hits.hits.len(), 1);
        assert!((hits.hits[0].point - Vec3::new(-1.0, -0.75, 0.2)).norm() < 1e-12);
        assert!((hits.hits[0].t - 2.5).abs() < 1e-12);
        // Outward normal of the lower sheet points down.
        assert!(hits.hits[0].normal.y < 0.0);
    }

    #[test]
    fn tangent_ray_is_flagged() {
        // y = x^2 - 1/4 is tangent to y = -1/4 at x = 0.
        let patch = Patch::parabolic(Axis::Y, Axis::X, 1.0, 1.0, vec![]);
        let ray = Ray::new(Vec3::new(-2.0, -0.25, 0.0), UnitVec3::X);
        let hits = patch.intersect(&ray);
        assert_eq!(hits.hits.len(), 1);
        assert!(hits.hits[0].tangent);
    }

    #[test]
    fn plane_hits() {
        let p = Patch::plane(Vec3::ZERO, UnitVec3::Z, vec![]);
        let ray = Ray::new(Vec3::new(0.0, 0.0, -5.0), UnitVec3::Z);
        let hits = intersect_plane(&ray, &p);
        assert_eq!(hits.hits.len(), 1);
        assert!((hits.hits[0].t - 5.0).abs() < 1e-15);
        assert_eq!(hits.hits[0].point, Vec3::ZERO);

        let parallel = Ray::new(Vec3::new(0.0, 0.0, 1.0), UnitVec3::X);
        let hits = intersect_plane(&parallel, &p);
        assert!(hits.hits.is_empty() && !hits.grazing);
        let inside = Ray::new(Vec3::new(0.0, 0.0, 0.0), UnitVec3::X);
        let hits = intersect_plane(&inside, &p);
        assert!(hits.hits.is_empty() && hits.grazing);

        let face = Patch::plane(
            Vec3::new(1.0, 0.0, 0.0),
            UnitVec3::X,
            vec![
                TrimConstraint::AbsRange {
                    axis: Axis::Y,
                    min: 0.0,
                    max: 0.75,
                },
                TrimConstraint::AbsRange {
                    axis: Axis::Z,
                    min: 0.0,
                    max: 0.75,
                },
            ],
        );
        let ray = Ray::new(Vec3::new(2.0, 0.0, 0.0), -UnitVec3::X);
        let hits = intersect_plane(&ray, &face);
        assert_eq!(hits.hits.len(), 1);
        assert!((hits.hits[0].t - 1.0).abs() < 1e-15);
        assert_eq!(hits.hits[0].point, Vec3::new(1.0, 0.0, 0.0));
        let off = Ray::new(Vec3::new(2.0, 0.8, 0.0), -UnitVec3::X);
        assert!(intersect_plane(&off, &face).hits.is_empty());
    }

    #[test]
    fn sphere_patch_two_roots() {
        let s = Patch::sphere(Vec3::new(0.0, 0.0, 1.0), 1.0);
        let ray = Ray::new(Vec3::new(0.0, 0.0, -3.0), UnitVec3::Z);
        let hits = s.intersect(&ray);
        assert_eq!(hits.hits.len(), 2);
        assert!((hits.hits[0].t - 3.0).abs() < 1e-12);
        assert!((hits.hits[1].t - 5.0).abs() < 1e-12);
        assert!(hits.hits[0].normal.z < 0.0);
    }

    #[test]
    fn quarter_turn_maps_y_patch_to_z_patch() {
        let p = upper_y_patch().transformed(&Isometry::quarter_turn_x());
        match p.surface {
            Surface::ParabolicCylinder {
                height, arg, sign, ..
            } => {
                assert_eq!(height, Axis::Z);
                assert_eq!(arg, Axis::X);
                assert_eq!(sign, 1.0);
            }
            _ => panic!("surface kind changed"),
        }
        // (0.8, 0.39, 0.2) on the original maps to (0.8, -0.2, 0.39).
        let q = Vec3::new(0.8, -0.2, 0.39);
        assert!(p.surface_residual(q).abs() < 1e-15);
        assert!(p.trim_slack(q) > 0.0);
    }

    #[test]
    fn bounds_of_paper_patch() {
        let (lo, hi) = upper_y_patch().bounds().unwrap();
        assert!((lo - Vec3::new(0.6, 0.11, -0.75)).norm() < 1e-12);
        assert!((hi - Vec3::new(1.0, 0.75, 0.75)).norm() < 1e-12);
        let unbounded = Patch::plane(Vec3::ZERO, UnitVec3::Z, vec![]);
        assert!(unbounded.bounds().is_none());
    }
}
