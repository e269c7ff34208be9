use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::vector::{Ray, UnitVec3, Vec3};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("ray origin {origin} lies outside the ambient body (distance {distance:e})")]
    OutsideAmbient { origin: Vec3, distance: f64 },
    #[error("invalid ambient body: {0}")]
    InvalidAmbient(String),
}

/// Convex container `C` in which entry and exit states are recorded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum AmbientBody {
    Sphere { center: Vec3, radius: f64 },
    Box { min: Vec3, max: Vec3 },
}

/// Relative tolerance for "on the boundary" tests.
const BOUNDARY_TOL: f64 = 1e-9;

impl AmbientBody {
    pub fn sphere(radius: f64) -> Self {
        AmbientBody::Sphere {
            center: Vec3::ZERO,
            radius,
        }
    }

    /// Axis-aligned cube `[-half, half]^3`.
    pub fn cube(half: f64) -> Self {
        AmbientBody::Box {
            min: Vec3::new(-half, -half, -half),
            max: Vec3::new(half, half, half),
        }
    }

    pub fn validate(&self) -> Result<(), GeomError> {
        match *self {
            AmbientBody::Sphere { center, radius } => {
                if !(radius.is_finite() && radius > 0.0 && center.is_finite()) {
                    return Err(GeomError::InvalidAmbient(format!(
                        "sphere radius must be positive and finite, got {radius}"
                    )));
                }
            }
            AmbientBody::Box { min, max } => {
                let ok = min.is_finite()
                    && max.is_finite()
                    && min.x < max.x
                    && min.y < max.y
                    && min.z < max.z;
                if !ok {
                    return Err(GeomError::InvalidAmbient(format!(
                        "box needs min < max on every axis, got {min} .. {max}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Characteristic size, used to scale boundary tolerances.
    pub fn scale(&self) -> f64 {
        match *self {
            AmbientBody::Sphere { radius, .. } => radius.max(1.0),
            AmbientBody::Box { min, max } => (max - min).max_abs().max(1.0),
        }
    }

    pub fn boundary_tolerance(&self) -> f64 {
        BOUNDARY_TOL * self.scale()
    }

    /// Signed distance-like function: negative inside, zero on the boundary.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        match *self {
            AmbientBody::Sphere { center, radius } => (p - center).norm() - radius,
            AmbientBody::Box { min, max } => {
                let d = (min - p).component_max(p - max);
                let outside = d.component_max(Vec3::ZERO).norm();
                let inside = d.x.max(d.y).max(d.z).min(0.0);
                outside + inside
            }
        }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        self.signed_distance(p) <= self.boundary_tolerance()
    }

    pub fn on_boundary(&self, p: Vec3) -> bool {
        self.signed_distance(p).abs() <= self.boundary_tolerance()
    }

    /// Outer unit normal `n(xi)`. For a box the face of greatest penetration
    /// wins; edges and corners are a null set.
    pub fn normal(&self, p: Vec3) -> UnitVec3 {
        match *self {
            AmbientBody::Sphere { center, .. } => (p - center).normalize().unwrap_or(UnitVec3::Z),
            AmbientBody::Box { min, max } => {
                let center = (min + max) * 0.5;
                let half = (max - min) * 0.5;
                let q = p - center;
                let r = [q.x / half.x, q.y / half.y, q.z / half.z];
                let mut best = 0;
                for i in 1..3 {
                    if r[i].abs() > r[best].abs() {
                        best = i;
                    }
                }
                UnitVec3::axis(super::Axis::from_index(best), r[best])
            }
        }
    }

    pub fn volume(&self) -> f64 {
        match *self {
            AmbientBody::Sphere { radius, .. } => 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3),
            AmbientBody::Box { min, max } => {
                let e = max - min;
                e.x * e.y * e.z
            }
        }
    }

    pub fn surface_area(&self) -> f64 {
        match *self {
            AmbientBody::Sphere { radius, .. } => 4.0 * std::f64::consts::PI * radius * radius,
            AmbientBody::Box { min, max } => {
                let e = max - min;
                2.0 * (e.x * e.y + e.y * e.z + e.z * e.x)
            }
        }
    }

    /// Line parameters `(t_in, t_out)` where `p + t d` crosses the boundary.
    pub fn chord(&self, p: Vec3, d: UnitVec3) -> Option<(f64, f64)> {
        match *self {
            AmbientBody::Sphere { center, radius } => {
                let oc = p - center;
                let b = oc.dot(*d);
                let c = oc.norm_squared() - radius * radius;
                let disc = b * b - c;
                if disc < 0.0 {
                    return None;
                }
                let s = disc.sqrt();
                // Stable pair of roots of t^2 + 2 b t + c.
                let q = -(b + s.copysign(b));
                if q == 0.0 {
                    return Some((0.0, 0.0));
                }
                let (t0, t1) = (q, c / q);
                Some((t0.min(t1), t0.max(t1)))
            }
            AmbientBody::Box { min, max } => {
                let mut t_in = f64::NEG_INFINITY;
                let mut t_out = f64::INFINITY;
                for axis in super::Axis::ALL {
                    let (o, dir) = (p[axis], d[axis]);
                    let (lo, hi) = (min[axis], max[axis]);
                    if dir == 0.0 {
                        if o < lo || o > hi {
                            return None;
                        }
                        continue;
                    }
                    let (a, b) = ((lo - o) / dir, (hi - o) / dir);
                    t_in = t_in.max(a.min(b));
                    t_out = t_out.min(a.max(b));
                }
                (t_in <= t_out).then_some((t_in, t_out))
            }
        }
    }

    /// Forward exit of a ray that starts inside or on the container.
    pub fn exit(&self, ray: &Ray) -> Result<(Vec3, f64), GeomError> {
        let distance = self.signed_distance(ray.origin);
        if distance > self.boundary_tolerance() {
            return Err(GeomError::OutsideAmbient {
                origin: ray.origin,
                distance,
            });
        }
        let t = match self.chord(ray.origin, ray.dir) {
            Some((_, t_out)) => t_out.max(0.0),
            None => 0.0,
        };
        Ok((ray.at(t), t))
    }

    /// Where the line through `p` with direction `d` enters the container.
    pub fn entry_point(&self, p: Vec3, d: UnitVec3) -> Option<Vec3> {
        self.chord(p, d).map(|(t_in, _)| p + *d * t_in)
    }
}

/// Forward exit point and distance; see [`AmbientBody::exit`].
pub fn ambient_exit(c: &AmbientBody, ray: &Ray) -> Result<(Vec3, f64), GeomError> {
    c.exit(ray)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir(x: f64, y: f64, z: f64) -> UnitVec3 {
        Vec3::new(x, y, z).normalize().unwrap()
    }

    #[test]
    fn sphere_diameter_exit() {
        let c = AmbientBody::sphere(1.0);
        let (p, t) =
            ambient_exit(&c, &Ray::new(Vec3::new(0.0, 1.0, 0.0), dir(0.0, -1.0, 0.0))).unwrap();
        assert!((p - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
        assert!((t - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_center_exit_is_radius() {
        let c = AmbientBody::sphere(1.0);
        for d in [dir(1.0, 2.0, 3.0), dir(-1.0, 0.0, 0.5), dir(0.0, 0.0, -1.0)] {
            let (p, t) = c.exit(&Ray::new(Vec3::ZERO, d)).unwrap();
            assert!((t - 1.0).abs() < 1e-15);
            assert!(c.on_boundary(p));
        }
    }

    #[test]
    fn box_exit() {
        let c = AmbientBody::cube(2.0);
        let (p, t) = c.exit(&Ray::new(Vec3::ZERO, UnitVec3::X)).unwrap();
        assert_eq!(p, Vec3::new(2.0, 0.0, 0.0));
        assert_eq!(t, 2.0);
    }

    #[test]
    fn outside_origin_is_rejected() {
        let c = AmbientBody::sphere(1.0);
        let err = c
            .exit(&Ray::new(Vec3::new(0.0, 2.0, 0.0), UnitVec3::Y))
            .unwrap_err();
        assert!(matches!(err, GeomError::OutsideAmbient { .. }));
        let b = AmbientBody::cube(1.0);
        assert!(b
            .exit(&Ray::new(Vec3::new(1.5, 0.0, 0.0), UnitVec3::X))
            .is_err());
    }

    #[test]
    fn box_normals_and_measures() {
        let b = AmbientBody::cube(1.0);
        assert_eq!(
            b.normal(Vec3::new(1.0, 0.2, -0.3)).get(),
            Vec3::new(1.0, 0.0, 0.0)
        );
        assert_eq!(
            b.normal(Vec3::new(0.1, 0.2, -1.0)).get(),
            Vec3::new(0.0, 0.0, -1.0)
        );
        assert_eq!(b.volume(), 8.0);
        assert_eq!(b.surface_area(), 24.0);
        assert!(b.on_boundary(Vec3::new(0.3, 1.0, 0.0)));
        assert!(!b.on_boundary(Vec3::new(0.3, 0.9, 0.0)));
    }

    #[test]
    fn entry_point_backtracks_to_boundary() {
        let c = AmbientBody::sphere(3.0);
        let p = c
            .entry_point(Vec3::new(0.8, 0.0, 0.2), dir(0.0, -1.0, 0.0))
            .unwrap();
        assert!(c.on_boundary(p));
        assert!(p.y > 0.0);
        assert_eq!(p.x, 0.8);
    }
}
