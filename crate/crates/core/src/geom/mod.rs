//! Vector algebra, mirror patches and the convex ambient container.

mod ambient;
mod patch;
mod vector;

pub use ambient::{ambient_exit, AmbientBody, GeomError};
pub use patch::{
    intersect_parabolic_cylinder, intersect_plane, trim_slack, Hit, Patch, PatchHits, Surface,
    TrimConstraint,
};
pub use vector::{reflect, Axis, Ray, UnitVec3, Vec3};

/// Minimum advance along a ray; intersections at `t <= EPS_T` are ignored.
pub const EPS_T: f64 = 1e-9;
/// Tangency threshold on the normalized quadratic discriminant.
pub const EPS_DISC: f64 = 1e-12;
/// `|dir . normal|` below which a ray counts as parallel to a plane.
pub const EPS_PARALLEL: f64 = 1e-12;

/// Rigid motion made of a signed axis permutation followed by a translation:
/// `out[i] = sign[i] * p[src[i]] + shift[i]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    src: [Axis; 3],
    sign: [f64; 3],
    shift: Vec3,
}

impl Isometry {
    pub fn identity() -> Self {
        Self {
            src: [Axis::X, Axis::Y, Axis::Z],
            sign: [1.0; 3],
            shift: Vec3::ZERO,
        }
    }

    pub fn translation(shift: Vec3) -> Self {
        Self {
            shift,
            ..Self::identity()
        }
    }

    /// Rotation by +pi/2 about the x axis: `(x, y, z) -> (x, -z, y)`.
    pub fn quarter_turn_x() -> Self {
        Self {
            src: [Axis::X, Axis::Z, Axis::Y],
            sign: [1.0, -1.0, 1.0],
            shift: Vec3::ZERO,
        }
    }

    /// Swap of the `y` and `z` coordinates (a reflection, not a rotation).
    pub fn swap_yz() -> Self {
        Self {
            src: [Axis::X, Axis::Z, Axis::Y],
            sign: [1.0; 3],
            shift: Vec3::ZERO,
        }
    }

    pub fn apply_linear(&self, p: Vec3) -> Vec3 {
        Vec3::new(
            self.sign[0] * p[self.src[0]],
            self.sign[1] * p[self.src[1]],
            self.sign[2] * p[self.src[2]],
        )
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.apply_linear(p) + self.shift
    }

    /// Where input axis `axis` lands, and with which sign.
    pub fn image_axis(&self, axis: Axis) -> (Axis, f64) {
        let i = self
            .src
            .iter()
            .position(|&a| a == axis)
            .expect("permutation");
        (Axis::from_index(i), self.sign[i])
    }

    pub fn inverse(&self) -> Self {
        let mut src = [Axis::X; 3];
        let mut sign = [1.0; 3];
        for i in 0..3 {
            let j = self.src[i].index();
            src[j] = Axis::from_index(i);
            sign[j] = self.sign[i];
        }
        let linear = Isometry {
            src,
            sign,
            shift: Vec3::ZERO,
        };
        Isometry {
            shift: -linear.apply_linear(self.shift),
            ..linear
        }
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &Isometry) -> Self {
        let mut src = [Axis::X; 3];
        let mut sign = [1.0; 3];
        for i in 0..3 {
            let k = self.src[i].index();
            src[i] = first.src[k];
            sign[i] = self.sign[i] * first.sign[k];
        }
        Isometry {
            src,
            sign,
            shift: self.apply(first.shift),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isometry_inverse_and_composition() {
        let p = Vec3::new(0.3, -1.2, 2.5);
        let t = Isometry::translation(Vec3::new(1.0, -2.0, 0.5));
        let r = Isometry::quarter_turn_x();
        let m = t.after(&r);
        assert_eq!(m.apply(p), t.apply(r.apply(p)));
        assert!((m.inverse().apply(m.apply(p)) - p).norm() < 1e-15);
        assert_eq!(r.apply(Vec3::new(1.0, 2.0, 3.0)), Vec3::new(1.0, -3.0, 2.0));
        let four = r.after(&r).after(&r).after(&r);
        assert_eq!(four, Isometry::identity());
    }

    #[test]
    fn image_axis_follows_quarter_turn() {
        let r = Isometry::quarter_turn_x();
        assert_eq!(r.image_axis(Axis::Y), (Axis::Z, 1.0));
        assert_eq!(r.image_axis(Axis::Z), (Axis::Y, -1.0));
        assert_eq!(r.image_axis(Axis::X), (Axis::X, 1.0));
    }
}
