//! Plain `f64` vector algebra in three dimensions.

use std::fmt;
use std::ops::{Add, AddAssign, Deref, Div, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Coordinate axis tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        match i {
            0 => Axis::X,
            1 => Axis::Y,
            2 => Axis::Z,
            _ => panic!("axis index out of range: {i}"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s {
            "x" => Some(Axis::X),
            "y" => Some(Axis::Y),
            "z" => Some(Axis::Z),
            _ => None,
        }
    }

    /// The axis that is neither `self` nor `other`.
    pub fn third(self, other: Axis) -> Axis {
        debug_assert_ne!(self, other);
        Axis::from_index(3 - self.index() - other.index())
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn normalize(self) -> Option<UnitVec3> {
        UnitVec3::new(self)
    }

    #[inline]
    pub fn get(self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    #[inline]
    pub fn with(mut self, axis: Axis, value: f64) -> Vec3 {
        match axis {
            Axis::X => self.x = value,
            Axis::Y => self.y = value,
            Axis::Z => self.z = value,
        }
        self
    }

    pub fn component_min(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn component_max(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    /// Component of `self` orthogonal to the unit vector `u`.
    pub fn reject(self, u: UnitVec3) -> Vec3 {
        self - *u * self.dot(*u)
    }
}

impl Index<Axis> for Vec3 {
    type Output = f64;
    fn index(&self, axis: Axis) -> &f64 {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A direction on the unit sphere.
///
/// Constructed only through [`UnitVec3::new`] (which normalizes) or from
/// operations that preserve the norm, such as [`reflect`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnitVec3(Vec3);

impl UnitVec3 {
    pub const X: UnitVec3 = UnitVec3(Vec3::new(1.0, 0.0, 0.0));
    pub const Y: UnitVec3 = UnitVec3(Vec3::new(0.0, 1.0, 0.0));
    pub const Z: UnitVec3 = UnitVec3(Vec3::new(0.0, 0.0, 1.0));

    /// Normalizes `v`; `None` for zero or non-finite input.
    pub fn new(v: Vec3) -> Option<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return None;
        }
        Some(UnitVec3(v / n))
    }

    /// Wraps a vector the caller knows to be unit length.
    pub const fn new_unchecked(v: Vec3) -> Self {
        UnitVec3(v)
    }

    pub fn axis(axis: Axis, sign: f64) -> Self {
        UnitVec3(Vec3::ZERO.with(axis, sign.signum()))
    }

    #[inline]
    pub fn get(self) -> Vec3 {
        self.0
    }

    /// Two unit vectors completing `self` to a right-handed orthonormal frame.
    pub fn orthonormal_basis(self) -> (UnitVec3, UnitVec3) {
        // Frisvad / Duff et al. branchless construction.
        let n = self.0;
        let sign = 1.0f64.copysign(n.z);
        let a = -1.0 / (sign + n.z);
        let b = n.x * n.y * a;
        let t = Vec3::new(1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x);
        let s = Vec3::new(b, sign + n.y * n.y * a, -n.y);
        (UnitVec3(t), UnitVec3(s))
    }
}

impl Deref for UnitVec3 {
    type Target = Vec3;
    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

impl Neg for UnitVec3 {
    type Output = UnitVec3;
    fn neg(self) -> UnitVec3 {
        UnitVec3(-self.0)
    }
}

impl<'de> Deserialize<'de> for UnitVec3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec3::deserialize(d)?;
        UnitVec3::new(v).ok_or_else(|| serde::de::Error::custom("direction must be non-zero"))
    }
}

/// Specular reflection `v - 2 (v . n) n`.
#[inline]
pub fn reflect(v: UnitVec3, n: UnitVec3) -> UnitVec3 {
    UnitVec3(v.0 - n.0 * (2.0 * v.0.dot(n.0)))
}

/// Half-line `origin + t * dir`, `t >= 0`. Since `dir` is unit, `t` is a distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    pub dir: UnitVec3,
}

impl Ray {
    pub fn new(origin: Vec3, dir: UnitVec3) -> Self {
        Self { origin, dir }
    }

    #[inline]
    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + *self.dir * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflect_normal_incidence() {
        let v = UnitVec3::new(Vec3::new(0.0, 0.0, -1.0)).unwrap();
        let r = reflect(v, UnitVec3::Z);
        assert_eq!(r.get(), Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn reflect_oblique_mirror_symmetry() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = UnitVec3::new(Vec3::new(h, 0.0, -h)).unwrap();
        let r = reflect(v, UnitVec3::Z);
        assert!((r.get() - Vec3::new(h, 0.0, h)).norm() < 1e-15);
    }

    #[test]
    fn reflect_off_parabola_passes_through_focus() {
        // Parabola y = x^2 - 1/4 at x = 1, outward normal (-2, 1)/sqrt(5).
        let v = UnitVec3::new(Vec3::new(0.0, -1.0, 0.0)).unwrap();
        let n = UnitVec3::new(Vec3::new(-2.0, 1.0, 0.0)).unwrap();
        let r = reflect(v, n);
        assert!((r.get() - Vec3::new(-0.8, -0.6, 0.0)).norm() < 1e-15);
        // The reflected line from (1, 3/4) reaches the focus (0, 0) at t = 5/4.
        let at_focus = Vec3::new(1.0, 0.75, 0.0) + r.get() * 1.25;
        assert!(at_focus.norm() < 1e-15);
    }

    #[test]
    fn basis_is_orthonormal() {
        for v in [
            Vec3::new(0.0, 0.0, -1.0),
            Vec3::new(0.0, -1.0, 0.0),
            Vec3::new(1.0, 2.0, 3.0),
            Vec3::new(-0.3, 0.1, -0.9),
        ] {
            let n = v.normalize().unwrap();
            let (a, b) = n.orthonormal_basis();
            assert!((a.norm() - 1.0).abs() < 1e-14);
            assert!((b.norm() - 1.0).abs() < 1e-14);
            assert!(a.dot(*b).abs() < 1e-14);
            assert!(a.dot(*n).abs() < 1e-14);
            assert!((a.cross(*b) - *n).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_vector_is_not_a_direction() {
        assert!(Vec3::ZERO.normalize().is_none());
        assert!(Vec3::new(f64::NAN, 0.0, 1.0).normalize().is_none());
    }
}
