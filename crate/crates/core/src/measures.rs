//! Samplers for the flux measure on incoming boundary states and for the
//! fixed-direction cross-section of the container.
//!
//! For a fixed direction `v` the incoming boundary `{xi : n(xi) . v <= 0}` is
//! the graph of `f_minus` over the shadow domain `omega` (the projection of the
//! container onto the plane orthogonal to `v`), and the flux measure
//! `(-n . v) dxi` becomes plain area on `omega`.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::geom::{AmbientBody, Axis, UnitVec3, Vec3};

/// A boundary state `(xi, v)` with `n(xi) . v <= 0` drawn from the flux measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuMinusSample {
    pub xi: Vec3,
    pub v: UnitVec3,
    /// Total mass of the measure, `|boundary| * pi`; a Monte Carlo mean times
    /// this weight estimates the integral.
    pub weight: f64,
}

/// Shirley–Chiu concentric map of the unit square onto the unit disk.
pub fn concentric_disk(u1: f64, u2: f64) -> (f64, f64) {
    let (a, b) = (2.0 * u1 - 1.0, 2.0 * u2 - 1.0);
    if a == 0.0 && b == 0.0 {
        return (0.0, 0.0);
    }
    let (r, phi) = if a.abs() > b.abs() {
        (a, FRAC_PI_4 * (b / a))
    } else {
        (b, 2.0 * FRAC_PI_4 - FRAC_PI_4 * (a / b))
    };
    (r * phi.cos(), r * phi.sin())
}

/// Direction with density `cos(theta) / pi` about `axis`.
pub fn cosine_weighted(axis: UnitVec3, u1: f64, u2: f64) -> UnitVec3 {
    let (dx, dy) = concentric_disk(u1, u2);
    let dz = (1.0 - dx * dx - dy * dy).max(0.0).sqrt();
    let (t, s) = axis.orthonormal_basis();
    UnitVec3::new(*t * dx + *s * dy + *axis * dz).expect("unit by construction")
}

pub fn sample_mu_minus<R: Rng + ?Sized>(c: &AmbientBody, rng: &mut R) -> MuMinusSample {
    let xi = match *c {
        AmbientBody::Sphere { center, radius } => {
            let z = 2.0 * rng.random::<f64>() - 1.0;
            let phi = 2.0 * PI * rng.random::<f64>();
            let r = (1.0 - z * z).max(0.0).sqrt();
            center + Vec3::new(r * phi.cos(), r * phi.sin(), z) * radius
        }
        AmbientBody::Box { min, max } => {
            let e = max - min;
            let areas = [e.y * e.z, e.z * e.x, e.x * e.y];
            let total = 2.0 * (areas[0] + areas[1] + areas[2]);
            let mut pick = rng.random::<f64>() * total;
            let mut face = 5;
            for k in 0..6 {
                let a = areas[k / 2];
                if pick < a {
                    face = k;
                    break;
                }
                pick -= a;
            }
            let axis = Axis::from_index(face / 2);
            let value = if face % 2 == 0 { max[axis] } else { min[axis] };
            let mut p = min
                + Vec3::new(
                    e.x * rng.random::<f64>(),
                    e.y * rng.random::<f64>(),
                    e.z * rng.random::<f64>(),
                );
            p = p.with(axis, value);
            p
        }
    };
    let inward = -c.normal(xi);
    let v = cosine_weighted(inward, rng.random(), rng.random());
    MuMinusSample {
        xi,
        v,
        weight: c.surface_area() * PI,
    }
}

/// Shadow domain of the container in the plane orthogonal to `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Omega {
    Disk {
        center: (f64, f64),
        radius: f64,
    },
    /// Convex polygon, counter-clockwise.
    Polygon {
        vertices: Vec<(f64, f64)>,
    },
}

impl Omega {
    pub fn area(&self) -> f64 {
        match self {
            Omega::Disk { radius, .. } => PI * radius * radius,
            Omega::Polygon { vertices } => polygon_area(vertices),
        }
    }

    pub fn contains(&self, q: (f64, f64)) -> bool {
        match self {
            Omega::Disk { center, radius } => {
                let (dx, dy) = (q.0 - center.0, q.1 - center.1);
                dx * dx + dy * dy <= radius * radius
            }
            Omega::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    (b.0 - a.0) * (q.1 - a.1) - (b.1 - a.1) * (q.0 - a.0) >= 0.0
                })
            }
        }
    }

    /// `(min, max)` corners of the bounding rectangle.
    pub fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        match self {
            Omega::Disk { center, radius } => (
                (center.0 - radius, center.1 - radius),
                (center.0 + radius, center.1 + radius),
            ),
            Omega::Polygon { vertices } => {
                let mut lo = (f64::INFINITY, f64::INFINITY);
                let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
                for &(x, y) in vertices {
                    lo = (lo.0.min(x), lo.1.min(y));
                    hi = (hi.0.max(x), hi.1.max(y));
                }
                (lo, hi)
            }
        }
    }
}

/// The container seen along `v`: shadow domain and entry/exit heights.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossSection {
    pub v: UnitVec3,
    /// In-plane axes; `(e1, e2, v)` is right-handed orthonormal.
    pub e1: UnitVec3,
    pub e2: UnitVec3,
    pub omega: Omega,
    ambient: AmbientBody,
}

pub fn cross_section(c: &AmbientBody, v: UnitVec3) -> CrossSection {
    let (e1, e2) = v.orthonormal_basis();
    let project = |p: Vec3| (p.dot(*e1), p.dot(*e2));
    let omega = match *c {
        AmbientBody::Sphere { center, radius } => Omega::Disk {
            center: project(center),
            radius,
        },
        AmbientBody::Box { min, max } => {
            let corners: Vec<(f64, f64)> = (0..8)
                .map(|k| {
                    let p = Vec3::new(
                        if k & 1 == 0 { min.x } else { max.x },
                        if k & 2 == 0 { min.y } else { max.y },
                        if k & 4 == 0 { min.z } else { max.z },
                    );
                    project(p)
                })
                .collect();
            Omega::Polygon {
                vertices: convex_hull(corners),
            }
        }
    };
    CrossSection {
        v,
        e1,
        e2,
        omega,
        ambient: *c,
    }
}

impl CrossSection {
    pub fn project(&self, p: Vec3) -> (f64, f64) {
        (p.dot(*self.e1), p.dot(*self.e2))
    }

    fn base_point(&self, q: (f64, f64)) -> Vec3 {
        *self.e1 * q.0 + *self.e2 * q.1
    }

    /// `(f_minus, f_plus)` at `q`, or `None` outside the shadow domain.
    pub fn heights(&self, q: (f64, f64)) -> Option<(f64, f64)> {
        match (&self.omega, self.ambient) {
            (Omega::Disk { center: oc, radius }, AmbientBody::Sphere { center, .. }) => {
                let (dx, dy) = (q.0 - oc.0, q.1 - oc.1);
                let rho2 = dx * dx + dy * dy;
                if rho2 > radius * radius {
                    return None;
                }
                let mid = center.dot(*self.v);
                let half = (radius * radius - rho2).max(0.0).sqrt();
                Some((mid - half, mid + half))
            }
            _ => self.ambient.chord(self.base_point(q), self.v),
        }
    }

    pub fn f_minus(&self, q: (f64, f64)) -> Option<f64> {
        self.heights(q).map(|h| h.0)
    }

    pub fn f_plus(&self, q: (f64, f64)) -> Option<f64> {
        self.heights(q).map(|h| h.1)
    }

    /// Point of the incoming boundary above `q`.
    pub fn lift_minus(&self, q: (f64, f64)) -> Option<Vec3> {
        self.f_minus(q).map(|h| self.base_point(q) + *self.v * h)
    }

    /// Uniform point of the shadow domain.
    pub fn sample_omega<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match &self.omega {
            Omega::Disk { center, radius } => {
                let (x, y) = concentric_disk(rng.random(), rng.random());
                (center.0 + radius * x, center.1 + radius * y)
            }
            Omega::Polygon { .. } => {
                let (lo, hi) = self.omega.bounds();
                loop {
                    let q = (
                        lo.0 + (hi.0 - lo.0) * rng.random::<f64>(),
                        lo.1 + (hi.1 - lo.1) * rng.random::<f64>(),
                    );
                    if self.omega.contains(q) && self.heights(q).is_some() {
                        return q;
                    }
                }
            }
        }
    }
}

/// Uniform point of the shadow domain lifted to the incoming boundary.
pub fn sample_cross_section<R: Rng + ?Sized>(cs: &CrossSection, rng: &mut R) -> Vec3 {
    loop {
        let q = cs.sample_omega(rng);
        if let Some(p) = cs.lift_minus(q) {
            return p;
        }
    }
}

fn polygon_area(v: &[(f64, f64)]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum::<f64>()
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let scale = pts
        .iter()
        .map(|p| p.0.abs().max(p.1.abs()))
        .fold(1.0, f64::max);
    let tol = 1e-12 * scale * scale;
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Clips a convex polygon to an axis-aligned rectangle (Sutherland–Hodgman).
fn clip_to_rect(poly: &[(f64, f64)], lo: (f64, f64), hi: (f64, f64)) -> Vec<(f64, f64)> {
    let mut out = poly.to_vec();
    // (axis, bound, keep_greater)
    let edges = [
        (0, lo.0, true),
        (0, hi.0, false),
        (1, lo.1, true),
        (1, hi.1, false),
    ];
    for (axis, bound, keep_greater) in edges {
        let input = std::mem::take(&mut out);
        let n = input.len();
        let coord = |p: (f64, f64)| if axis == 0 { p.0 } else { p.1 };
        let inside = |p: (f64, f64)| {
            if keep_greater {
                coord(p) >= bound
            } else {
                coord(p) <= bound
            }
        };
        for i in 0..n {
            let (a, b) = (input[i], input[(i + 1) % n]);
            let (ia, ib) = (inside(a), inside(b));
            if ia {
                out.push(a);
            }
            if ia != ib {
                let s = (bound - coord(a)) / (coord(b) - coord(a));
                out.push((a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1)));
            }
        }
        if out.is_empty() {
            break;
        }
    }
    out
}

/// Pearson goodness-of-fit result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
    pub samples: u64,
}

impl ChiSquareTest {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// Side length of the bin grid used for uniformity tests on the shadow domain.
pub const UNIFORMITY_GRID: usize = 32;

/// Chi-square test that `points` are uniform on the shadow domain.
///
/// Disks use `GRID x GRID` equal-area polar bins (`rho^2` and angle); polygons
/// use a square grid with exact clipped cell areas, pooling cells expecting
/// fewer than 5 points.
pub fn omega_uniformity(omega: &Omega, points: &[(f64, f64)]) -> ChiSquareTest {
    let n = points.len() as f64;
    let g = UNIFORMITY_GRID;
    let mut counts = vec![0u64; g * g];
    let mut expected = vec![0.0f64; g * g];
    match omega {
        Omega::Disk { center, radius } => {
            for &(x, y) in points {
                let (dx, dy) = (x - center.0, y - center.1);
                let s = ((dx * dx + dy * dy) / (radius * radius)).min(1.0);
                let a = (dy.atan2(dx) + PI) / (2.0 * PI);
                let i = ((s * g as f64) as usize).min(g - 1);
                let j = ((a * g as f64) as usize).min(g - 1);
                counts[i * g + j] += 1;
            }
            expected.iter_mut().for_each(|e| *e = n / (g * g) as f64);
        }
        Omega::Polygon { vertices } => {
            let (lo, hi) = omega.bounds();
            let (w, h) = ((hi.0 - lo.0) / g as f64, (hi.1 - lo.1) / g as f64);
            let total = omega.area();
            for i in 0..g {
                for j in 0..g {
                    let clo = (lo.0 + i as f64 * w, lo.1 + j as f64 * h);
                    let chi = (clo.0 + w, clo.1 + h);
                    let cell = clip_to_rect(vertices, clo, chi);
                    let area = if cell.len() >= 3 {
                        polygon_area(&cell)
                    } else {
                        0.0
                    };
                    expected[i * g + j] = n * area / total;
                }
            }
            for &(x, y) in points {
                let i = (((x - lo.0) / w) as usize).min(g - 1);
                let j = (((y - lo.1) / h) as usize).min(g - 1);
                counts[i * g + j] += 1;
            }
        }
    }
    chi_square(&counts, &expected, points.len() as u64)
}

fn chi_square(counts: &[u64], expected: &[f64], samples: u64) -> ChiSquareTest {
    let mut statistic = 0.0;
    let mut bins = 0u64;
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (&o, &e) in counts.iter().zip(expected) {
        if e < 5.0 {
            pool_obs += o as f64;
            pool_exp += e;
            continue;
        }
        statistic += (o as f64 - e).powi(2) / e;
        bins += 1;
    }
    if pool_exp >= 5.0 {
        statistic += (pool_obs - pool_exp).powi(2) / pool_exp;
        bins += 1;
    } else if pool_obs > 0.0 && pool_exp == 0.0 {
        statistic = f64::INFINITY;
    }
    let dof = bins.saturating_sub(1).max(1);
    let p_value = if statistic.is_finite() {
        ChiSquared::new(dof as f64)
            .map(|d| d.sf(statistic))
            .unwrap_or(0.0)
    } else {
        0.0
    };
    ChiSquareTest {
        statistic,
        dof,
        p_value,
        samples,
    }
}
