//! Closed-form membership predicates.

use crate::geom::{Isometry, Patch, Ray, UnitVec3, Vec3};

#[derive(Clone, Debug, PartialEq)]
pub enum Solid {
    Empty,
    /// `|y|, |z| <= alpha x^2 - 1/(4 alpha)`, `gamma <= |x| <= beta`.
    TwoDir {
        alpha: f64,
        beta: f64,
        gamma: f64,
    },
    /// `|y| <= alpha x^2 - 1/(4 alpha)`, `gamma <= |x| <= beta`, `|z| <= half_z`.
    Slab {
        alpha: f64,
        beta: f64,
        gamma: f64,
        half_z: f64,
    },
    Cuboid {
        min: Vec3,
        max: Vec3,
    },
    Ball {
        center: Vec3,
        radius: f64,
    },
    Union(Vec<Solid>),
    /// `inner` placed by `map` (local to world).
    Moved {
        inner: Box<Solid>,
        map: Isometry,
    },
    /// Inside iff a ray from the point crosses the patches an odd number of times.
    Parity,
}

impl Solid {
    pub fn contains(&self, p: Vec3, patches: &[Patch]) -> bool {
        match self {
            Solid::Empty => false,
            Solid::TwoDir { alpha, beta, gamma } => {
                let g = alpha * p.x * p.x - 1.0 / (4.0 * alpha);
                let ax = p.x.abs();
                ax >= *gamma && ax <= *beta && p.y.abs() <= g && p.z.abs() <= g
            }
            Solid::Slab {
                alpha,
                beta,
                gamma,
                half_z,
            } => {
                let g = alpha * p.x * p.x - 1.0 / (4.0 * alpha);
                let ax = p.x.abs();
                ax >= *gamma && ax <= *beta && p.y.abs() <= g && p.z.abs() <= *half_z
            }
            Solid::Cuboid { min, max } => {
                p.x >= min.x
                    && p.x <= max.x
                    && p.y >= min.y
                    && p.y <= max.y
                    && p.z >= min.z
                    && p.z <= max.z
            }
            Solid::Ball { center, radius } => (p - *center).norm_squared() <= radius * radius,
            Solid::Union(parts) => parts.iter().any(|s| s.contains(p, patches)),
            Solid::Moved { inner, map } => inner.contains(map.inverse().apply(p), patches),
            Solid::Parity => parity_inside(p, patches),
        }
    }
}

fn parity_inside(p: Vec3, patches: &[Patch]) -> bool {
    // A fixed direction that is not aligned with any axis or diagonal.
    let dir = UnitVec3::new(Vec3::new(0.5477225575, 0.6324555320, 0.5477225575 + 1e-3))
        .expect("fixed direction");
    let ray = Ray::new(p, dir);
    let crossings: usize = patches
        .iter()
        .map(|patch| patch.intersect_with_margin(&ray, 0.0, 0.0).hits.len())
        .sum();
    crossings % 2 == 1
}
