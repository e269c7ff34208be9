//! Triangle meshes of closed-form bodies and binary STL output.

use std::f64::consts::PI;
use std::io::{self, Write};

use thiserror::Error;

use crate::bodies::{Body, Solid};
use crate::geom::{Isometry, Vec3};

pub const DEFAULT_CHORD_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("chordal tolerance must be positive and finite (got {0})")]
    BadTolerance(f64),
    #[error("body has no closed-form solid; patch-list bodies cannot be meshed")]
    NoSolid,
}

/// Indexed triangle mesh, counter-clockwise seen from outside.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

impl Mesh {
    fn vertex(&mut self, p: Vec3) -> u32 {
        self.vertices.push(p);
        (self.vertices.len() - 1) as u32
    }

    /// Adds a triangle unless two of its corners share an index.
    fn tri(&mut self, a: u32, b: u32, c: u32) {
        if a != b && b != c && a != c {
            self.triangles.push([a, b, c]);
        }
    }

    fn append(&mut self, other: Mesh) {
        let base = self.vertices.len() as u32;
        self.vertices.extend(other.vertices);
        self.triangles
            .extend(other.triangles.into_iter().map(|t| t.map(|i| i + base)));
    }

    fn transformed(mut self, map: &Isometry) -> Mesh {
        for v in &mut self.vertices {
            *v = map.apply(*v);
        }
        let e = |p: Vec3| map.apply_linear(p);
        let det = e(Vec3::new(1.0, 0.0, 0.0))
            .dot(e(Vec3::new(0.0, 1.0, 0.0)).cross(e(Vec3::new(0.0, 0.0, 1.0))));
        if det < 0.0 {
            for t in &mut self.triangles {
                t.swap(1, 2);
            }
        }
        self
    }

    fn corners(&self, t: &[u32; 3]) -> [Vec3; 3] {
        t.map(|i| self.vertices[i as usize])
    }

    /// Enclosed volume by the divergence theorem (sum of signed tetrahedra).
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = self.corners(t);
                a.dot(b.cross(c)) / 6.0
            })
            .sum()
    }

    /// Number of pieces, counting triangles as connected when they share a vertex index.
    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for t in &self.triangles {
            let a = find(&mut parent, t[0] as usize);
            for &j in &t[1..] {
                let b = find(&mut parent, j as usize);
                parent[b] = a;
            }
        }
        let mut used: Vec<usize> = self
            .triangles
            .iter()
            .map(|t| find(&mut parent, t[0] as usize))
            .collect();
        used.sort_unstable();
        used.dedup();
        used.len()
    }

    /// Every directed edge is matched by exactly one opposite edge.
    pub fn is_watertight(&self) -> bool {
        use std::collections::HashMap;
        let mut edges: HashMap<(u32, u32), i32> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edges.entry((a, b)).or_default() += 1;
            }
        }
        edges
            .iter()
            .all(|(&(a, b), &n)| n == 1 && edges.get(&(b, a)) == Some(&1))
    }

    pub fn facet_normal(&self, t: &[u32; 3]) -> Vec3 {
        let [a, b, c] = self.corners(t);
        let n = (b - a).cross(c - a);
        let len = n.norm();
        if len > 0.0 {
            n / len
        } else {
            Vec3::ZERO
        }
    }
}

/// Meshes the body's solid so that curved faces deviate from the true
/// surface by at most `tol`.
pub fn tessellate(body: &Body, tol: f64) -> Result<Mesh, MeshError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(MeshError::BadTolerance(tol));
    }
    solid_mesh(&body.solid, tol)
}

fn solid_mesh(solid: &Solid, tol: f64) -> Result<Mesh, MeshError> {
    Ok(match solid {
        Solid::Empty => Mesh::default(),
        Solid::Parity => return Err(MeshError::NoSolid),
        &Solid::TwoDir { alpha, beta, gamma } => {
            let g = move |x: f64| (alpha * x * x - 0.25 / alpha).max(0.0);
            parabolic_pair(alpha, beta, gamma, tol, g, g)
        }
        &Solid::Slab {
            alpha,
            beta,
            gamma,
            half_z,
        } => {
            let g = move |x: f64| (alpha * x * x - 0.25 / alpha).max(0.0);
            parabolic_pair(alpha, beta, gamma, tol, g, move |_| half_z)
        }
        &Solid::Cuboid { min, max } => {
            let mut m = Mesh::default();
            let rings = [
                ring(&mut m, min.x, (min.y, max.y), (min.z, max.z)),
                ring(&mut m, max.x, (min.y, max.y), (min.z, max.z)),
            ];
            tube(&mut m, &rings);
            m
        }
        &Solid::Ball { center, radius } => ball(center, radius, tol),
        Solid::Union(parts) => {
            let mut m = Mesh::default();
            for p in parts {
                m.append(solid_mesh(p, tol)?);
            }
            m
        }
        Solid::Moved { inner, map } => solid_mesh(inner, tol)?.transformed(map),
    })
}

/// Both halves `x > 0` and `x < 0` of a body with square-ish cross-sections
/// `|y| <= half_y(|x|)`, `|z| <= half_z(|x|)` over `inner <= |x| <= beta`.
fn parabolic_pair(
    alpha: f64,
    beta: f64,
    gamma: f64,
    tol: f64,
    half_y: impl Fn(f64) -> f64,
    half_z: impl Fn(f64) -> f64,
) -> Mesh {
    let inner = gamma.max(0.5 / alpha);
    // A parabola arc of width dx sits at most alpha dx^2 / 8 off its chord.
    let dx_max = (8.0 * tol / alpha).sqrt();
    let n = ((beta - inner) / dx_max).ceil().max(1.0) as usize;
    let xs: Vec<f64> = (0..=n)
        .map(|k| inner + (beta - inner) * k as f64 / n as f64)
        .collect();
    let mut m = Mesh::default();
    for side in [1.0, -1.0] {
        let mut order: Vec<f64> = xs.iter().map(|&x| side * x).collect();
        if side < 0.0 {
            order.reverse();
        }
        let rings: Vec<[u32; 4]> = order
            .iter()
            .map(|&x| {
                let (hy, hz) = (half_y(x.abs()), half_z(x.abs()));
                ring(&mut m, x, (-hy, hy), (-hz, hz))
            })
            .collect();
        tube(&mut m, &rings);
    }
    m
}

/// Rectangle `x = const` with corners ordered counter-clockwise about `+x`.
/// Coincident corners share one vertex.
fn ring(m: &mut Mesh, x: f64, (y0, y1): (f64, f64), (z0, z1): (f64, f64)) -> [u32; 4] {
    let pts = [
        Vec3::new(x, y1, z1),
        Vec3::new(x, y0, z1),
        Vec3::new(x, y0, z0),
        Vec3::new(x, y1, z0),
    ];
    let mut idx = [0u32; 4];
    for k in 0..4 {
        idx[k] = match (0..k).find(|&j| pts[j] == pts[k]) {
            Some(j) => idx[j],
            None => m.vertex(pts[k]),
        };
    }
    idx
}

/// Closed tube through rings ordered by increasing `x`, capped at both ends.
fn tube(m: &mut Mesh, rings: &[[u32; 4]]) {
    for w in rings.windows(2) {
        let (r0, r1) = (w[0], w[1]);
        for j in 0..4 {
            let k = (j + 1) % 4;
            m.tri(r0[j], r0[k], r1[j]);
            m.tri(r0[k], r1[k], r1[j]);
        }
    }
    let (first, last) = (rings[0], rings[rings.len() - 1]);
    m.tri(first[0], first[2], first[1]);
    m.tri(first[0], first[3], first[2]);
    m.tri(last[0], last[1], last[2]);
    m.tri(last[0], last[2], last[3]);
}

/// Latitude-longitude sphere with single-vertex poles.
fn ball(center: Vec3, radius: f64, tol: f64) -> Mesh {
    // Chord over angle a sits radius (1 - cos(a / 2)) off the sphere.
    let max_step = 2.0 * (1.0 - (tol / radius).min(1.0)).acos();
    let n_lat = ((PI / max_step).ceil() as usize).max(2);
    let n_lon = 2 * n_lat;
    let mut m = Mesh::default();
    let north = m.vertex(center + Vec3::new(0.0, 0.0, radius));
    let mut rows = Vec::new();
    for i in 1..n_lat {
        let th = PI * i as f64 / n_lat as f64;
        let row: Vec<u32> = (0..n_lon)
            .map(|j| {
                let ph = 2.0 * PI * j as f64 / n_lon as f64;
                m.vertex(
                    center + Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()) * radius,
                )
            })
            .collect();
        rows.push(row);
    }
    let south = m.vertex(center - Vec3::new(0.0, 0.0, radius));
    for j in 0..n_lon {
        let k = (j + 1) % n_lon;
        m.tri(north, rows[0][j], rows[0][k]);
        for w in rows.windows(2) {
            m.tri(w[0][j], w[1][j], w[1][k]);
            m.tri(w[0][j], w[1][k], w[0][k]);
        }
        let last = &rows[rows.len() - 1];
        m.tri(south, last[k], last[j]);
    }
    m
}

/// Binary STL: 80-byte header, triangle count, then 50 bytes per triangle.
pub fn write_stl<W: Write>(mut w: W, mesh: &Mesh) -> io::Result<()> {
    let mut header = [0u8; 80];
    let tag = b"mirror-billiards mesh";
    header[..tag.len()].copy_from_slice(tag);
    w.write_all(&header)?;
    w.write_all(&(mesh.triangles.len() as u32).to_le_bytes())?;
    for t in &mesh.triangles {
        let n = mesh.facet_normal(t);
        let mut rec = [0u8; 50];
        let mut pos = 0;
        for p in std::iter::once(n).chain(mesh.corners(t)) {
            for c in [p.x, p.y, p.z] {
                rec[pos..pos + 4].copy_from_slice(&(c as f32).to_le_bytes());
                pos += 4;
            }
        }
        w.write_all(&rec)?;
    }
    w.flush()
}
