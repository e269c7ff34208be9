//! Specular billiard trajectories inside the ambient container.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bodies::Body;
use crate::geom::{reflect, AmbientBody, GeomError, Hit, Ray, UnitVec3, Vec3, EPS_T};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceStatus {
    Exited,
    /// More than `max_bounces` reflections.
    Trapped,
    /// Touched a patch edge, grazed a surface, or hit it tangentially.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceLimits {
    pub max_bounces: usize,
    /// Minimum advance after a reflection.
    pub eps_t: f64,
    /// Hits closer than this to a trim boundary are degenerate.
    pub eps_edge: f64,
    /// Keep the reflection points in [`TraceResult::polyline`].
    pub record_path: bool,
}

impl Default for TraceLimits {
    fn default() -> Self {
        Self {
            max_bounces: 64,
            eps_t: EPS_T,
            eps_edge: 1e-9,
            record_path: false,
        }
    }
}

impl TraceLimits {
    pub fn recording() -> Self {
        Self {
            record_path: true,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceResult {
    /// Exit point on the container boundary (last position reached otherwise).
    pub exit_point: Vec3,
    pub exit_velocity: UnitVec3,
    /// Length of the trajectory inside the container.
    pub path_length: f64,
    pub bounces: usize,
    pub status: TraceStatus,
    /// Entry point, reflection points and final point, when recorded.
    pub polyline: Option<Vec<Vec3>>,
}

impl TraceResult {
    pub fn is_exited(&self) -> bool {
        self.status == TraceStatus::Exited
    }
}

fn check_entry(c: &AmbientBody, xi: Vec3, v: UnitVec3) -> Result<(), TraceError> {
    if !c.on_boundary(xi) {
        return Err(TraceError::PreconditionViolation(format!(
            "start point {xi} is not on the container boundary (distance {:e})",
            c.signed_distance(xi)
        )));
    }
    let nv = c.normal(xi).dot(*v);
    if nv > 1e-9 {
        return Err(TraceError::PreconditionViolation(format!(
            "velocity points out of the container (n . v = {nv:e})"
        )));
    }
    Ok(())
}

/// Nearest candidate hit over all patches, and whether any patch was grazed.
fn nearest_hit(body: &Body, ray: &Ray, t_max: f64, limits: &TraceLimits) -> (Option<Hit>, bool) {
    let mut best: Option<Hit> = None;
    let mut grazing = false;
    for patch in &body.patches {
        let hits = patch.intersect_with_margin(ray, limits.eps_t, limits.eps_edge);
        grazing |= hits.grazing;
        if let Some(h) = hits.hits.first() {
            if h.t <= t_max && best.is_none_or(|b| h.t < b.t) {
                best = Some(*h);
            }
        }
    }
    (best, grazing)
}

/// Follows the particle entering the container at `xi` with velocity `v`
/// until it leaves, gets trapped, or meets a degenerate configuration.
pub fn trace(
    body: &Body,
    c: &AmbientBody,
    xi: Vec3,
    v: UnitVec3,
    limits: &TraceLimits,
) -> Result<TraceResult, TraceError> {
    check_entry(c, xi, v)?;
    let mut pos = xi;
    let mut dir = v;
    let mut tau = 0.0;
    let mut bounces = 0;
    let mut path = limits.record_path.then(|| vec![xi]);

    let finish = |pos: Vec3, dir, tau, bounces, status, mut path: Option<Vec<Vec3>>| {
        if let Some(p) = path.as_mut() {
            if p.last() != Some(&pos) {
                p.push(pos);
            }
        }
        TraceResult {
            exit_point: pos,
            exit_velocity: dir,
            path_length: tau,
            bounces,
            status,
            polyline: path,
        }
    };

    loop {
        let ray = Ray::new(pos, dir);
        let (exit_point, t_exit) = c.exit(&ray)?;
        let (hit, grazing) = nearest_hit(body, &ray, t_exit, limits);
        if grazing {
            return Ok(finish(
                pos,
                dir,
                tau,
                bounces,
                TraceStatus::Degenerate,
                path,
            ));
        }
        let Some(hit) = hit else {
            tau += (exit_point - pos).norm();
            return Ok(finish(
                exit_point,
                dir,
                tau,
                bounces,
                TraceStatus::Exited,
                path,
            ));
        };
        tau += (hit.point - pos).norm();
        if hit.tangent || hit.edge_distance < limits.eps_edge {
            return Ok(finish(
                hit.point,
                dir,
                tau,
                bounces,
                TraceStatus::Degenerate,
                path,
            ));
        }
        bounces += 1;
        pos = hit.point;
        dir = reflect(dir, hit.normal);
        if let Some(p) = path.as_mut() {
            p.push(pos);
        }
        if bounces > limits.max_bounces {
            return Ok(finish(pos, dir, tau, bounces, TraceStatus::Trapped, path));
        }
    }
}

/// Straight-line exit for the empty body: `(xi0_plus, tau0)`.
pub fn free_exit(c: &AmbientBody, xi: Vec3, v: UnitVec3) -> Result<(Vec3, f64), TraceError> {
    check_entry(c, xi, v)?;
    let (p, _) = c.exit(&Ray::new(xi, v))?;
    Ok((p, (p - xi).norm()))
}

/// Traces the line through `through` with direction `v`, starting where it
/// enters the container.
pub fn trace_line(
    body: &Body,
    c: &AmbientBody,
    through: Vec3,
    v: UnitVec3,
    limits: &TraceLimits,
) -> Result<TraceResult, TraceError> {
    let xi = c.entry_point(through, v).ok_or_else(|| {
        TraceError::PreconditionViolation(format!("line through {through} misses the container"))
    })?;
    trace(body, c, xi, v, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{make_ball, make_two_dir_body, make_wedge, DESIGN_DIR_Y};

    fn down() -> UnitVec3 {
        DESIGN_DIR_Y
    }

    #[test]
    fn empty_body_diameter() {
        let c = AmbientBody::sphere(1.0);
        let r = trace(
            &Body::empty(),
            &c,
            Vec3::new(0.0, 1.0, 0.0),
            down(),
            &TraceLimits::default(),
        )
        .unwrap();
        assert_eq!(r.status, TraceStatus::Exited);
        assert!((r.exit_point - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
        assert!((r.path_length - 2.0).abs() < 1e-15);
        assert_eq!(r.bounces, 0);
        assert_eq!(r.exit_velocity, down());
    }

    #[test]
    fn free_exit_chords() {
        let c = AmbientBody::sphere(1.0);
        let (p, t) = free_exit(&c, Vec3::new(0.0, 1.0, 0.0), down()).unwrap();
        assert!((p - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-15 && (t - 2.0).abs() < 1e-15);
        let (p, t) = free_exit(&c, Vec3::new(0.0, 1.0, 0.0), UnitVec3::X).unwrap();
        assert_eq!(t, 0.0);
        assert_eq!(p, Vec3::new(0.0, 1.0, 0.0));
        for theta in [0.1f64, 0.7, 1.2] {
            let xi = Vec3::new(theta.sin(), theta.cos(), 0.0);
            let (_, t) = free_exit(&c, xi, down()).unwrap();
            assert!((t - 2.0 * theta.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn two_reflections_through_the_focus() {
        let body = make_two_dir_body(1.0, 1.0, 0.6).unwrap();
        let c = AmbientBody::sphere(3.0);
        let r = trace_line(
            &body,
            &c,
            Vec3::new(0.8, 0.0, 0.2),
            down(),
            &TraceLimits::recording(),
        )
        .unwrap();
        assert_eq!(r.status, TraceStatus::Exited);
        assert_eq!(r.bounces, 2);
        assert!((r.exit_velocity.get() - *down()).norm() < 1e-9);
        let path = r.polyline.unwrap();
        assert!((path[1] - Vec3::new(0.8, 0.39, 0.2)).norm() < 1e-12);
        assert!((path[2] - Vec3::new(-0.8, -0.39, 0.2)).norm() < 1e-12);
        assert!((r.exit_point.x + 0.8).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_start() {
        let c = AmbientBody::sphere(1.0);
        let e = trace(
            &Body::empty(),
            &c,
            Vec3::new(0.0, 0.5, 0.0),
            down(),
            &TraceLimits::default(),
        );
        assert!(matches!(e, Err(TraceError::PreconditionViolation(_))));
        let e = trace(
            &Body::empty(),
            &c,
            Vec3::new(0.0, -1.0, 0.0),
            down(),
            &TraceLimits::default(),
        );
        assert!(matches!(e, Err(TraceError::PreconditionViolation(_))));
    }

    #[test]
    fn wedge_traps_within_limit() {
        let body = make_wedge(0.02, 1.0);
        let c = AmbientBody::sphere(3.0);
        let r = trace_line(
            &body,
            &c,
            Vec3::new(0.003, 0.5, 0.0),
            down(),
            &TraceLimits::default(),
        )
        .unwrap();
        assert_eq!(r.status, TraceStatus::Trapped);
        assert_eq!(r.bounces, 65);
    }

    #[test]
    fn ball_reflects_back_on_axis() {
        let body = make_ball(Vec3::ZERO, 1.0);
        let c = AmbientBody::sphere(3.0);
        let r = trace_line(&body, &c, Vec3::ZERO, down(), &TraceLimits::default()).unwrap();
        assert_eq!(r.bounces, 1);
        assert!((r.exit_velocity.get() - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        assert!((r.path_length - 4.0).abs() < 1e-12);
    }
}
