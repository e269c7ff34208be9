//! Specular billiards through parabolic mirror bodies.
//!
//! Builds bodies with zero resistance (and, as a four-copy union, invisibility)
//! along two orthogonal directions, traces billiard trajectories through them
//! exactly, and estimates the flux-weighted phase-space integrals that rule out
//! invisibility in every direction.

pub mod billiard;
pub mod bodies;
pub mod export;
pub mod geom;
pub mod measures;
pub mod metrics;
pub mod sampling;

pub use billiard::{free_exit, trace, trace_line, TraceLimits, TraceResult, TraceStatus};
pub use bodies::{Body, BodySpec, DESIGN_DIR_Y, DESIGN_DIR_Z};
pub use geom::{AmbientBody, UnitVec3, Vec3};
pub use sampling::{Estimate, McOptions};
