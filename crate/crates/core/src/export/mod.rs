//! Report, trajectory and mesh writers.

mod json;
mod mesh;
mod svg;
mod trajectory;

pub use json::{to_json_string, write_json};
pub use mesh::{tessellate, write_stl, Mesh, MeshError, DEFAULT_CHORD_TOLERANCE};
pub use svg::{trajectory_svg, Plane, SvgOptions};
pub use trajectory::{segments, write_segments_csv, Segment};
