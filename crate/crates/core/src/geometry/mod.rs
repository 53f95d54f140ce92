//! Point-cloud and triangle-mesh types shared by every pipeline stage.
//!
//! Meshes are plain indexed triangle lists (counter-clockwise winding defines
//! the outward normal). Face adjacency is edge-based: two faces are neighbors
//! iff they share an undirected edge, so a triangle has at most three
//! neighbors. All floating computation is in `f64`.

mod adjacency;
mod cloud;
mod mesh;
mod validate;

pub use adjacency::FaceAdjacency;
pub use cloud::PointCloud;
pub use mesh::TriMesh;
pub use validate::MeshDiagnostics;

use thiserror::Error;

/// Tolerance for accepting a stored normal as unit length.
pub const UNIT_NORM_TOL: f64 = 1e-6;

/// Relative cross-product threshold below which a face counts as degenerate
/// (compared against the squared length of the face's longest edge).
pub const DEGENERATE_FACE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("face {face} references vertex {vertex} but mesh has {vertex_count} vertices")]
    FaceOutOfRange {
        face: u32,
        vertex: u32,
        vertex_count: usize,
    },
    #[error("edge ({0}, {1}) is shared by more than two faces")]
    NonManifoldEdge(u32, u32),
    #[error("face {0} has zero area")]
    DegenerateFace(u32),
    #[error("faces {0} and {1} have coincident centroids")]
    CoincidentCentroids(u32, u32),
    #[error("array length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("normal {index} has norm {norm} (must be 1 within {UNIT_NORM_TOL})")]
    NonUnitNormal { index: usize, norm: f64 },
}
