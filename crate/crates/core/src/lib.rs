//! Granulite — geometry processing for aggregate stockpile analysis.
//!
//! The library turns multi-view observations or oriented point clouds of a
//! rock stockpile into per-particle size and shape reports. The pipeline
//! stages are:
//!
//! 1. **sfm** – pinhole projection, two-view triangulation, and bundle
//!    adjustment over synthetic scenes with known pixel correspondences.
//! 2. **recon** – Poisson surface reconstruction on a regular grid: normal
//!    estimation, vector-field splatting, a conjugate-gradient Poisson solve,
//!    and marching-cubes isosurface extraction.
//! 3. **segment** – curvature-constrained breadth-first search that partitions
//!    the stockpile mesh into individual aggregate particles and boundary
//!    faces.
//! 4. **morpho** – per-particle principal dimensions, elongation/flatness,
//!    calibration scaling, and gradation reports.
//!
//! `geometry` holds the shared point-cloud and triangle-mesh types, `io` the
//! PLY/OBJ/scene/label file formats, and `fixtures` deterministic synthetic
//! test scenes (spheres, icospheres, ball piles with ground-truth labels).

pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod morpho;
pub mod recon;
pub mod segment;
pub mod sfm;

pub use geometry::{FaceAdjacency, MeshDiagnostics, PointCloud, TriMesh};
pub use segment::{CriterionParams, FaceLabel, SegmentLabels};
