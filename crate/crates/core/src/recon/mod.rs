//! Poisson surface reconstruction of an oriented point cloud on a regular
//! grid.
//!
//! The splatted normal field V approximates the gradient of the solid's
//! (smoothed) indicator function, so the indicator is recovered by solving
//! the Poisson equation `lap(chi) = div(V)` with a 7-point Laplacian,
//! zero-Dirichlet boundary, and conjugate gradients. The surface is the
//! iso-level of chi at the mean value interpolated at the input samples,
//! extracted with marching cubes.

mod grid;
mod marching;
mod mc_tables;
mod normals;
mod poisson;
mod splat;

pub use grid::{GridLayout, ScalarGrid, VectorGrid};
pub use marching::extract_isosurface;
pub use normals::{estimate_normals, SpatialHash};
pub use poisson::{apply_laplacian, divergence, solve_poisson, solve_poisson_rhs, PoissonOpts,
    PoissonReport};
pub use splat::{layout_for_cloud, splat_into, splat_vector_field};

use thiserror::Error;

use crate::geometry::{PointCloud, TriMesh};

#[derive(Debug, Error, PartialEq)]
pub enum ReconError {
    #[error("cloud has {got} points, need at least {need}")]
    TooFewPoints { got: usize, need: usize },
    #[error("neighbor count {0} is below the minimum of 3")]
    InvalidNeighborCount(usize),
    #[error("neighborhood of point {0} is rank-deficient (collinear or coincident points)")]
    DegenerateNeighborhood(u32),
    #[error("cloud has no normals")]
    MissingNormals,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("the iso level is never crossed")]
    EmptySurface,
    #[error("Poisson solve did not converge after {iterations} iterations (residual {relative_residual:.3e})")]
    NoConvergence {
        iterations: usize,
        relative_residual: f64,
    },
}

/// Parameters for [`reconstruct_surface`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconParams {
    /// Grid cells along the longest bounding-box axis, padding included.
    pub resolution: usize,
    /// Empty cells added around the cloud on every side.
    pub padding: usize,
    /// Relative residual tolerance of the conjugate-gradient solve.
    pub cg_tolerance: f64,
    /// Optional CG iteration cap (defaults to 10x the unknown count).
    pub cg_max_iterations: Option<usize>,
    /// Jacobi preconditioning flag, forwarded to the solver.
    pub jacobi: bool,
    /// Neighbor count for normal estimation when the cloud has no normals.
    pub normal_neighbors: usize,
}

impl Default for ReconParams {
    fn default() -> Self {
        Self {
            resolution: 64,
            padding: 4,
            cg_tolerance: 1e-8,
            cg_max_iterations: None,
            jacobi: false,
            normal_neighbors: 12,
        }
    }
}

/// Reconstruct a watertight triangle mesh from a point cloud.
///
/// Normals are estimated (outward from the centroid) when absent. The
/// pipeline is splat -> Poisson solve -> iso-level centering at the input
/// samples -> marching cubes, and is deterministic for identical inputs.
pub fn reconstruct_surface(cloud: &PointCloud, params: &ReconParams) -> Result<TriMesh, ReconError> {
    reconstruct_surface_with_grid(cloud, params).map(|(mesh, _)| mesh)
}

/// [`reconstruct_surface`] that also returns the centered indicator grid
/// (positive inside, zero at the extracted surface), for inspection dumps.
pub fn reconstruct_surface_with_grid(
    cloud: &PointCloud,
    params: &ReconParams,
) -> Result<(TriMesh, ScalarGrid), ReconError> {
    if cloud.len() < 50 {
        return Err(ReconError::TooFewPoints {
            got: cloud.len(),
            need: 50,
        });
    }
    let oriented;
    let cloud = if cloud.normals.is_some() {
        cloud
    } else {
        oriented = estimate_normals(cloud, params.normal_neighbors)?;
        &oriented
    };

    let field = splat_vector_field(cloud, params.resolution, params.padding)?;
    let opts = PoissonOpts {
        tolerance: params.cg_tolerance,
        max_iterations: params.cg_max_iterations,
        jacobi: params.jacobi,
    };
    let (mut chi, report) = solve_poisson(&field, &opts);
    if !report.converged {
        return Err(ReconError::NoConvergence {
            iterations: report.iterations,
            relative_residual: report.relative_residual,
        });
    }

    // Outward normals make the recovered indicator negative inside; flip it
    // so the interior is positive and extraction orients faces outward.
    for v in &mut chi.values {
        *v = -*v;
    }

    // Iso level: mean of the indicator interpolated at the input samples.
    let mut iso = 0.0;
    for p in &cloud.positions {
        iso += chi.sample(p);
    }
    iso /= cloud.len() as f64;
    for v in &mut chi.values {
        *v -= iso;
    }

    let mesh = extract_isosurface(&chi, 0.0)?;
    Ok((mesh, chi))
}
