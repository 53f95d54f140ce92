use nalgebra::Point3;

use super::grid::{GridLayout, VectorGrid};
use super::ReconError;
use crate::geometry::PointCloud;

/// Grid layout for a cloud: cubic cells sized so the longest bounding-box
/// axis spans `resolution - 2 * padding` cells, expanded by `padding` cells
/// on every side. The lattice is centered on the cloud.
pub fn layout_for_cloud(
    cloud: &PointCloud,
    resolution: usize,
    padding: usize,
) -> Result<GridLayout, ReconError> {
    if !(8..=256).contains(&resolution) {
        return Err(ReconError::InvalidGrid(format!(
            "resolution {resolution} outside [8, 256]"
        )));
    }
    if resolution <= 2 * padding + 1 {
        return Err(ReconError::InvalidGrid(format!(
            "resolution {resolution} leaves no interior cells at padding {padding}"
        )));
    }
    let (min, max) = cloud
        .bounds()
        .ok_or_else(|| ReconError::InvalidGrid("empty cloud".into()))?;
    let extent = max - min;
    let longest = extent.amax();
    let spacing = if longest > 0.0 {
        longest / (resolution - 2 * padding) as f64
    } else {
        1.0
    };
    let cells = |e: f64| -> usize { (e / spacing).ceil() as usize + 2 * padding };
    let (nx, ny, nz) = (
        cells(extent.x).max(2),
        cells(extent.y).max(2),
        cells(extent.z).max(2),
    );
    let center = Point3::from((min.coords + max.coords) / 2.0);
    let origin = Point3::new(
        center.x - nx as f64 * spacing / 2.0,
        center.y - ny as f64 * spacing / 2.0,
        center.z - nz as f64 * spacing / 2.0,
    );
    GridLayout::new(nx, ny, nz, origin, spacing)
}

/// Distribute each point's normal onto the 8 surrounding lattice nodes with
/// trilinear weights.
pub fn splat_into(layout: GridLayout, cloud: &PointCloud) -> Result<VectorGrid, ReconError> {
    let normals = cloud.normals.as_ref().ok_or(ReconError::MissingNormals)?;
    let mut grid = VectorGrid::zeros(layout);
    for (p, n) in cloud.positions.iter().zip(normals) {
        let g = layout.grid_coords(p);
        let cell = |g: f64, cells: usize| -> (usize, f64) {
            let clamped = g.clamp(0.0, cells as f64);
            let base = (clamped.floor() as usize).min(cells - 1);
            (base, clamped - base as f64)
        };
        let (i, fx) = cell(g.x, layout.nx);
        let (j, fy) = cell(g.y, layout.ny);
        let (k, fz) = cell(g.z, layout.nz);
        for (di, wx) in [(0, 1.0 - fx), (1, fx)] {
            for (dj, wy) in [(0, 1.0 - fy), (1, fy)] {
                for (dk, wz) in [(0, 1.0 - fz), (1, fz)] {
                    let idx = layout.node_index(i + di, j + dj, k + dk);
                    grid.values[idx] += n * (wx * wy * wz);
                }
            }
        }
    }
    Ok(grid)
}

/// Splat a cloud's normals into a grid sized by [`layout_for_cloud`].
pub fn splat_vector_field(
    cloud: &PointCloud,
    resolution: usize,
    padding: usize,
) -> Result<VectorGrid, ReconError> {
    let layout = layout_for_cloud(cloud, resolution, padding)?;
    splat_into(layout, cloud)
}
