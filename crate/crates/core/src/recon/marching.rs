use std::collections::HashMap;

use nalgebra::Point3;

use super::grid::ScalarGrid;
use super::mc_tables::{CORNER_OFFSETS, EDGE_CORNERS, TRIANGLE_TABLE};
use super::ReconError;
use crate::geometry::TriMesh;

/// Extract the iso-surface of a scalar grid with marching cubes.
///
/// Crossing vertices are placed by linear interpolation along lattice edges
/// and welded through a canonical per-edge key, so shared cell edges produce
/// a single vertex and the mesh comes out edge-manifold. Triangles are wound
/// so face normals point toward decreasing field values (outward when the
/// interior is positive).
pub fn extract_isosurface(grid: &ScalarGrid, iso: f64) -> Result<TriMesh, ReconError> {
    let layout = grid.layout;
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();
    // Welding key: (canonical low-node index, axis). Crossings that land
    // exactly on a lattice node (t = 0 or 1) coincide across several edges,
    // so those are welded again by exact position.
    let mut edge_vertex: HashMap<(usize, u8), u32> = HashMap::new();
    let mut position_vertex: HashMap<[u64; 3], u32> = HashMap::new();

    let mut corner_values = [0.0f64; 8];
    for k in 0..layout.nz {
        for j in 0..layout.ny {
            for i in 0..layout.nx {
                for (c, (di, dj, dk)) in CORNER_OFFSETS.iter().enumerate() {
                    corner_values[c] = grid.value(i + di, j + dj, k + dk);
                }
                let mut cube_index = 0usize;
                for (c, v) in corner_values.iter().enumerate() {
                    if *v < iso {
                        cube_index |= 1 << c;
                    }
                }
                if cube_index == 0 || cube_index == 255 {
                    continue;
                }

                let row = &TRIANGLE_TABLE[cube_index];
                let mut t = 0;
                while row[t] >= 0 {
                    let tri_edges = [row[t] as usize, row[t + 1] as usize, row[t + 2] as usize];
                    t += 3;
                    let mut ids = [0u32; 3];
                    for (slot, &edge) in tri_edges.iter().enumerate() {
                        ids[slot] = edge_vertex_id(
                            grid,
                            iso,
                            (i, j, k),
                            edge,
                            &mut vertices,
                            &mut edge_vertex,
                            &mut position_vertex,
                        );
                    }
                    // Interpolation can land two edge crossings on the same
                    // lattice node; drop the resulting slivers.
                    if ids[0] != ids[1] && ids[1] != ids[2] && ids[0] != ids[2] {
                        faces.push(ids);
                    }
                }
            }
        }
    }

    if faces.is_empty() {
        return Err(ReconError::EmptySurface);
    }
    Ok(TriMesh::new(vertices, faces))
}

/// Vertex id for the crossing on a cell edge, creating and welding on first
/// use. The interpolation always runs from the canonical low node of the
/// lattice edge, so both adjacent cells compute the identical position.
fn edge_vertex_id(
    grid: &ScalarGrid,
    iso: f64,
    cell: (usize, usize, usize),
    edge: usize,
    vertices: &mut Vec<Point3<f64>>,
    edge_vertex: &mut HashMap<(usize, u8), u32>,
    position_vertex: &mut HashMap<[u64; 3], u32>,
) -> u32 {
    let layout = grid.layout;
    let (ca, cb) = EDGE_CORNERS[edge];
    let a = CORNER_OFFSETS[ca];
    let b = CORNER_OFFSETS[cb];
    let node_a = (cell.0 + a.0, cell.1 + a.1, cell.2 + a.2);
    let node_b = (cell.0 + b.0, cell.1 + b.1, cell.2 + b.2);
    // The two nodes differ along exactly one axis.
    let (low, axis) = if node_a.0 != node_b.0 {
        (minimize(node_a, node_b, 0), 0u8)
    } else if node_a.1 != node_b.1 {
        (minimize(node_a, node_b, 1), 1u8)
    } else {
        (minimize(node_a, node_b, 2), 2u8)
    };
    let key = (layout.node_index(low.0, low.1, low.2), axis);
    if let Some(&id) = edge_vertex.get(&key) {
        return id;
    }

    let v0 = grid.value(low.0, low.1, low.2);
    let high = match axis {
        0 => (low.0 + 1, low.1, low.2),
        1 => (low.0, low.1 + 1, low.2),
        _ => (low.0, low.1, low.2 + 1),
    };
    let v1 = grid.value(high.0, high.1, high.2);
    let t = if v1 == v0 {
        0.5
    } else {
        ((iso - v0) / (v1 - v0)).clamp(0.0, 1.0)
    };
    let mut position = layout.node_position(low.0, low.1, low.2);
    position[axis as usize] += t * layout.spacing;

    let bits = [
        position.x.to_bits(),
        position.y.to_bits(),
        position.z.to_bits(),
    ];
    let id = match position_vertex.get(&bits) {
        Some(&id) => id,
        None => {
            let id = vertices.len() as u32;
            vertices.push(position);
            position_vertex.insert(bits, id);
            id
        }
    };
    edge_vertex.insert(key, id);
    id
}

fn minimize(
    a: (usize, usize, usize),
    b: (usize, usize, usize),
    axis: usize,
) -> (usize, usize, usize) {
    let ax = [a.0, a.1, a.2][axis];
    let bx = [b.0, b.1, b.2][axis];
    if ax <= bx {
        a
    } else {
        b
    }
}
