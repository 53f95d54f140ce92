use std::collections::HashMap;

use super::{GeometryError, TriMesh};

/// Edge-based face adjacency: for each face, the faces sharing one of its
/// three edges, sorted by ascending face id. Border edges contribute no
/// neighbor, so a face has at most three.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceAdjacency {
    neighbors: Vec<Vec<u32>>,
}

impl FaceAdjacency {
    /// Build the adjacency from edge sharing.
    ///
    /// Fails with `NonManifoldEdge` if any undirected edge is shared by more
    /// than two faces.
    pub fn build(mesh: &TriMesh) -> Result<Self, GeometryError> {
        mesh.check_indices()?;
        let mut edge_faces: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        for (f, face) in mesh.faces.iter().enumerate() {
            for i in 0..3 {
                let a = face[i];
                let b = face[(i + 1) % 3];
                let key = (a.min(b), a.max(b));
                edge_faces.entry(key).or_default().push(f as u32);
            }
        }

        let mut neighbors = vec![Vec::new(); mesh.face_count()];
        for ((a, b), faces) in &edge_faces {
            match faces.as_slice() {
                [_] => {}
                [f, g] => {
                    neighbors[*f as usize].push(*g);
                    neighbors[*g as usize].push(*f);
                }
                _ => return Err(GeometryError::NonManifoldEdge(*a, *b)),
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self { neighbors })
    }

    pub fn face_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Neighbors of `face` in ascending order.
    pub fn neighbors(&self, face: u32) -> &[u32] {
        &self.neighbors[face as usize]
    }

    /// Total number of directed adjacency entries.
    pub fn directed_entry_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }
}
