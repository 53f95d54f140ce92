use std::collections::HashMap;

use super::TriMesh;

/// Mesh diagnostics. An empty report means the mesh is index-valid,
/// degenerate-free, edge-manifold, and consistently oriented.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeshDiagnostics {
    /// Faces referencing a vertex index out of range.
    pub out_of_range: Vec<u32>,
    /// Faces repeating one of their vertices.
    pub repeated_vertex: Vec<u32>,
    /// Faces with numerically zero area.
    pub degenerate: Vec<u32>,
    /// Undirected edges shared by more than two faces.
    pub non_manifold_edges: Vec<(u32, u32)>,
    /// Undirected edges whose two incident faces traverse them in the same
    /// direction (inconsistent winding).
    pub orientation_conflicts: Vec<(u32, u32)>,
}

impl MeshDiagnostics {
    pub fn is_clean(&self) -> bool {
        self.out_of_range.is_empty()
            && self.repeated_vertex.is_empty()
            && self.degenerate.is_empty()
            && self.non_manifold_edges.is_empty()
            && self.orientation_conflicts.is_empty()
    }

    pub fn issue_count(&self) -> usize {
        self.out_of_range.len()
            + self.repeated_vertex.len()
            + self.degenerate.len()
            + self.non_manifold_edges.len()
            + self.orientation_conflicts.len()
    }
}

impl std::fmt::Display for MeshDiagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_clean() {
            return write!(f, "mesh ok");
        }
        write!(
            f,
            "{} out-of-range, {} repeated-vertex, {} degenerate, {} non-manifold edges, {} orientation conflicts",
            self.out_of_range.len(),
            self.repeated_vertex.len(),
            self.degenerate.len(),
            self.non_manifold_edges.len(),
            self.orientation_conflicts.len()
        )
    }
}

impl TriMesh {
    /// Scan the mesh and report all structural defects. Never fails; an empty
    /// report means the mesh is valid.
    pub fn validate(&self) -> MeshDiagnostics {
        let mut report = MeshDiagnostics::default();
        let n = self.vertices.len();

        for (f, face) in self.faces.iter().enumerate() {
            if face.iter().any(|&v| v as usize >= n) {
                report.out_of_range.push(f as u32);
            }
            if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
                report.repeated_vertex.push(f as u32);
            }
        }

        // Edge scan only over structurally sound faces.
        let bad: std::collections::HashSet<u32> = report
            .out_of_range
            .iter()
            .chain(&report.repeated_vertex)
            .copied()
            .collect();

        // Per undirected edge: (faces, directed a<b traversals, directed b<a).
        let mut edges: HashMap<(u32, u32), (u32, u32, u32)> = HashMap::new();
        for (f, face) in self.faces.iter().enumerate() {
            if bad.contains(&(f as u32)) {
                continue;
            }
            if self.is_degenerate(f as u32) {
                report.degenerate.push(f as u32);
            }
            for i in 0..3 {
                let a = face[i];
                let b = face[(i + 1) % 3];
                let entry = edges.entry((a.min(b), a.max(b))).or_insert((0, 0, 0));
                entry.0 += 1;
                if a < b {
                    entry.1 += 1;
                } else {
                    entry.2 += 1;
                }
            }
        }

        let mut non_manifold: Vec<(u32, u32)> = Vec::new();
        let mut conflicts: Vec<(u32, u32)> = Vec::new();
        for (&edge, &(count, fwd, back)) in &edges {
            if count > 2 {
                non_manifold.push(edge);
            } else if fwd > 1 || back > 1 {
                conflicts.push(edge);
            }
        }
        non_manifold.sort_unstable();
        conflicts.sort_unstable();
        report.non_manifold_edges = non_manifold;
        report.orientation_conflicts = conflicts;
        report
    }
}
