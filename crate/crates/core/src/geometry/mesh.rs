use nalgebra::{Point3, Vector3};

use super::{GeometryError, DEGENERATE_FACE_REL_TOL};

/// Indexed triangle mesh. Counter-clockwise vertex order defines the outward
/// face normal.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point3<f64>>,
    pub faces: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[u32; 3]>) -> Self {
        Self { vertices, faces }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    fn face_points(&self, face: u32) -> [Point3<f64>; 3] {
        let [a, b, c] = self.faces[face as usize];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    /// Unnormalized cross product of the CCW edge vectors, plus the squared
    /// length of the longest edge (the degeneracy scale).
    fn face_cross(&self, face: u32) -> (Vector3<f64>, f64) {
        let [a, b, c] = self.face_points(face);
        let e0 = b - a;
        let e1 = c - a;
        let e2 = c - b;
        let cross = e0.cross(&e1);
        let scale = e0.norm_squared().max(e1.norm_squared()).max(e2.norm_squared());
        (cross, scale)
    }

    /// Whether the face has (numerically) zero area.
    pub fn is_degenerate(&self, face: u32) -> bool {
        let (cross, scale) = self.face_cross(face);
        cross.norm() <= DEGENERATE_FACE_REL_TOL * scale
    }

    /// Unit outward normal of a face.
    pub fn face_normal(&self, face: u32) -> Result<Vector3<f64>, GeometryError> {
        let (cross, scale) = self.face_cross(face);
        let norm = cross.norm();
        if norm <= DEGENERATE_FACE_REL_TOL * scale {
            return Err(GeometryError::DegenerateFace(face));
        }
        Ok(cross / norm)
    }

    /// Arithmetic mean of the face's three vertices.
    pub fn face_centroid(&self, face: u32) -> Point3<f64> {
        let [a, b, c] = self.face_points(face);
        Point3::from((a.coords + b.coords + c.coords) / 3.0)
    }

    pub fn face_area(&self, face: u32) -> f64 {
        self.face_cross(face).0.norm() * 0.5
    }

    /// Unit vector from one face centroid to an adjacent face's centroid.
    ///
    /// Normalized so the downstream curvature criterion is independent of the
    /// mesh scale.
    pub fn center_difference(&self, from: u32, to: u32) -> Result<Vector3<f64>, GeometryError> {
        let d = self.face_centroid(to) - self.face_centroid(from);
        let norm = d.norm();
        if norm < 1e-12 {
            return Err(GeometryError::CoincidentCentroids(from, to));
        }
        Ok(d / norm)
    }

    /// Check every face index against the vertex count.
    pub fn check_indices(&self) -> Result<(), GeometryError> {
        let n = self.vertices.len();
        for (f, face) in self.faces.iter().enumerate() {
            for &v in face {
                if v as usize >= n {
                    return Err(GeometryError::FaceOutOfRange {
                        face: f as u32,
                        vertex: v,
                        vertex_count: n,
                    });
                }
            }
        }
        Ok(())
    }

    /// Axis-aligned bounding box, or `None` for an empty mesh.
    pub fn bounds(&self) -> Option<(Point3<f64>, Point3<f64>)> {
        let first = *self.vertices.first()?;
        let mut min = first;
        let mut max = first;
        for p in &self.vertices[1..] {
            for axis in 0..3 {
                min[axis] = min[axis].min(p[axis]);
                max[axis] = max[axis].max(p[axis]);
            }
        }
        Some((min, max))
    }

    /// Sum of all face areas.
    pub fn surface_area(&self) -> f64 {
        (0..self.face_count() as u32).map(|f| self.face_area(f)).sum()
    }

    /// New mesh with every vertex scaled by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|p| Point3::from(p.coords * factor)).collect(),
            faces: self.faces.clone(),
        }
    }

    /// New mesh with `p -> rotation * p + translation` applied to every vertex.
    pub fn transformed(
        &self,
        rotation: &nalgebra::Rotation3<f64>,
        translation: &Vector3<f64>,
    ) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|p| rotation * p + translation).collect(),
            faces: self.faces.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn triangle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> TriMesh {
        TriMesh::new(
            vec![a.into(), b.into(), c.into()],
            vec![[0, 1, 2]],
        )
    }

    #[test]
    fn ccw_triangle_in_xy_plane_has_plus_z_normal() {
        let mesh = triangle([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        assert_eq!(mesh.face_normal(0).unwrap(), Vector3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn reversed_winding_flips_normal() {
        let mesh = triangle([0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]);
        assert_eq!(mesh.face_normal(0).unwrap(), Vector3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn normal_is_orthogonal_to_edges() {
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..50 {
            let a = Point3::new(next(), next(), next());
            let b = Point3::new(next(), next(), next());
            let c = Point3::new(next(), next(), next());
            let mesh = TriMesh::new(vec![a, b, c], vec![[0, 1, 2]]);
            if mesh.is_degenerate(0) {
                continue;
            }
            let n = mesh.face_normal(0).unwrap();
            assert!(n.dot(&(b - a)).abs() < 1e-12);
            assert!(n.dot(&(c - a)).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_face_is_rejected() {
        let mesh = triangle([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]);
        assert_eq!(mesh.face_normal(0), Err(GeometryError::DegenerateFace(0)));
        assert!(mesh.is_degenerate(0));
    }

    #[test]
    fn centroid_is_vertex_mean() {
        let mesh = triangle([0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 3.0, 0.0]);
        assert_eq!(mesh.face_centroid(0), Point3::new(1.0, 1.0, 0.0));
    }

    #[test]
    fn centroid_translates_with_mesh() {
        let base = triangle([0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 3.0, 0.0]);
        let moved = base.transformed(&nalgebra::Rotation3::identity(), &Vector3::new(5.0, 5.0, 5.0));
        assert_relative_eq!(
            moved.face_centroid(0),
            Point3::new(6.0, 6.0, 5.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn coplanar_neighbors_have_in_plane_center_difference() {
        // Two unit triangles in the xy-plane sharing the edge (1,0,0)-(0,1,0).
        let mesh = TriMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
                Point3::new(1.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [1, 3, 2]],
        );
        let c = mesh.center_difference(0, 1).unwrap();
        assert!(c.z.abs() < 1e-12);
        assert_relative_eq!(c.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn center_difference_is_antisymmetric() {
        let mesh = TriMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
                Point3::new(1.2, 0.9, 0.4),
            ],
            vec![[0, 1, 2], [1, 3, 2]],
        );
        let fwd = mesh.center_difference(0, 1).unwrap();
        let back = mesh.center_difference(1, 0).unwrap();
        assert_relative_eq!(fwd, -back, epsilon = 1e-15);
    }

    #[test]
    fn convex_roof_center_difference_points_below_from_face() {
        // Flat face in the xy-plane plus a vertical wall descending at x = 1:
        // a 90-degree convex roof edge. The neighbor centroid sits below the
        // flat face's plane.
        let mesh = TriMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(1.0, 1.0, 0.0),
                Point3::new(1.0, 0.5, -1.0),
            ],
            vec![[0, 1, 2], [2, 1, 3]],
        );
        let n_from = mesh.face_normal(0).unwrap();
        assert_relative_eq!(n_from, Vector3::new(0.0, 0.0, 1.0), epsilon = 1e-15);
        // Wall normal faces +x (outward for material below the roof).
        let n_wall = mesh.face_normal(1).unwrap();
        assert_relative_eq!(n_wall, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-15);
        let c = mesh.center_difference(0, 1).unwrap();
        assert!(c.dot(&n_from) < 0.0);
    }

    #[test]
    fn coincident_centroids_are_an_error() {
        // Same triangle twice with opposite winding: identical centroids.
        let mesh = TriMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 1]],
        );
        assert_eq!(
            mesh.center_difference(0, 1),
            Err(GeometryError::CoincidentCentroids(0, 1))
        );
    }

    #[test]
    fn out_of_range_index_is_reported() {
        let mesh = TriMesh::new(vec![Point3::origin()], vec![[0, 0, 1]]);
        assert_eq!(
            mesh.check_indices(),
            Err(GeometryError::FaceOutOfRange {
                face: 0,
                vertex: 1,
                vertex_count: 1
            })
        );
    }
}
