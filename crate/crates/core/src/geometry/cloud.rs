use nalgebra::{Point3, Vector3};

use super::{GeometryError, UNIT_NORM_TOL};

/// An unordered set of 3D points with optional unit normals and RGB colors.
///
/// Coordinates are in world units and dimensionless until calibrated. The
/// optional arrays, when present, run parallel to `positions`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub positions: Vec<Point3<f64>>,
    pub normals: Option<Vec<Vector3<f64>>>,
    pub colors: Option<Vec<[u8; 3]>>,
}

impl PointCloud {
    /// Cloud with positions only.
    pub fn from_positions(positions: Vec<Point3<f64>>) -> Self {
        Self {
            positions,
            normals: None,
            colors: None,
        }
    }

    /// Build a cloud, checking the parallel-array invariants: optional arrays
    /// must match `positions` in length and every normal must be unit length
    /// within `UNIT_NORM_TOL`.
    pub fn new(
        positions: Vec<Point3<f64>>,
        normals: Option<Vec<Vector3<f64>>>,
        colors: Option<Vec<[u8; 3]>>,
    ) -> Result<Self, GeometryError> {
        let n = positions.len();
        if let Some(normals) = &normals {
            if normals.len() != n {
                return Err(GeometryError::LengthMismatch {
                    what: "normals",
                    got: normals.len(),
                    expected: n,
                });
            }
            for (i, normal) in normals.iter().enumerate() {
                let norm = normal.norm();
                if (norm - 1.0).abs() > UNIT_NORM_TOL {
                    return Err(GeometryError::NonUnitNormal { index: i, norm });
                }
            }
        }
        if let Some(colors) = &colors {
            if colors.len() != n {
                return Err(GeometryError::LengthMismatch {
                    what: "colors",
                    got: colors.len(),
                    expected: n,
                });
            }
        }
        Ok(Self {
            positions,
            normals,
            colors,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Arithmetic mean of the positions.
    pub fn centroid(&self) -> Point3<f64> {
        let mut sum = Vector3::zeros();
        for p in &self.positions {
            sum += p.coords;
        }
        Point3::from(sum / self.positions.len().max(1) as f64)
    }

    /// Axis-aligned bounding box, or `None` for an empty cloud.
    pub fn bounds(&self) -> Option<(Point3<f64>, Point3<f64>)> {
        let first = *self.positions.first()?;
        let mut min = first;
        let mut max = first;
        for p in &self.positions[1..] {
            for axis in 0..3 {
                min[axis] = min[axis].min(p[axis]);
                max[axis] = max[axis].max(p[axis]);
            }
        }
        Some((min, max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_normals() {
        let err = PointCloud::new(
            vec![Point3::origin(), Point3::new(1.0, 0.0, 0.0)],
            Some(vec![Vector3::z()]),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, GeometryError::LengthMismatch { .. }));
    }

    #[test]
    fn rejects_non_unit_normal() {
        let err = PointCloud::new(
            vec![Point3::origin()],
            Some(vec![Vector3::new(0.0, 0.0, 1.1)]),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, GeometryError::NonUnitNormal { index: 0, .. }));
    }

    #[test]
    fn accepts_unit_normals_within_tolerance() {
        let cloud = PointCloud::new(
            vec![Point3::origin()],
            Some(vec![Vector3::new(0.0, 0.0, 1.0 + 5e-7)]),
            None,
        )
        .unwrap();
        assert_eq!(cloud.len(), 1);
    }

    #[test]
    fn centroid_and_bounds() {
        let cloud = PointCloud::from_positions(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(2.0, 4.0, -2.0),
        ]);
        assert_eq!(cloud.centroid(), Point3::new(1.0, 2.0, -1.0));
        let (min, max) = cloud.bounds().unwrap();
        assert_eq!(min, Point3::new(0.0, 0.0, -2.0));
        assert_eq!(max, Point3::new(2.0, 4.0, 0.0));
    }
}
