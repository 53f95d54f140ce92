use std::collections::HashMap;

use nalgebra::{Matrix3, Point3, Vector3};

use super::ReconError;
use crate::geometry::PointCloud;

/// Uniform hash grid over the cloud for exact k-nearest-neighbor queries.
/// Cell size defaults to an estimate of the average point spacing.
pub struct SpatialHash<'a> {
    positions: &'a [Point3<f64>],
    cell: f64,
    buckets: HashMap<(i64, i64, i64), Vec<u32>>,
    key_min: (i64, i64, i64),
    key_max: (i64, i64, i64),
}

impl<'a> SpatialHash<'a> {
    pub fn build(positions: &'a [Point3<f64>]) -> Self {
        let cell = average_spacing_estimate(positions).max(1e-12);
        let mut buckets: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
        let mut key_min = (i64::MAX, i64::MAX, i64::MAX);
        let mut key_max = (i64::MIN, i64::MIN, i64::MIN);
        for (idx, p) in positions.iter().enumerate() {
            let key = Self::key_of(p, cell);
            key_min = (key_min.0.min(key.0), key_min.1.min(key.1), key_min.2.min(key.2));
            key_max = (key_max.0.max(key.0), key_max.1.max(key.1), key_max.2.max(key.2));
            buckets.entry(key).or_default().push(idx as u32);
        }
        Self {
            positions,
            cell,
            buckets,
            key_min,
            key_max,
        }
    }

    fn key_of(p: &Point3<f64>, cell: f64) -> (i64, i64, i64) {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    }

    /// Indices of the `k` nearest points to `positions[query]`, excluding the
    /// query point itself. Exact: ties are broken by point index.
    pub fn k_nearest(&self, query: u32, k: usize) -> Vec<u32> {
        let p = &self.positions[query as usize];
        let center = Self::key_of(p, self.cell);
        // Shells beyond this cover no occupied bucket.
        let ring_limit = [
            center.0 - self.key_min.0,
            self.key_max.0 - center.0,
            center.1 - self.key_min.1,
            self.key_max.1 - center.1,
            center.2 - self.key_min.2,
            self.key_max.2 - center.2,
        ]
        .into_iter()
        .max()
        .unwrap_or(0)
        .max(0);

        let mut best: Vec<(f64, u32)> = Vec::with_capacity(k * 4 + 8);
        for ring in 0..=ring_limit {
            // Gather candidates from the shell of cells at Chebyshev
            // distance `ring`.
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    for dz in -ring..=ring {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != ring {
                            continue;
                        }
                        let key = (center.0 + dx, center.1 + dy, center.2 + dz);
                        if let Some(bucket) = self.buckets.get(&key) {
                            for &idx in bucket {
                                if idx == query {
                                    continue;
                                }
                                let d2 = (self.positions[idx as usize] - p).norm_squared();
                                best.push((d2, idx));
                            }
                        }
                    }
                }
            }
            // Ties broken by ascending point index.
            best.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
            best.truncate(k.max(1) * 4);
            // Points beyond the gathered shells are at least `ring * cell`
            // away; once the kth candidate is closer than that bound no
            // farther shell can change the answer.
            if best.len() >= k {
                let kth = best[k - 1].0.sqrt();
                if kth <= ring as f64 * self.cell {
                    break;
                }
            }
        }
        best.truncate(k);
        best.into_iter().map(|(_, idx)| idx).collect()
    }
}

/// Point spacing from the bounding-box measure over the axes that actually
/// extend, so flat or collinear clouds get a sane cell size.
fn average_spacing_estimate(positions: &[Point3<f64>]) -> f64 {
    if positions.len() < 2 {
        return 1.0;
    }
    let mut min = positions[0];
    let mut max = positions[0];
    for p in positions {
        for axis in 0..3 {
            min[axis] = min[axis].min(p[axis]);
            max[axis] = max[axis].max(p[axis]);
        }
    }
    let extent = max - min;
    let mut measure = 1.0;
    let mut dims = 0;
    for axis in 0..3 {
        if extent[axis] > 0.0 {
            measure *= extent[axis];
            dims += 1;
        }
    }
    if dims == 0 {
        return 1.0;
    }
    (measure / positions.len() as f64).powf(1.0 / dims as f64)
}

/// Estimate a unit normal per point from PCA over each point's k nearest
/// neighbors, then orient the normals outward from the cloud centroid.
///
/// The centroid heuristic suits convex-ish stockpile clouds; it is not a
/// general orientation propagation.
pub fn estimate_normals(cloud: &PointCloud, k: usize) -> Result<PointCloud, ReconError> {
    if k < 3 {
        return Err(ReconError::InvalidNeighborCount(k));
    }
    if cloud.len() < k + 1 {
        return Err(ReconError::TooFewPoints {
            got: cloud.len(),
            need: k + 1,
        });
    }
    let centroid = cloud.centroid();
    let hash = SpatialHash::build(&cloud.positions);
    let mut normals = Vec::with_capacity(cloud.len());
    for idx in 0..cloud.len() as u32 {
        let p = cloud.positions[idx as usize];
        let neighbors = hash.k_nearest(idx, k);
        debug_assert_eq!(neighbors.len(), k);

        // Covariance of the neighborhood including the point itself.
        let mut mean = p.coords;
        for &n in &neighbors {
            mean += cloud.positions[n as usize].coords;
        }
        mean /= (neighbors.len() + 1) as f64;
        let mut cov = Matrix3::zeros();
        for q in std::iter::once(&p).chain(neighbors.iter().map(|&n| &cloud.positions[n as usize]))
        {
            let d = q.coords - mean;
            cov += d * d.transpose();
        }

        let eigen = nalgebra::SymmetricEigen::new(cov);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            eigen.eigenvalues[b]
                .partial_cmp(&eigen.eigenvalues[a])
                .expect("finite eigenvalues")
        });
        let lambda_max = eigen.eigenvalues[order[0]];
        let lambda_mid = eigen.eigenvalues[order[1]];
        if lambda_max <= 0.0 || lambda_mid <= 1e-9 * lambda_max {
            return Err(ReconError::DegenerateNeighborhood(idx));
        }
        let mut normal: Vector3<f64> = eigen.eigenvectors.column(order[2]).into_owned();
        normal.normalize_mut();

        let outward = normal.dot(&(p - centroid));
        if outward < 0.0 {
            normal = -normal;
        } else if outward == 0.0 {
            // No orientation cue; canonicalize the eigenvector sign.
            if let Some(lead) = normal.iter().find(|c| c.abs() > 1e-12) {
                if *lead < 0.0 {
                    normal = -normal;
                }
            }
        }
        normals.push(normal);
    }
    Ok(PointCloud {
        positions: cloud.positions.clone(),
        normals: Some(normals),
        colors: cloud.colors.clone(),
    })
}
