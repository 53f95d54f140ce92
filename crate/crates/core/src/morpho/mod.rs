//! Per-particle size and shape metrics for QA/QC reporting: principal
//! dimensions, elongation and flatness, calibration scaling, and cumulative
//! gradation tables.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::geometry::TriMesh;
use crate::segment::SegmentLabels;

#[derive(Debug, Error, PartialEq)]
pub enum MorphoError {
    #[error("segment {segment} has {faces} faces, need at least 4 with non-collinear centroids")]
    DegenerateSegment { segment: u32, faces: usize },
    #[error("segment {0} does not exist (segment count {1})")]
    NoSuchSegment(u32, u32),
    #[error("lengths must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("no particles to report")]
    EmptyInput,
    #[error("sieve thresholds must be strictly ascending")]
    NonAscendingThresholds,
}

/// Size and shape summary of one segmented particle. Dimensions are the
/// extents of the segment's vertices along the principal axes of its
/// area-weighted face centroids, ordered `d1 >= d2 >= d3`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleMetrics {
    pub segment_id: u32,
    pub face_count: usize,
    pub surface_area: f64,
    pub principal_dimensions: [f64; 3],
    pub elongation: f64,
    pub flatness: f64,
}

/// Cumulative percent of particles finer than each sieve size, by the
/// intermediate dimension d2.
#[derive(Debug, Clone, PartialEq)]
pub struct GradationReport {
    /// (sieve size, percent of particles with d2 below it), nondecreasing,
    /// ending at 100.
    pub entries: Vec<(f64, f64)>,
    pub particle_count: usize,
}

/// Compute metrics for one segment.
///
/// The principal frame comes from PCA over the segment's face centroids
/// weighted by face area; extents are max minus min of the vertex
/// projections on each axis.
pub fn segment_metrics(
    mesh: &TriMesh,
    labels: &SegmentLabels,
    segment_id: u32,
) -> Result<ParticleMetrics, MorphoError> {
    if segment_id >= labels.segment_count {
        return Err(MorphoError::NoSuchSegment(segment_id, labels.segment_count));
    }
    let faces = labels.segment_faces(segment_id);
    if faces.len() < 4 {
        return Err(MorphoError::DegenerateSegment {
            segment: segment_id,
            faces: faces.len(),
        });
    }

    let mut total_area = 0.0;
    let mut weighted_mean = Vector3::zeros();
    for &f in &faces {
        let area = mesh.face_area(f);
        total_area += area;
        weighted_mean += mesh.face_centroid(f).coords * area;
    }
    if total_area <= 0.0 {
        return Err(MorphoError::DegenerateSegment {
            segment: segment_id,
            faces: faces.len(),
        });
    }
    weighted_mean /= total_area;

    let mut covariance = Matrix3::zeros();
    for &f in &faces {
        let d = mesh.face_centroid(f).coords - weighted_mean;
        covariance += d * d.transpose() * mesh.face_area(f);
    }
    covariance /= total_area;

    let axes = principal_axes(&covariance).ok_or(MorphoError::DegenerateSegment {
        segment: segment_id,
        faces: faces.len(),
    })?;

    // Vertex extents along each axis.
    let mut vertex_ids = std::collections::HashSet::new();
    for &f in &faces {
        for &v in &mesh.faces[f as usize] {
            vertex_ids.insert(v);
        }
    }
    let mut extents = [0.0f64; 3];
    for (k, axis) in axes.iter().enumerate() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &vertex_ids {
            let proj = mesh.vertices[v as usize].coords.dot(axis);
            lo = lo.min(proj);
            hi = hi.max(proj);
        }
        extents[k] = hi - lo;
    }
    extents.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite extents"));

    let [d1, d2, d3] = extents;
    Ok(ParticleMetrics {
        segment_id,
        face_count: faces.len(),
        surface_area: total_area,
        principal_dimensions: extents,
        elongation: if d1 > 0.0 { d2 / d1 } else { 1.0 },
        flatness: if d2 > 0.0 { d3 / d2 } else { 1.0 },
    })
}

/// Metrics for every segment; segments too small or degenerate to measure
/// are skipped.
pub fn all_segment_metrics(mesh: &TriMesh, labels: &SegmentLabels) -> Vec<ParticleMetrics> {
    (0..labels.segment_count)
        .filter_map(|s| segment_metrics(mesh, labels, s).ok())
        .collect()
}

/// Eigenvectors of the covariance by descending eigenvalue.
///
/// Within an eigenvalue cluster the eigenvectors are underdetermined and an
/// eigensolver returns an arbitrary basis of the cluster's subspace, so each
/// cluster is re-aligned against the world axes. That keeps the extents of
/// symmetric bodies (a cube, a sphere) stable instead of depending on
/// rounding noise.
fn principal_axes(covariance: &Matrix3<f64>) -> Option<[Vector3<f64>; 3]> {
    let eigen = nalgebra::SymmetricEigen::new(*covariance);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let values = [
        eigen.eigenvalues[order[0]],
        eigen.eigenvalues[order[1]],
        eigen.eigenvalues[order[2]],
    ];
    if !values[0].is_finite() || values[0] <= 0.0 {
        return None;
    }
    // Rank check: collinear centroids leave only one informative direction.
    if values[1] <= 1e-12 * values[0] {
        return None;
    }

    let mut axes = [
        eigen.eigenvectors.column(order[0]).into_owned(),
        eigen.eigenvectors.column(order[1]).into_owned(),
        eigen.eigenvectors.column(order[2]).into_owned(),
    ];

    // Cluster nearly-equal eigenvalues (relative gap below 1e-6).
    let tol = 1e-6 * values[0].max(1e-300);
    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && (values[end - 1] - values[end]).abs() <= tol {
            end += 1;
        }
        if end - start > 1 {
            align_cluster_to_world(&mut axes, start, end);
        }
        start = end;
    }
    Some(axes)
}

/// Re-orthonormalize the eigenvectors of a degenerate cluster toward the
/// world axes: project each world axis into the cluster's subspace and
/// Gram-Schmidt the results.
fn align_cluster_to_world(axes: &mut [Vector3<f64>; 3], start: usize, end: usize) {
    let subspace: Vec<Vector3<f64>> = axes[start..end].to_vec();
    let project = |v: &Vector3<f64>| -> Vector3<f64> {
        subspace.iter().map(|b| b * b.dot(v)).sum()
    };
    let mut replacement: Vec<Vector3<f64>> = Vec::with_capacity(end - start);
    for world in [Vector3::x(), Vector3::y(), Vector3::z()] {
        if replacement.len() == end - start {
            break;
        }
        let mut candidate = project(&world);
        for prev in &replacement {
            candidate -= prev * prev.dot(&candidate);
        }
        let norm = candidate.norm();
        if norm > 1e-8 {
            replacement.push(candidate / norm);
        }
    }
    if replacement.len() == end - start {
        for (slot, axis) in axes[start..end].iter_mut().zip(replacement) {
            *slot = axis;
        }
    }
}

/// Uniformly scale a mesh so a measured reference length matches its true
/// length (calibration-object scaling).
pub fn apply_scale(
    mesh: &TriMesh,
    reference_true_length: f64,
    reference_measured_length: f64,
) -> Result<TriMesh, MorphoError> {
    if !reference_true_length.is_finite() || reference_true_length <= 0.0 {
        return Err(MorphoError::NonPositiveLength(reference_true_length));
    }
    if !reference_measured_length.is_finite() || reference_measured_length <= 0.0 {
        return Err(MorphoError::NonPositiveLength(reference_measured_length));
    }
    Ok(mesh.scaled(reference_true_length / reference_measured_length))
}

/// Cumulative percent-finer table over the intermediate dimension d2.
/// A final +infinity bucket is appended when the given thresholds do not
/// already reach 100%.
pub fn gradation_report(
    metrics: &[ParticleMetrics],
    thresholds: &[f64],
) -> Result<GradationReport, MorphoError> {
    if metrics.is_empty() {
        return Err(MorphoError::EmptyInput);
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MorphoError::NonAscendingThresholds);
    }
    let count = metrics.len();
    let percent_below = |threshold: f64| -> f64 {
        let below = metrics
            .iter()
            .filter(|m| m.principal_dimensions[1] < threshold)
            .count();
        100.0 * below as f64 / count as f64
    };
    let mut entries: Vec<(f64, f64)> = thresholds.iter().map(|&t| (t, percent_below(t))).collect();
    if entries.last().map(|(_, p)| *p) != Some(100.0) {
        entries.push((f64::INFINITY, 100.0));
    }
    Ok(GradationReport {
        entries,
        particle_count: count,
    })
}
