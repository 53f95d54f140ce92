//! Curvature-constrained breadth-first segmentation of a stockpile mesh.
//!
//! Individual aggregates are mostly convex, while the seams between them are
//! strongly concave. A BFS floods outward from a seed face and admits a
//! neighbor only while the local curvature stays convex or mildly concave;
//! rejected faces are marked as aggregate boundaries. The search restarts
//! from the lowest unassigned face until every face is assigned, so the
//! result partitions the mesh into segments plus boundary faces.

use std::collections::VecDeque;

use nalgebra::Vector3;
use thiserror::Error;

use crate::geometry::{FaceAdjacency, GeometryError, TriMesh, UNIT_NORM_TOL};

#[derive(Debug, Error, PartialEq)]
pub enum SegmentError {
    #[error("threshold {0} outside [-2, 2]")]
    ThresholdOutOfRange(f64),
    #[error("input vector has norm {0}, expected unit length")]
    NonUnitInput(f64),
    #[error("adjacency covers {adjacency} faces but mesh has {mesh}")]
    AdjacencyMismatch { adjacency: usize, mesh: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Threshold for the curvature criterion. The dot product of unit vectors
/// `(c + n_next) . n_cur` ranges over [-2, 2]; the working default of 0.7
/// keeps flat and gently curved surfaces connected while cutting at sharp
/// concave seams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionParams {
    pub threshold: f64,
}

impl CriterionParams {
    pub const DEFAULT_THRESHOLD: f64 = 0.7;

    pub fn new(threshold: f64) -> Result<Self, SegmentError> {
        if !(-2.0..=2.0).contains(&threshold) || threshold.is_nan() {
            return Err(SegmentError::ThresholdOutOfRange(threshold));
        }
        Ok(Self { threshold })
    }
}

impl Default for CriterionParams {
    fn default() -> Self {
        Self {
            threshold: Self::DEFAULT_THRESHOLD,
        }
    }
}

/// Assignment of one face: a segment id or the boundary marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceLabel {
    Segment(u32),
    Boundary,
}

/// Per-face labels produced by [`segment_mesh`]: every face carries exactly
/// one label, every segment id below `segment_count` is used, and each
/// segment's faces form an edge-connected region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentLabels {
    pub labels: Vec<FaceLabel>,
    pub segment_count: u32,
}

impl SegmentLabels {
    pub fn face_count(&self) -> usize {
        self.labels.len()
    }

    /// Faces belonging to a segment, ascending.
    pub fn segment_faces(&self, segment: u32) -> Vec<u32> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == FaceLabel::Segment(segment))
            .map(|(f, _)| f as u32)
            .collect()
    }

    /// Number of faces per segment id.
    pub fn segment_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.segment_count as usize];
        for label in &self.labels {
            if let FaceLabel::Segment(s) = label {
                sizes[*s as usize] += 1;
            }
        }
        sizes
    }
}

/// The curvature criterion: admit the step from the current face onto its
/// neighbor iff `(c + n_next) . n_cur > t`, where the `n` are unit face
/// normals and `c` is the unit center difference pointing from the
/// neighbor's centroid back to the current face's centroid. With that
/// orientation, concave steps sharper than roughly 24 degrees fail at the
/// default threshold while convex edges pass up to about 95 degrees, so
/// seams between particles cut while rock-surface detail survives. A tie
/// counts as a boundary.
pub fn curvature_criterion(
    c: &Vector3<f64>,
    n_next: &Vector3<f64>,
    n_cur: &Vector3<f64>,
    params: &CriterionParams,
) -> Result<bool, SegmentError> {
    for v in [c, n_next, n_cur] {
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(SegmentError::NonUnitInput(norm));
        }
    }
    Ok((c + n_next).dot(n_cur) > params.threshold)
}

/// Partition all faces into segments and boundary faces.
///
/// Seeds are chosen as the lowest-index unassigned face; the BFS uses a FIFO
/// queue and visits neighbors in ascending face id, so the result is
/// deterministic. A face rejected by the criterion is marked boundary
/// permanently: it is skipped as a seed and never adopted into a later
/// segment. Degenerate faces have no normal and are pre-marked boundary.
///
/// Each search is meant to start from a face of an aggregate. A run that
/// touched previously rejected boundary and whose every visited face lies
/// directly on rejected boundary never left the band between aggregates;
/// such a run is absorbed into the boundary instead of founding a segment.
pub fn segment_mesh(
    mesh: &TriMesh,
    adjacency: &FaceAdjacency,
    params: &CriterionParams,
) -> Result<SegmentLabels, SegmentError> {
    let face_count = mesh.face_count();
    if adjacency.face_count() != face_count {
        return Err(SegmentError::AdjacencyMismatch {
            adjacency: adjacency.face_count(),
            mesh: face_count,
        });
    }

    let mut normals: Vec<Option<Vector3<f64>>> = Vec::with_capacity(face_count);
    let mut assignment: Vec<Option<FaceLabel>> = vec![None; face_count];
    // Boundary faces created by a rejected search step, as opposed to
    // degeneracy pre-marks; only these delimit the band between aggregates.
    let mut rejection_marked = vec![false; face_count];
    for f in 0..face_count as u32 {
        match mesh.face_normal(f) {
            Ok(n) => normals.push(Some(n)),
            Err(GeometryError::DegenerateFace(_)) => {
                normals.push(None);
                assignment[f as usize] = Some(FaceLabel::Boundary);
            }
            Err(e) => return Err(e.into()),
        }
    }

    let mut segment_count = 0u32;
    let mut queue = VecDeque::new();
    let mut visited = Vec::new();
    // Search run that rejected each face, to tell earlier runs' marks from
    // the current one's.
    let mut marked_by: Vec<u32> = vec![u32::MAX; face_count];
    let mut run = 0u32;
    for seed in 0..face_count as u32 {
        if assignment[seed as usize].is_some() {
            continue;
        }
        let segment = segment_count;
        assignment[seed as usize] = Some(FaceLabel::Segment(segment));
        queue.clear();
        queue.push_back(seed);
        visited.clear();
        visited.push(seed);
        let mut walled_in = false;

        while let Some(current) = queue.pop_front() {
            let n_cur = normals[current as usize].expect("visited face has a normal");
            for &next in adjacency.neighbors(current) {
                match assignment[next as usize] {
                    Some(FaceLabel::Boundary) => {
                        walled_in |= rejection_marked[next as usize]
                            && marked_by[next as usize] != run;
                        continue;
                    }
                    Some(FaceLabel::Segment(_)) => continue,
                    None => {}
                }
                let n_next = normals[next as usize].expect("non-degenerate neighbor");
                let c = mesh.center_difference(next, current)?;
                if curvature_criterion(&c, &n_next, &n_cur, params)? {
                    assignment[next as usize] = Some(FaceLabel::Segment(segment));
                    queue.push_back(next);
                    visited.push(next);
                } else {
                    assignment[next as usize] = Some(FaceLabel::Boundary);
                    rejection_marked[next as usize] = true;
                    marked_by[next as usize] = run;
                }
            }
        }

        // A run that touched the band left by earlier searches and whose
        // every face sits directly on rejected boundary never escaped that
        // band: it is boundary material, not a new aggregate.
        let band_locked = walled_in
            && visited.iter().all(|&f| {
                adjacency
                    .neighbors(f)
                    .iter()
                    .any(|&n| rejection_marked[n as usize])
            });
        if band_locked {
            for &f in &visited {
                assignment[f as usize] = Some(FaceLabel::Boundary);
                rejection_marked[f as usize] = true;
                marked_by[f as usize] = run;
            }
        } else {
            segment_count += 1;
        }
        run += 1;
    }

    Ok(SegmentLabels {
        labels: assignment
            .into_iter()
            .map(|a| a.expect("all faces assigned"))
            .collect(),
        segment_count,
    })
}

/// Boundary-labeled faces, ascending.
pub fn boundary_faces(labels: &SegmentLabels) -> Vec<u32> {
    labels
        .labels
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == FaceLabel::Boundary)
        .map(|(f, _)| f as u32)
        .collect()
}

/// Relabel segments smaller than `min_faces` as boundary and compact the
/// remaining ids, preserving their relative order.
pub fn filter_segments(labels: &SegmentLabels, min_faces: usize) -> SegmentLabels {
    assert!(min_faces >= 1, "min_faces must be at least 1");
    let sizes = labels.segment_sizes();
    let mut remap: Vec<Option<u32>> = Vec::with_capacity(sizes.len());
    let mut next = 0u32;
    for size in &sizes {
        if *size >= min_faces {
            remap.push(Some(next));
            next += 1;
        } else {
            remap.push(None);
        }
    }
    SegmentLabels {
        labels: labels
            .labels
            .iter()
            .map(|l| match l {
                FaceLabel::Segment(s) => match remap[*s as usize] {
                    Some(new) => FaceLabel::Segment(new),
                    None => FaceLabel::Boundary,
                },
                FaceLabel::Boundary => FaceLabel::Boundary,
            })
            .collect(),
        segment_count: next,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn segment_fixture(mesh: &TriMesh, threshold: f64) -> SegmentLabels {
        let adjacency = FaceAdjacency::build(mesh).unwrap();
        segment_mesh(mesh, &adjacency, &CriterionParams::new(threshold).unwrap()).unwrap()
    }

    #[test]
    fn coplanar_step_continues() {
        let params = CriterionParams::default();
        let n = Vector3::new(0.0, 0.0, 1.0);
        let c = Vector3::new(1.0, 0.0, 0.0);
        assert!(curvature_criterion(&c, &n, &n, &params).unwrap());
    }

    #[test]
    fn sharp_concave_step_is_a_boundary() {
        // Hand-computed: value = -sqrt(2)/2.
        let params = CriterionParams::default();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let n_cur = Vector3::new(0.0, 0.0, 1.0);
        let n_next = Vector3::new(-1.0, 0.0, 0.0);
        let c = Vector3::new(h, 0.0, -h);
        assert!(!curvature_criterion(&c, &n_next, &n_cur, &params).unwrap());
        assert!(((c + n_next).dot(&n_cur) + h).abs() < 1e-15);
    }

    #[test]
    fn non_unit_input_is_rejected() {
        let params = CriterionParams::default();
        let n = Vector3::new(0.0, 0.0, 1.0);
        let bad = Vector3::new(0.5, 0.0, 0.0);
        assert!(matches!(
            curvature_criterion(&bad, &n, &n, &params),
            Err(SegmentError::NonUnitInput(_))
        ));
    }

    #[test]
    fn threshold_range_is_enforced() {
        assert!(CriterionParams::new(2.0).is_ok());
        assert!(CriterionParams::new(-2.0).is_ok());
        assert!(matches!(
            CriterionParams::new(2.1),
            Err(SegmentError::ThresholdOutOfRange(_))
        ));
    }

    #[test]
    fn convex_icosphere_is_one_segment() {
        let labels = segment_fixture(&fixtures::icosphere(2, 1.0), 0.7);
        assert_eq!(labels.segment_count, 1);
        assert!(boundary_faces(&labels).is_empty());
    }

    #[test]
    fn disjoint_icospheres_are_two_segments() {
        let a = fixtures::icosphere(2, 1.0);
        let b = fixtures::icosphere(2, 0.8);
        let offset = nalgebra::Vector3::new(5.0, 0.0, 0.0);
        let mut vertices = a.vertices.clone();
        vertices.extend(b.vertices.iter().map(|p| p + offset));
        let mut faces = a.faces.clone();
        let base = a.vertex_count() as u32;
        faces.extend(b.faces.iter().map(|f| [f[0] + base, f[1] + base, f[2] + base]));
        let labels = segment_fixture(&TriMesh::new(vertices, faces), 0.7);
        assert_eq!(labels.segment_count, 2);
        assert!(boundary_faces(&labels).is_empty());
    }

    #[test]
    fn lowest_threshold_floods_connected_mesh() {
        let labels = segment_fixture(&fixtures::icosphere(2, 1.0), -2.0);
        assert_eq!(labels.segment_count, 1);
        assert!(boundary_faces(&labels).is_empty());
    }

    #[test]
    fn highest_threshold_gives_singleton_segments() {
        let labels = segment_fixture(&fixtures::icosphere(2, 1.0), 2.0);
        for size in labels.segment_sizes() {
            assert_eq!(size, 1);
        }
    }

    #[test]
    fn boundary_faces_are_sorted() {
        let labels = SegmentLabels {
            labels: vec![
                FaceLabel::Segment(0),
                FaceLabel::Boundary,
                FaceLabel::Segment(0),
                FaceLabel::Segment(1),
                FaceLabel::Boundary,
            ],
            segment_count: 2,
        };
        assert_eq!(boundary_faces(&labels), vec![1, 4]);
    }

    #[test]
    fn filter_with_min_one_is_identity() {
        let labels = segment_fixture(&fixtures::icosphere(1, 1.0), 0.7);
        assert_eq!(filter_segments(&labels, 1), labels);
    }

    #[test]
    fn filter_drops_small_segments_and_compacts_ids() {
        let mut labels = vec![FaceLabel::Segment(0); 100];
        labels.extend(vec![FaceLabel::Segment(1); 2]);
        let labels = SegmentLabels {
            labels,
            segment_count: 2,
        };
        let filtered = filter_segments(&labels, 10);
        assert_eq!(filtered.segment_count, 1);
        assert_eq!(filtered.segment_sizes(), vec![100]);
        assert_eq!(boundary_faces(&filtered).len(), 2);
    }

    #[test]
    fn degenerate_faces_are_premarked_boundary() {
        // A proper triangle beside a zero-area sliver (vertex 3 lies on the
        // shared edge).
        let mesh = TriMesh::new(
            vec![
                [0.0, 0.0, 0.0].into(),
                [1.0, 0.0, 0.0].into(),
                [0.0, 1.0, 0.0].into(),
                [0.5, 0.5, 0.0].into(),
            ],
            vec![[0, 1, 2], [1, 3, 2]],
        );
        let labels = segment_fixture(&mesh, -2.0);
        assert_eq!(labels.labels[1], FaceLabel::Boundary);
        assert_eq!(labels.segment_count, 1);
    }
}
