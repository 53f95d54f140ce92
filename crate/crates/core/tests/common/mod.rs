//! Shared oracles for the acceptance suite, independent of the library's
//! implementation paths.

use std::collections::HashMap;

use granulite::geometry::TriMesh;
use granulite::segment::{CriterionParams, FaceLabel, SegmentLabels};
use nalgebra::{Matrix3, Point3, Vector3};

/// Umeyama similarity alignment: the (scale, rotation, translation) mapping
/// `source` onto `target` with least squares, and the relative residual
/// after alignment (RMS error over RMS target spread).
pub fn procrustes_residual(source: &[Point3<f64>], target: &[Point3<f64>]) -> f64 {
    assert_eq!(source.len(), target.len());
    let n = source.len() as f64;
    let mean = |pts: &[Point3<f64>]| -> Vector3<f64> {
        pts.iter().map(|p| p.coords).sum::<Vector3<f64>>() / n
    };
    let mu_s = mean(source);
    let mu_t = mean(target);

    let mut cross = Matrix3::zeros();
    let mut var_s = 0.0;
    for (s, t) in source.iter().zip(target) {
        let ds = s.coords - mu_s;
        let dt = t.coords - mu_t;
        cross += dt * ds.transpose();
        var_s += ds.norm_squared();
    }
    cross /= n;
    var_s /= n;

    let svd = cross.svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut s_fix = Matrix3::identity();
    if (u * v_t).determinant() < 0.0 {
        s_fix[(2, 2)] = -1.0;
    }
    let rotation = u * s_fix * v_t;
    let scale = (svd.singular_values[0]
        + svd.singular_values[1] * s_fix[(1, 1)]
        + svd.singular_values[2] * s_fix[(2, 2)])
        / var_s;
    let translation = mu_t - rotation * mu_s * scale;

    let mut err2 = 0.0;
    let mut spread2 = 0.0;
    for (s, t) in source.iter().zip(target) {
        let mapped = rotation * s.coords * scale + translation;
        err2 += (mapped - t.coords).norm_squared();
        spread2 += (t.coords - mu_t).norm_squared();
    }
    (err2 / spread2.max(1e-300)).sqrt()
}

/// Reference segmentation: the same rules as the library (seed order, FIFO,
/// ascending neighbors, terminal rejection marks, degenerate pre-marks,
/// band-locked run absorption) written independently with no shared helpers
/// and a brute-force adjacency.
pub fn naive_segment_reference(mesh: &TriMesh, params: &CriterionParams) -> SegmentLabels {
    let nf = mesh.faces.len();
    // O(F^2) adjacency: neighbors share exactly two vertices.
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); nf];
    for i in 0..nf {
        for j in (i + 1)..nf {
            let shared = mesh.faces[i]
                .iter()
                .filter(|v| mesh.faces[j].contains(v))
                .count();
            if shared == 2 {
                neighbors[i].push(j as u32);
                neighbors[j].push(i as u32);
            }
        }
    }
    for list in &mut neighbors {
        list.sort_unstable();
    }

    let centroid = |f: usize| -> Vector3<f64> {
        let [a, b, c] = mesh.faces[f];
        (mesh.vertices[a as usize].coords
            + mesh.vertices[b as usize].coords
            + mesh.vertices[c as usize].coords)
            / 3.0
    };
    let normal = |f: usize| -> Option<Vector3<f64>> {
        let [a, b, c] = mesh.faces[f];
        let e0 = mesh.vertices[b as usize] - mesh.vertices[a as usize];
        let e1 = mesh.vertices[c as usize] - mesh.vertices[a as usize];
        let e2 = mesh.vertices[c as usize] - mesh.vertices[b as usize];
        let cross = e0.cross(&e1);
        let scale = e0.norm_squared().max(e1.norm_squared()).max(e2.norm_squared());
        if cross.norm() <= 1e-12 * scale {
            None
        } else {
            Some(cross.normalize())
        }
    };

    const UNASSIGNED: i64 = -2;
    const BOUNDARY: i64 = -1;
    let mut label = vec![UNASSIGNED; nf];
    let mut rejected_by: Vec<Option<usize>> = vec![None; nf];
    for (f, slot) in label.iter_mut().enumerate() {
        if normal(f).is_none() {
            *slot = BOUNDARY;
        }
    }

    let mut segment_count: i64 = 0;
    for (run, seed) in (0..nf).enumerate() {
        if label[seed] != UNASSIGNED {
            continue;
        }
        let mut queue = vec![seed];
        let mut head = 0;
        let mut visited = vec![seed];
        label[seed] = segment_count;
        let mut walled_in = false;
        while head < queue.len() {
            let current = queue[head];
            head += 1;
            let n_cur = normal(current).unwrap();
            for &next in &neighbors[current] {
                let next = next as usize;
                if label[next] == BOUNDARY {
                    walled_in |= matches!(rejected_by[next], Some(r) if r != run);
                    continue;
                }
                if label[next] != UNASSIGNED {
                    continue;
                }
                let n_next = normal(next).unwrap();
                // Center difference pointing from the neighbor's centroid
                // back toward the current face.
                let c = (centroid(current) - centroid(next)).normalize();
                if (c + n_next).dot(&n_cur) > params.threshold {
                    label[next] = segment_count;
                    queue.push(next);
                    visited.push(next);
                } else {
                    label[next] = BOUNDARY;
                    rejected_by[next] = Some(run);
                }
            }
        }
        let band_locked = walled_in
            && visited
                .iter()
                .all(|&f| neighbors[f].iter().any(|&n| rejected_by[n as usize].is_some()));
        if band_locked {
            for &f in &visited {
                label[f] = BOUNDARY;
                rejected_by[f] = Some(run);
            }
        } else {
            segment_count += 1;
        }
    }

    SegmentLabels {
        labels: label
            .into_iter()
            .map(|l| {
                if l == BOUNDARY {
                    FaceLabel::Boundary
                } else {
                    FaceLabel::Segment(l as u32)
                }
            })
            .collect(),
        segment_count: segment_count as u32,
    }
}

/// Check that the ten largest segments map one-to-one onto the ground-truth
/// balls with at least `min_majority` face agreement. Returns the matched
/// (segment, ball, majority) triples.
pub fn ball_agreement(
    labels: &SegmentLabels,
    truth: &[u32],
    ball_count: usize,
    min_majority: f64,
) -> Result<Vec<(u32, u32, f64)>, String> {
    if labels.segment_count as usize != ball_count {
        return Err(format!(
            "{} segments for {ball_count} balls",
            labels.segment_count
        ));
    }
    let mut seen = vec![false; ball_count];
    let mut result = Vec::new();
    for s in 0..labels.segment_count {
        let faces = labels.segment_faces(s);
        if faces.is_empty() {
            return Err(format!("segment {s} is empty"));
        }
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for &f in &faces {
            *counts.entry(truth[f as usize]).or_insert(0) += 1;
        }
        let (&ball, &majority) = counts.iter().max_by_key(|(_, c)| **c).unwrap();
        let fraction = majority as f64 / faces.len() as f64;
        if fraction < min_majority {
            return Err(format!(
                "segment {s} majority {fraction:.3} below {min_majority}"
            ));
        }
        if seen[ball as usize] {
            return Err(format!("ball {ball} matched by two segments"));
        }
        seen[ball as usize] = true;
        result.push((s, ball, fraction));
    }
    Ok(result)
}
