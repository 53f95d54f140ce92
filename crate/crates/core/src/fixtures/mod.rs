//! Deterministic synthetic scenes used by tests, benchmarks, and the `synth`
//! CLI subcommand: analytic meshes (tetrahedron, cube, icospheres), sampled
//! point clouds with exact normals, and ball piles standing in for rock
//! stockpiles, with ground-truth particle labels.

mod pile;

pub use pile::{
    ten_ball_cloud, ten_ball_pile, two_ball_cloud, two_ball_pile, Ball, BallPile,
    PILE_CLOUD_DENSITY, PILE_CLOUD_SEED,
};

use nalgebra::{Point3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::collections::HashMap;

use crate::geometry::{PointCloud, TriMesh};

/// Regular tetrahedron centered at the origin, outward CCW faces.
pub fn tetrahedron() -> TriMesh {
    let s = 1.0 / 3f64.sqrt();
    TriMesh::new(
        vec![
            Point3::new(s, s, s),
            Point3::new(s, -s, -s),
            Point3::new(-s, s, -s),
            Point3::new(-s, -s, s),
        ],
        vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]],
    )
}

/// Axis-aligned unit cube [0,1]^3 as 12 outward CCW triangles.
///
/// Opposite faces are triangulated along mirrored diagonals so the
/// area-weighted centroid covariance stays isotropic.
pub fn unit_cube() -> TriMesh {
    let vertices = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(1.0, 1.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
        Point3::new(0.0, 0.0, 1.0),
        Point3::new(1.0, 0.0, 1.0),
        Point3::new(1.0, 1.0, 1.0),
        Point3::new(0.0, 1.0, 1.0),
    ];
    let faces = vec![
        [0, 3, 2],
        [0, 2, 1], // bottom
        [4, 5, 7],
        [5, 6, 7], // top
        [0, 4, 7],
        [0, 7, 3], // x = 0
        [1, 2, 5],
        [2, 6, 5], // x = 1
        [0, 1, 5],
        [0, 5, 4], // y = 0
        [3, 7, 2],
        [7, 6, 2], // y = 1
    ];
    TriMesh::new(vertices, faces)
}

/// Icosphere: a regular icosahedron subdivided `subdivisions` times, with all
/// vertices projected onto the sphere of the given radius. Face count is
/// `20 * 4^subdivisions`.
pub fn icosphere(subdivisions: u32, radius: f64) -> TriMesh {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let mut vertices: Vec<Point3<f64>> = raw
        .iter()
        .map(|&(x, y, z)| {
            let v = Vector3::new(x, y, z);
            Point3::from(v / v.norm() * radius)
        })
        .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next_faces = Vec::with_capacity(faces.len() * 4);
        for face in &faces {
            let mid = |vertices: &mut Vec<Point3<f64>>,
                       midpoints: &mut HashMap<(u32, u32), u32>,
                       a: u32,
                       b: u32|
             -> u32 {
                let key = (a.min(b), a.max(b));
                *midpoints.entry(key).or_insert_with(|| {
                    let m = (vertices[a as usize].coords + vertices[b as usize].coords) / 2.0;
                    let idx = vertices.len() as u32;
                    vertices.push(Point3::from(m / m.norm() * radius));
                    idx
                })
            };
            let [v0, v1, v2] = *face;
            let a = mid(&mut vertices, &mut midpoints, v0, v1);
            let b = mid(&mut vertices, &mut midpoints, v1, v2);
            let c = mid(&mut vertices, &mut midpoints, v2, v0);
            next_faces.push([v0, a, c]);
            next_faces.push([v1, b, a]);
            next_faces.push([v2, c, b]);
            next_faces.push([a, b, c]);
        }
        faces = next_faces;
    }
    TriMesh::new(vertices, faces)
}

/// Icosphere scaled componentwise into an axis-aligned ellipsoid with
/// semi-axes (a, b, c).
pub fn ellipsoid(a: f64, b: f64, c: f64, subdivisions: u32) -> TriMesh {
    let mut mesh = icosphere(subdivisions, 1.0);
    for v in &mut mesh.vertices {
        v.x *= a;
        v.y *= b;
        v.z *= c;
    }
    mesh
}

/// Uniform samples of the unit sphere with exact radial normals.
/// Deterministic for a given seed.
pub fn sphere_cloud(count: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions = Vec::with_capacity(count);
    let mut normals = Vec::with_capacity(count);
    while positions.len() < count {
        let x: f64 = StandardNormal.sample(&mut rng);
        let y: f64 = StandardNormal.sample(&mut rng);
        let z: f64 = StandardNormal.sample(&mut rng);
        let v = Vector3::new(x, y, z);
        let norm = v.norm();
        if norm < 1e-6 {
            continue;
        }
        let dir = v / norm;
        positions.push(Point3::from(dir));
        normals.push(dir);
    }
    PointCloud {
        positions,
        normals: Some(normals),
        colors: None,
    }
}
