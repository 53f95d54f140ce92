//! Property tests over the geometric invariants that hold for arbitrary
//! inputs, not just the named fixtures.

use granulite::fixtures;
use granulite::geometry::{PointCloud, TriMesh};
use granulite::io;
use nalgebra::{Point3, Rotation3, Vector3};
use proptest::prelude::*;

fn arb_point() -> impl Strategy<Value = Point3<f64>> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn arb_rotation() -> impl Strategy<Value = Rotation3<f64>> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(x, y, z)| Rotation3::from_scaled_axis(Vector3::new(x, y, z)))
}

/// Two triangles sharing an edge, both non-degenerate.
fn arb_adjacent_pair() -> impl Strategy<Value = TriMesh> {
    (arb_point(), arb_point(), arb_point(), arb_point())
        .prop_map(|(a, b, c, d)| TriMesh::new(vec![a, b, c, d], vec![[0, 1, 2], [1, 3, 2]]))
        .prop_filter("non-degenerate", |mesh| {
            !mesh.is_degenerate(0)
                && !mesh.is_degenerate(1)
                && (mesh.face_centroid(0) - mesh.face_centroid(1)).norm() > 1e-6
        })
}

proptest! {
    #[test]
    fn center_difference_is_antisymmetric(mesh in arb_adjacent_pair()) {
        let forward = mesh.center_difference(0, 1).unwrap();
        let backward = mesh.center_difference(1, 0).unwrap();
        prop_assert!((forward + backward).norm() < 1e-15);
    }

    #[test]
    fn rigid_motion_rotates_normals_and_maps_centroids(
        mesh in arb_adjacent_pair(),
        rotation in arb_rotation(),
        shift in (-100.0..100.0f64, -100.0..100.0f64, -100.0..100.0f64),
    ) {
        let shift = Vector3::new(shift.0, shift.1, shift.2);
        let moved = mesh.transformed(&rotation, &shift);
        for f in 0..2 {
            let n = mesh.face_normal(f).unwrap();
            let n_moved = moved.face_normal(f).unwrap();
            prop_assert!((rotation * n - n_moved).norm() < 1e-10);
            let c = mesh.face_centroid(f);
            let c_moved = moved.face_centroid(f);
            prop_assert!((rotation * c + shift - c_moved).norm() < 1e-10);
        }
    }

    #[test]
    fn uniform_scaling_preserves_normals_and_center_differences(
        mesh in arb_adjacent_pair(),
        scale in 1e-3..1e3f64,
    ) {
        let scaled = mesh.scaled(scale);
        for f in 0..2 {
            let n = mesh.face_normal(f).unwrap();
            let n_scaled = scaled.face_normal(f).unwrap();
            prop_assert!((n - n_scaled).norm() < 1e-10);
        }
        let c = mesh.center_difference(0, 1).unwrap();
        let c_scaled = scaled.center_difference(0, 1).unwrap();
        prop_assert!((c - c_scaled).norm() < 1e-10);
    }

    #[test]
    fn binary_ply_cloud_roundtrip_is_bit_exact(
        seed in 0u64..1000,
        count in 1usize..200,
        with_normals in any::<bool>(),
        with_colors in any::<bool>(),
    ) {
        let base = fixtures::sphere_cloud(count, seed);
        let cloud = PointCloud {
            positions: base.positions.clone(),
            normals: with_normals.then(|| base.normals.clone().unwrap()),
            colors: with_colors.then(|| {
                base.positions
                    .iter()
                    .enumerate()
                    .map(|(i, _)| [(i % 256) as u8, (i * 7 % 256) as u8, (i * 13 % 256) as u8])
                    .collect()
            }),
        };
        let path = std::env::temp_dir().join(format!(
            "granulite-prop-{}-{seed}-{count}.ply",
            std::process::id()
        ));
        io::write_ply_cloud(&cloud, &path, io::PlyFormat::BinaryLittleEndian).unwrap();
        let read = io::read_ply(&path).unwrap();
        std::fs::remove_file(&path).ok();
        match read.data {
            io::PlyData::Cloud(read) => prop_assert_eq!(read, cloud),
            io::PlyData::Mesh(_) => prop_assert!(false, "expected a cloud"),
        }
    }
}
