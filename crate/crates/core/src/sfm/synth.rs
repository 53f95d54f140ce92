use nalgebra::{Matrix3, Point3, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::scene::{Observation, SceneEstimate};
use super::{CameraView, SfmError};

/// Synthetic capture: cameras on a ring at varying heights, all aimed at the
/// centroid of a random point blob, mirroring a walk around a stockpile with
/// a phone camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSceneSpec {
    pub cameras: usize,
    pub points: usize,
    /// Half-extents of the uniform point blob.
    pub extents: Vector3<f64>,
    pub ring_radius: f64,
    /// Camera heights interpolate across this range around the ring.
    pub height_range: (f64, f64),
    /// Standard deviation of the pixel noise; 0 disables it.
    pub pixel_noise_sigma: f64,
    pub seed: u64,
}

impl Default for SynthSceneSpec {
    fn default() -> Self {
        Self {
            cameras: 5,
            points: 50,
            extents: Vector3::new(1.0, 1.0, 0.6),
            ring_radius: 5.0,
            height_range: (1.5, 3.5),
            pixel_noise_sigma: 0.0,
            seed: 0,
        }
    }
}

/// Shared intrinsics for the synthetic camera (2400x3000 sensor).
pub(crate) fn default_intrinsics() -> Matrix3<f64> {
    Matrix3::new(2600.0, 0.0, 1200.0, 0.0, 2600.0, 1500.0, 0.0, 0.0, 1.0)
}

/// Generate a ground-truth scene and its observations. Deterministic for a
/// given seed; observations cover every (camera, point) pair with positive
/// depth.
pub fn synth_scene(spec: &SynthSceneSpec) -> Result<(SceneEstimate, Vec<Observation>), SfmError> {
    if spec.cameras < 2 {
        return Err(SfmError::InsufficientObservations(format!(
            "need at least 2 cameras, got {}",
            spec.cameras
        )));
    }
    if spec.points < 6 {
        return Err(SfmError::InsufficientObservations(format!(
            "need at least 6 points, got {}",
            spec.points
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let points: Vec<Point3<f64>> = (0..spec.points)
        .map(|_| {
            Point3::new(
                rng.random_range(-spec.extents.x..spec.extents.x),
                rng.random_range(-spec.extents.y..spec.extents.y),
                rng.random_range(-spec.extents.z..spec.extents.z),
            )
        })
        .collect();
    let mut centroid = Vector3::zeros();
    for p in &points {
        centroid += p.coords;
    }
    let target = Point3::from(centroid / points.len() as f64);

    let intrinsics = default_intrinsics();
    let cameras: Vec<CameraView> = (0..spec.cameras)
        .map(|i| {
            let angle = i as f64 / spec.cameras as f64 * std::f64::consts::TAU;
            let s = if spec.cameras > 1 {
                i as f64 / (spec.cameras - 1) as f64
            } else {
                0.5
            };
            let height = spec.height_range.0 + s * (spec.height_range.1 - spec.height_range.0);
            let eye = Point3::new(
                spec.ring_radius * angle.cos(),
                spec.ring_radius * angle.sin(),
                height,
            );
            CameraView::look_at(&intrinsics, &eye, &target)
        })
        .collect::<Result<_, _>>()?;

    let noise = if spec.pixel_noise_sigma > 0.0 {
        Some(Normal::new(0.0, spec.pixel_noise_sigma).expect("positive sigma"))
    } else {
        None
    };
    let mut observations = Vec::with_capacity(spec.cameras * spec.points);
    for (i, cam) in cameras.iter().enumerate() {
        // Project through the pose representation, the same arithmetic the
        // bundle adjuster evaluates, so noiseless scenes cost exactly zero.
        let (k, r, t) = cam.decompose();
        for (j, point) in points.iter().enumerate() {
            let q = r * point.coords + t;
            let h = k * q;
            if h.z <= 1e-9 {
                continue;
            }
            let mut pixel = Vector2::new(h.x / h.z, h.y / h.z);
            if let Some(noise) = &noise {
                pixel += Vector2::new(noise.sample(&mut rng), noise.sample(&mut rng));
            }
            observations.push(Observation {
                camera: i as u32,
                point: j as u32,
                pixel,
            });
        }
    }

    Ok((SceneEstimate { cameras, points }, observations))
}
