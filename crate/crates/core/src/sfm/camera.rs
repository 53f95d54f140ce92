use nalgebra::{Matrix3, Matrix3x4, Point3, Rotation3, Vector2, Vector3};

use super::SfmError;

/// Depth magnitudes at or below this count as "on the principal plane".
pub const DEPTH_EPS: f64 = 1e-12;

/// Finite pinhole camera as a 3x4 projection matrix, encoding intrinsic
/// calibration, orientation, and translation in one map from homogeneous
/// world points to homogeneous pixels.
///
/// The calibration/rotation/translation split is kept alongside the matrix:
/// exact when the camera was built from one, recovered by RQ decomposition
/// when the camera came from a raw matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraView {
    matrix: Matrix3x4<f64>,
    intrinsics: Matrix3<f64>,
    rotation: Rotation3<f64>,
    translation: Vector3<f64>,
}

impl CameraView {
    /// Wrap a projection matrix; the left 3x3 block must be nonsingular
    /// (finite camera).
    pub fn new(matrix: Matrix3x4<f64>) -> Result<Self, SfmError> {
        let det = matrix.fixed_view::<3, 3>(0, 0).determinant();
        if det.abs() <= 1e-12 {
            return Err(SfmError::SingularCamera(det.abs()));
        }
        let (intrinsics, rotation, translation) = rq_decompose(&matrix);
        Ok(Self {
            matrix,
            intrinsics,
            rotation,
            translation,
        })
    }

    /// Build from calibration, rotation (world to camera), and translation.
    pub fn from_krt(
        intrinsics: &Matrix3<f64>,
        rotation: &Rotation3<f64>,
        translation: &Vector3<f64>,
    ) -> Result<Self, SfmError> {
        let mut matrix = Matrix3x4::zeros();
        matrix
            .fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&(intrinsics * rotation.matrix()));
        matrix
            .fixed_view_mut::<3, 1>(0, 3)
            .copy_from(&(intrinsics * translation));
        let det = matrix.fixed_view::<3, 3>(0, 0).determinant();
        if det.abs() <= 1e-12 {
            return Err(SfmError::SingularCamera(det.abs()));
        }
        Ok(Self {
            matrix,
            intrinsics: *intrinsics,
            rotation: *rotation,
            translation: *translation,
        })
    }

    pub fn matrix(&self) -> &Matrix3x4<f64> {
        &self.matrix
    }

    /// Camera center in world coordinates (the null direction of P).
    pub fn center(&self) -> Point3<f64> {
        let m = self.matrix.fixed_view::<3, 3>(0, 0);
        let p4 = self.matrix.column(3);
        let c = -m.try_inverse().expect("checked nonsingular at construction") * p4;
        Point3::from(c)
    }

    /// Project a world point: homogeneous multiply, then perspective divide.
    pub fn project(&self, point: &Point3<f64>) -> Result<Vector2<f64>, SfmError> {
        let h = self.matrix * point.to_homogeneous();
        if h.z.abs() <= DEPTH_EPS {
            return Err(SfmError::PointAtInfinity);
        }
        Ok(Vector2::new(h.x / h.z, h.y / h.z))
    }

    /// Homogeneous depth of a point (third coordinate before the divide).
    pub fn depth(&self, point: &Point3<f64>) -> f64 {
        (self.matrix * point.to_homogeneous()).z
    }

    /// Intrinsics (upper triangular, positive diagonal, unit lower-right),
    /// rotation, and translation.
    pub fn decompose(&self) -> (Matrix3<f64>, Rotation3<f64>, Vector3<f64>) {
        (self.intrinsics, self.rotation, self.translation)
    }

    /// Camera center in world coordinates, from the cached pose.
    pub fn center_from_pose(&self) -> Point3<f64> {
        Point3::from(-(self.rotation.inverse() * self.translation))
    }

    /// Camera at `eye` looking at `target` with z-up image orientation.
    pub fn look_at(
        intrinsics: &Matrix3<f64>,
        eye: &Point3<f64>,
        target: &Point3<f64>,
    ) -> Result<Self, SfmError> {
        let forward = (target - eye).normalize();
        let up = Vector3::z();
        let right = forward.cross(&up);
        let right_norm = right.norm();
        assert!(
            right_norm > 1e-9,
            "viewing direction is parallel to the up axis"
        );
        let right = right / right_norm;
        let down = forward.cross(&right);
        let rotation = Rotation3::from_matrix_unchecked(Matrix3::from_rows(&[
            right.transpose(),
            down.transpose(),
            forward.transpose(),
        ]));
        let translation = -(rotation * eye.coords);
        Self::from_krt(intrinsics, &rotation, &translation)
    }
}

/// RQ decomposition of the left 3x3 block: P = K [R | t] with K upper
/// triangular (positive diagonal, normalized lower-right) and R a proper
/// rotation. Computed via QR of the row-reversed transpose.
fn rq_decompose(matrix: &Matrix3x4<f64>) -> (Matrix3<f64>, Rotation3<f64>, Vector3<f64>) {
    // Fix the overall projective sign so the rotation comes out proper.
    let mut p = *matrix;
    if p.fixed_view::<3, 3>(0, 0).determinant() < 0.0 {
        p = -p;
    }
    let m: Matrix3<f64> = p.fixed_view::<3, 3>(0, 0).into_owned();

    let flip = Matrix3::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0);
    let qr = (flip * m).transpose().qr();
    let (q_b, r_b) = (qr.q(), qr.r());
    let mut k = flip * r_b.transpose() * flip;
    let mut r = flip * q_b.transpose();

    // Make the calibration diagonal positive.
    let signs = Vector3::new(k.m11.signum(), k.m22.signum(), k.m33.signum());
    let s = Matrix3::from_diagonal(&signs);
    k *= s;
    r = s * r;

    let k_inv = k.try_inverse().expect("nonsingular calibration");
    let t = k_inv * p.column(3);
    let k = k / k.m33;
    (k, Rotation3::from_matrix_unchecked(r), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn canonical() -> CameraView {
        let mut p = Matrix3x4::zeros();
        p.fixed_view_mut::<3, 3>(0, 0).copy_from(&Matrix3::identity());
        CameraView::new(p).unwrap()
    }

    #[test]
    fn canonical_camera_projects_the_optical_axis_to_origin() {
        let cam = canonical();
        let pix = cam.project(&Point3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(pix, Vector2::new(0.0, 0.0));
    }

    #[test]
    fn perspective_division() {
        let cam = canonical();
        let pix = cam.project(&Point3::new(2.0, 4.0, 2.0)).unwrap();
        assert_eq!(pix, Vector2::new(1.0, 2.0));
    }

    #[test]
    fn principal_plane_is_rejected() {
        let cam = canonical();
        assert_eq!(
            cam.project(&Point3::new(1.0, 1.0, 0.0)),
            Err(SfmError::PointAtInfinity)
        );
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let mut p = Matrix3x4::zeros();
        p[(0, 0)] = 1.0;
        p[(1, 1)] = 1.0;
        assert!(matches!(
            CameraView::new(p),
            Err(SfmError::SingularCamera(_))
        ));
    }

    #[test]
    fn projection_matches_explicit_homogeneous_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let mut p = Matrix3x4::zeros();
            for r in 0..3 {
                for c in 0..4 {
                    p[(r, c)] = rng.random_range(-2.0..2.0);
                }
            }
            let Ok(cam) = CameraView::new(p) else {
                continue;
            };
            let point = Point3::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            );
            let h = p * point.to_homogeneous();
            if h.z.abs() <= DEPTH_EPS {
                continue;
            }
            let pix = cam.project(&point).unwrap();
            assert_relative_eq!(pix.x, h.x / h.z, epsilon = 1e-12);
            assert_relative_eq!(pix.y, h.y / h.z, epsilon = 1e-12);
        }
    }

    #[test]
    fn decompose_recovers_krt() {
        let k = Matrix3::new(2600.0, 0.0, 1200.0, 0.0, 2600.0, 1500.0, 0.0, 0.0, 1.0);
        let rotation = Rotation3::from_scaled_axis(Vector3::new(0.3, -0.2, 0.9));
        let translation = Vector3::new(0.4, -1.2, 5.0);
        let cam = CameraView::from_krt(&k, &rotation, &translation).unwrap();
        let (k2, r2, t2) = cam.decompose();
        assert_relative_eq!(k2, k, epsilon = 1e-8);
        assert_relative_eq!(r2.matrix(), rotation.matrix(), epsilon = 1e-10);
        assert_relative_eq!(t2, translation, epsilon = 1e-8);
        assert_relative_eq!(r2.matrix().determinant(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn look_at_points_the_optical_axis_at_the_target() {
        let k = Matrix3::identity();
        let eye = Point3::new(4.0, -2.0, 3.0);
        let target = Point3::new(0.5, 0.5, 0.5);
        let cam = CameraView::look_at(&k, &eye, &target).unwrap();
        // The target projects to the principal point (0, 0) for identity K.
        let pix = cam.project(&target).unwrap();
        assert_relative_eq!(pix.norm(), 0.0, epsilon = 1e-9);
        assert!(cam.depth(&target) > 0.0);
        assert_relative_eq!(cam.center(), eye, epsilon = 1e-9);
    }
}
