use nalgebra::{Matrix4, Point3, Vector2};

use super::{CameraView, SfmError};

/// Linear (DLT) two-view triangulation: the least-squares homogeneous point
/// minimizing algebraic error across both views' projection constraints.
pub fn triangulate(
    view_a: &CameraView,
    view_b: &CameraView,
    pixel_a: &Vector2<f64>,
    pixel_b: &Vector2<f64>,
) -> Result<Point3<f64>, SfmError> {
    if (view_a.center() - view_b.center()).norm() <= 1e-9 {
        return Err(SfmError::DegenerateBaseline);
    }

    let mut a = Matrix4::zeros();
    for (row_base, (view, pixel)) in [(view_a, pixel_a), (view_b, pixel_b)].iter().enumerate() {
        let p = view.matrix();
        for col in 0..4 {
            a[(2 * row_base, col)] = pixel.x * p[(2, col)] - p[(0, col)];
            a[(2 * row_base + 1, col)] = pixel.y * p[(2, col)] - p[(1, col)];
        }
    }

    // Null direction of A: right singular vector of the smallest singular
    // value.
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let mut min_idx = 0;
    for i in 1..4 {
        if svd.singular_values[i] < svd.singular_values[min_idx] {
            min_idx = i;
        }
    }
    let h = v_t.row(min_idx);
    let w = h[3];
    if w.abs() <= 1e-15 {
        return Err(SfmError::PointAtInfinity);
    }
    Ok(Point3::new(h[0] / w, h[1] / w, h[2] / w))
}
