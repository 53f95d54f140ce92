use nalgebra::{
    DMatrix, DVector, Matrix2x3, Matrix3, Point3, Rotation3, SMatrix, Vector2, Vector3,
};

use super::scene::{Observation, SceneEstimate};
use super::{CameraView, SfmError};

/// Levenberg-Marquardt options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaOptions {
    pub max_iterations: usize,
    /// Terminate when the max-norm of the cost gradient drops below this.
    pub gtol: f64,
    /// Terminate when the relative cost decrease of an accepted step drops
    /// below this.
    pub ftol: f64,
    pub lambda_init: f64,
    pub lambda_factor: f64,
    pub lambda_max: f64,
}

impl Default for BaOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            gtol: 1e-10,
            ftol: 1e-12,
            lambda_init: 1e-3,
            lambda_factor: 10.0,
            lambda_max: 1e10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    /// Gradient max-norm below `gtol`.
    GradientTolerance,
    /// Relative cost decrease below `ftol`, or damping exhausted without an
    /// acceptable step.
    CostTolerance,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub iterations: usize,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub termination: TerminationReason,
    /// Cost after each accepted step (starting with the initial cost).
    pub cost_history: Vec<f64>,
}

/// Internal pose-and-calibration state. Intrinsics stay fixed; rotation and
/// translation are the optimization variables per camera.
struct State {
    intrinsics: Vec<Matrix3<f64>>,
    rotations: Vec<Rotation3<f64>>,
    translations: Vec<Vector3<f64>>,
    points: Vec<Point3<f64>>,
}

impl State {
    fn from_estimate(estimate: &SceneEstimate) -> Self {
        let mut intrinsics = Vec::new();
        let mut rotations = Vec::new();
        let mut translations = Vec::new();
        for cam in &estimate.cameras {
            let (k, r, t) = cam.decompose();
            intrinsics.push(k);
            rotations.push(r);
            translations.push(t);
        }
        Self {
            intrinsics,
            rotations,
            translations,
            points: estimate.points.clone(),
        }
    }

    fn to_estimate(&self) -> SceneEstimate {
        SceneEstimate {
            cameras: self
                .intrinsics
                .iter()
                .zip(&self.rotations)
                .zip(&self.translations)
                .map(|((k, r), t)| CameraView::from_krt(k, r, t).expect("finite camera"))
                .collect(),
            points: self.points.clone(),
        }
    }

    fn center(&self, cam: usize) -> Point3<f64> {
        Point3::from(-(self.rotations[cam].inverse() * self.translations[cam]))
    }

    /// Residual (observed minus projected) for one observation, or None on a
    /// vanishing depth.
    fn residual(&self, obs: &Observation) -> Option<Vector2<f64>> {
        let i = obs.camera as usize;
        let q = self.rotations[i] * self.points[obs.point as usize].coords + self.translations[i];
        let h = self.intrinsics[i] * q;
        if h.z.abs() <= super::camera::DEPTH_EPS {
            return None;
        }
        Some(obs.pixel - Vector2::new(h.x / h.z, h.y / h.z))
    }

    fn cost(&self, observations: &[Observation]) -> Result<f64, SfmError> {
        let mut total = 0.0;
        for obs in observations {
            let r = self
                .residual(obs)
                .ok_or(SfmError::ObservationAtInfinity {
                    camera: obs.camera,
                    point: obs.point,
                })?;
            total += r.norm_squared();
        }
        Ok(total)
    }

    /// Rescale points and camera centers about camera 0 so the baseline to
    /// camera 1 keeps its original length. A similarity applied to the whole
    /// scene leaves every reprojection unchanged, so this pins the free
    /// scale without touching the cost.
    fn normalize_scale(&mut self, baseline: f64) {
        let c0 = self.center(0);
        let current = (self.center(1) - c0).norm();
        if current <= 1e-12 {
            return;
        }
        let scale = baseline / current;
        for i in 1..self.rotations.len() {
            let c = c0 + (self.center(i) - c0) * scale;
            self.translations[i] = -(self.rotations[i] * c.coords);
        }
        for p in &mut self.points {
            *p = c0 + (*p - c0) * scale;
        }
    }
}

/// Analytic residual Jacobian for one observation: the residual itself, the
/// 2x6 block with respect to the camera increment (left axis-angle rotation
/// increment, then translation), and the 2x3 block with respect to the
/// point. Exposed for derivative checking against finite differences.
pub fn residual_jacobian(
    estimate: &SceneEstimate,
    obs: &Observation,
) -> Option<(Vector2<f64>, SMatrix<f64, 2, 6>, Matrix2x3<f64>)> {
    let state = State::from_estimate(estimate);
    jacobian_blocks(&state, obs)
}

/// Per-observation Jacobian blocks of the residual with respect to the
/// camera increment (rotation as a left axis-angle increment, translation)
/// and the point.
fn jacobian_blocks(
    state: &State,
    obs: &Observation,
) -> Option<(Vector2<f64>, SMatrix<f64, 2, 6>, Matrix2x3<f64>)> {
    let i = obs.camera as usize;
    let k = &state.intrinsics[i];
    let rx = state.rotations[i] * state.points[obs.point as usize].coords;
    let q = rx + state.translations[i];
    let h = k * q;
    if h.z.abs() <= super::camera::DEPTH_EPS {
        return None;
    }
    let (u, v, w) = (h.x / h.z, h.y / h.z, h.z);
    let residual = obs.pixel - Vector2::new(u, v);

    // d(pixel)/d(q), with pixel = ((Kq)_x / (Kq)_z, (Kq)_y / (Kq)_z).
    let mut pix_q = Matrix2x3::zeros();
    for col in 0..3 {
        pix_q[(0, col)] = (k[(0, col)] - u * k[(2, col)]) / w;
        pix_q[(1, col)] = (k[(1, col)] - v * k[(2, col)]) / w;
    }

    // q = exp(dw) R X + t + dt: dq/d(dw) = -[RX]x, dq/dt = I, dq/dX = R.
    let rx_hat = skew(&rx);
    let mut cam_block = SMatrix::<f64, 2, 6>::zeros();
    cam_block
        .fixed_view_mut::<2, 3>(0, 0)
        .copy_from(&(pix_q * rx_hat)); // -(-pix_q * [RX]x) with the residual sign
    cam_block
        .fixed_view_mut::<2, 3>(0, 3)
        .copy_from(&(-pix_q));
    let point_block = -pix_q * state.rotations[i].matrix();
    Some((residual, cam_block, point_block))
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Refine cameras and points by Levenberg-Marquardt on the total
/// reprojection error, eliminating point blocks through the Schur
/// complement. Camera 0 is frozen and the camera 0 to camera 1 distance
/// pins the free gauge scale.
pub fn bundle_adjust(
    initial: &SceneEstimate,
    observations: &[Observation],
    options: &BaOptions,
) -> Result<(SceneEstimate, ConvergenceReport), SfmError> {
    initial.check_observations(observations)?;
    check_coverage(initial, observations)?;
    if initial.cameras.len() < 2 {
        return Err(SfmError::InsufficientObservations(
            "need at least 2 cameras to fix the gauge".into(),
        ));
    }

    let mut state = State::from_estimate(initial);
    let baseline = (state.center(1) - state.center(0)).norm();
    if baseline <= 1e-12 {
        return Err(SfmError::DegenerateBaseline);
    }

    let free_cams = state.rotations.len() - 1; // camera 0 frozen
    let n_points = state.points.len();
    let mut cost = state.cost(observations)?;
    let initial_cost = cost;
    let mut cost_history = vec![cost];
    let mut lambda = options.lambda_init;
    let mut iterations = 0;
    let mut termination = TerminationReason::MaxIterations;

    while iterations < options.max_iterations {
        // Assemble the normal equations in camera/point block form.
        let mut u_blocks = vec![SMatrix::<f64, 6, 6>::zeros(); free_cams];
        let mut v_blocks = vec![Matrix3::<f64>::zeros(); n_points];
        let mut g_cam = vec![SMatrix::<f64, 6, 1>::zeros(); free_cams];
        let mut g_point = vec![Vector3::<f64>::zeros(); n_points];
        // One W block per observation of a free camera.
        let mut w_blocks: Vec<(usize, usize, SMatrix<f64, 6, 3>)> = Vec::new();

        for obs in observations {
            let (residual, cam_block, point_block) =
                jacobian_blocks(&state, obs).ok_or(SfmError::ObservationAtInfinity {
                    camera: obs.camera,
                    point: obs.point,
                })?;
            let j = obs.point as usize;
            v_blocks[j] += point_block.transpose() * point_block;
            g_point[j] += point_block.transpose() * residual;
            if obs.camera > 0 {
                let ci = obs.camera as usize - 1;
                u_blocks[ci] += cam_block.transpose() * cam_block;
                g_cam[ci] += cam_block.transpose() * residual;
                w_blocks.push((ci, j, cam_block.transpose() * point_block));
            }
        }

        // Gradient of cost/2 is J^T r; terminate when it is numerically flat.
        let mut grad_max: f64 = 0.0;
        for g in &g_cam {
            grad_max = grad_max.max(g.amax());
        }
        for g in &g_point {
            grad_max = grad_max.max(g.amax());
        }
        if grad_max < options.gtol {
            termination = TerminationReason::GradientTolerance;
            break;
        }

        // Try steps with increasing damping until one decreases the cost.
        let mut step_accepted = false;
        while lambda <= options.lambda_max {
            let solved = solve_damped(
                &u_blocks, &v_blocks, &g_cam, &g_point, &w_blocks, free_cams, n_points, lambda,
            );
            let Some((cam_steps, point_steps)) = solved else {
                lambda *= options.lambda_factor;
                if lambda > options.lambda_max {
                    return Err(SfmError::SingularNormalEquations { lambda });
                }
                continue;
            };

            let mut trial = State {
                intrinsics: state.intrinsics.clone(),
                rotations: state.rotations.clone(),
                translations: state.translations.clone(),
                points: state.points.clone(),
            };
            for (ci, step) in cam_steps.iter().enumerate() {
                let dw = Vector3::new(step[0], step[1], step[2]);
                let dt = Vector3::new(step[3], step[4], step[5]);
                trial.rotations[ci + 1] =
                    Rotation3::from_scaled_axis(dw) * trial.rotations[ci + 1];
                trial.translations[ci + 1] += dt;
            }
            for (p, step) in trial.points.iter_mut().zip(&point_steps) {
                *p += step;
            }
            trial.normalize_scale(baseline);

            let trial_cost = trial.cost(observations)?;
            iterations += 1;
            if trial_cost < cost {
                let decrease = cost - trial_cost;
                state = trial;
                cost = trial_cost;
                cost_history.push(cost);
                lambda = (lambda / options.lambda_factor).max(1e-12);
                step_accepted = true;
                if decrease <= options.ftol * cost.max(f64::MIN_POSITIVE) {
                    termination = TerminationReason::CostTolerance;
                }
                break;
            }
            lambda *= options.lambda_factor;
            if iterations >= options.max_iterations {
                break;
            }
        }

        if !step_accepted {
            if iterations < options.max_iterations {
                // Damping exhausted without progress: the cost cannot be
                // decreased further at this precision.
                termination = TerminationReason::CostTolerance;
            }
            break;
        }
        if termination == TerminationReason::CostTolerance {
            break;
        }
    }

    let report = ConvergenceReport {
        iterations,
        initial_cost,
        final_cost: cost,
        termination,
        cost_history,
    };
    Ok((state.to_estimate(), report))
}

type DampedSolution = (Vec<SMatrix<f64, 6, 1>>, Vec<Vector3<f64>>);

/// Solve the damped normal equations by eliminating the point blocks.
/// Returns None when the reduced camera system is not positive definite.
#[allow(clippy::too_many_arguments)]
fn solve_damped(
    u_blocks: &[SMatrix<f64, 6, 6>],
    v_blocks: &[Matrix3<f64>],
    g_cam: &[SMatrix<f64, 6, 1>],
    g_point: &[Vector3<f64>],
    w_blocks: &[(usize, usize, SMatrix<f64, 6, 3>)],
    free_cams: usize,
    n_points: usize,
    lambda: f64,
) -> Option<DampedSolution> {
    // Marquardt scaling: augment the diagonal proportionally.
    let damp = |d: f64| d + lambda * d.max(1e-12);

    let mut v_inv = Vec::with_capacity(n_points);
    for v in v_blocks {
        let mut damped = *v;
        for d in 0..3 {
            damped[(d, d)] = damp(v[(d, d)]);
        }
        v_inv.push(damped.try_inverse()?);
    }

    let mut schur = DMatrix::<f64>::zeros(6 * free_cams, 6 * free_cams);
    let mut rhs = DVector::<f64>::zeros(6 * free_cams);
    for (ci, u) in u_blocks.iter().enumerate() {
        let mut damped = *u;
        for d in 0..6 {
            damped[(d, d)] = damp(u[(d, d)]);
        }
        schur
            .view_mut((6 * ci, 6 * ci), (6, 6))
            .copy_from(&damped);
        rhs.rows_mut(6 * ci, 6).copy_from(&(-g_cam[ci]));
    }

    // Group W blocks per point to form the off-diagonal Schur products.
    let mut per_point: Vec<Vec<(usize, &SMatrix<f64, 6, 3>)>> = vec![Vec::new(); n_points];
    for (ci, j, w) in w_blocks {
        per_point[*j].push((*ci, w));
    }
    for (j, cams) in per_point.iter().enumerate() {
        for (ci_a, w_a) in cams {
            let wa_vinv = *w_a * v_inv[j];
            // rhs_c -= W V^-1 (-g_p)  => rhs_c += W V^-1 g_p
            let contrib = wa_vinv * g_point[j];
            for (r, val) in contrib.iter().enumerate() {
                rhs[6 * ci_a + r] += val;
            }
            for (ci_b, w_b) in cams {
                let block = wa_vinv * w_b.transpose();
                let mut view = schur.view_mut((6 * ci_a, 6 * ci_b), (6, 6));
                view -= block;
            }
        }
    }

    let chol = schur.cholesky()?;
    let cam_solution = chol.solve(&rhs);

    let mut cam_steps = Vec::with_capacity(free_cams);
    for ci in 0..free_cams {
        cam_steps.push(SMatrix::<f64, 6, 1>::from_iterator(
            cam_solution.rows(6 * ci, 6).iter().copied(),
        ));
    }

    // Back-substitute the point steps.
    let mut point_steps: Vec<Vector3<f64>> = g_point.iter().map(|g| -g).collect();
    for (ci, j, w) in w_blocks {
        point_steps[*j] -= w.transpose() * cam_steps[*ci];
    }
    for (j, step) in point_steps.iter_mut().enumerate() {
        *step = v_inv[j] * *step;
    }

    Some((cam_steps, point_steps))
}

fn check_coverage(estimate: &SceneEstimate, observations: &[Observation]) -> Result<(), SfmError> {
    let mut per_camera = vec![0usize; estimate.cameras.len()];
    let mut per_point = vec![0usize; estimate.points.len()];
    for obs in observations {
        per_camera[obs.camera as usize] += 1;
        per_point[obs.point as usize] += 1;
    }
    if let Some(cam) = per_camera.iter().position(|n| *n < 6) {
        return Err(SfmError::InsufficientObservations(format!(
            "camera {cam} sees {} points, needs 6",
            per_camera[cam]
        )));
    }
    if let Some(point) = per_point.iter().position(|n| *n < 2) {
        return Err(SfmError::InsufficientObservations(format!(
            "point {point} is seen by {} cameras, needs 2",
            per_point[point]
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::scene::{reprojection_error, rmse};
    use super::super::synth::{synth_scene, SynthSceneSpec};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn perturbed(scene: &SceneEstimate, relative: f64, seed: u64) -> SceneEstimate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = State::from_estimate(scene);
        let scene_scale = state
            .points
            .iter()
            .map(|p| p.coords.norm())
            .fold(0.0f64, f64::max);
        for i in 1..state.rotations.len() {
            let axis = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ) * relative;
            state.rotations[i] = Rotation3::from_scaled_axis(axis) * state.rotations[i];
            let dt = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ) * (relative * state.translations[i].norm().max(1.0));
            state.translations[i] += dt;
        }
        for p in &mut state.points {
            let dp = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ) * (relative * scene_scale);
            *p += dp;
        }
        state.to_estimate()
    }

    #[test]
    fn ground_truth_terminates_immediately() {
        let (truth, observations) = synth_scene(&SynthSceneSpec::default()).unwrap();
        let (refined, report) =
            bundle_adjust(&truth, &observations, &BaOptions::default()).unwrap();
        assert!(report.iterations <= 2, "{} iterations", report.iterations);
        assert!(report.final_cost < 1e-18, "cost {}", report.final_cost);
        assert_eq!(report.termination, TerminationReason::GradientTolerance);
        let check = reprojection_error(&refined, &observations).unwrap();
        assert!(check < 1e-18);
    }

    #[test]
    fn perturbed_scene_converges_to_machine_precision() {
        let (truth, observations) = synth_scene(&SynthSceneSpec::default()).unwrap();
        let initial = perturbed(&truth, 1e-2, 11);
        let initial_cost = reprojection_error(&initial, &observations).unwrap();
        assert!(initial_cost > 1.0);
        let (refined, report) =
            bundle_adjust(&initial, &observations, &BaOptions::default()).unwrap();
        assert!(report.iterations < 100);
        let final_rmse = rmse(report.final_cost, observations.len());
        assert!(final_rmse < 1e-8, "rmse {final_rmse}");
        assert!(report.final_cost <= initial_cost);
        let check = reprojection_error(&refined, &observations).unwrap();
        assert!((check - report.final_cost).abs() <= 1e-9 * check.max(1e-9));
    }

    #[test]
    fn cost_history_never_increases() {
        let (truth, observations) = synth_scene(&SynthSceneSpec {
            pixel_noise_sigma: 0.5,
            ..Default::default()
        })
        .unwrap();
        let initial = perturbed(&truth, 1e-2, 3);
        let (_, report) = bundle_adjust(&initial, &observations, &BaOptions::default()).unwrap();
        for pair in report.cost_history.windows(2) {
            assert!(pair[1] < pair[0]);
        }
    }

    #[test]
    fn noisy_observations_reach_at_least_ground_truth_cost() {
        let spec = SynthSceneSpec {
            pixel_noise_sigma: 0.5,
            ..Default::default()
        };
        let (truth, observations) = synth_scene(&spec).unwrap();
        let truth_cost = reprojection_error(&truth, &observations).unwrap();
        let initial = perturbed(&truth, 1e-2, 29);
        let (_, report) = bundle_adjust(&initial, &observations, &BaOptions::default()).unwrap();
        assert!(
            report.final_cost <= truth_cost,
            "final {} vs truth {}",
            report.final_cost,
            truth_cost
        );
    }

    #[test]
    fn insufficient_coverage_is_rejected() {
        let (truth, observations) = synth_scene(&SynthSceneSpec::default()).unwrap();
        // Starve camera 0 below 6 observations.
        let starved: Vec<Observation> = observations
            .iter()
            .filter(|o| o.camera != 0 || o.point < 5)
            .cloned()
            .collect();
        assert!(matches!(
            bundle_adjust(&truth, &starved, &BaOptions::default()),
            Err(SfmError::InsufficientObservations(_))
        ));
    }

    #[test]
    fn analytic_jacobian_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let spec = SynthSceneSpec {
                cameras: 2,
                points: 6,
                seed: rng.random(),
                ..Default::default()
            };
            let (scene, observations) = synth_scene(&spec).unwrap();
            let state = State::from_estimate(&scene);
            let obs = observations
                .iter()
                .find(|o| o.camera == 1)
                .expect("camera 1 observes something");
            let (_, cam_block, point_block) = jacobian_blocks(&state, obs).unwrap();

            let residual_of = |state: &State| state.residual(obs).unwrap();
            // Camera parameters: axis-angle increment then translation.
            for param in 0..6 {
                let h = 1e-6;
                let mut plus = State {
                    intrinsics: state.intrinsics.clone(),
                    rotations: state.rotations.clone(),
                    translations: state.translations.clone(),
                    points: state.points.clone(),
                };
                let mut minus = State {
                    intrinsics: state.intrinsics.clone(),
                    rotations: state.rotations.clone(),
                    translations: state.translations.clone(),
                    points: state.points.clone(),
                };
                if param < 3 {
                    let mut dw = Vector3::zeros();
                    dw[param] = h;
                    plus.rotations[1] = Rotation3::from_scaled_axis(dw) * plus.rotations[1];
                    minus.rotations[1] = Rotation3::from_scaled_axis(-dw) * minus.rotations[1];
                } else {
                    plus.translations[1][param - 3] += h;
                    minus.translations[1][param - 3] -= h;
                }
                let fd = (residual_of(&plus) - residual_of(&minus)) / (2.0 * h);
                for row in 0..2 {
                    worst = worst.max((cam_block[(row, param)] - fd[row]).abs());
                }
            }
            // Point coordinates.
            for param in 0..3 {
                let h = 1e-6 * state.points[obs.point as usize].coords[param]
                    .abs()
                    .max(1.0);
                let mut plus = State {
                    intrinsics: state.intrinsics.clone(),
                    rotations: state.rotations.clone(),
                    translations: state.translations.clone(),
                    points: state.points.clone(),
                };
                let mut minus = State {
                    intrinsics: state.intrinsics.clone(),
                    rotations: state.rotations.clone(),
                    translations: state.translations.clone(),
                    points: state.points.clone(),
                };
                plus.points[obs.point as usize][param] += h;
                minus.points[obs.point as usize][param] -= h;
                let fd = (residual_of(&plus) - residual_of(&minus)) / (2.0 * h);
                for row in 0..2 {
                    worst = worst.max((point_block[(row, param)] - fd[row]).abs());
                }
            }
        }
        assert!(worst < 1e-5, "max Jacobian deviation {worst}");
    }

    #[test]
    fn cost_is_invariant_under_compensated_similarity() {
        use nalgebra::Matrix4;
        let (truth, observations) = synth_scene(&SynthSceneSpec::default()).unwrap();
        let base_cost = reprojection_error(&truth, &observations).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(314);
        for _ in 0..10 {
            let scale: f64 = rng.random_range(0.2..5.0);
            let rotation = Rotation3::from_scaled_axis(Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ));
            let shift = Vector3::new(
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
            );
            // X' = s R X + T, P' = P H^-1 with H the similarity in
            // homogeneous form.
            let mut h = Matrix4::identity();
            h.fixed_view_mut::<3, 3>(0, 0)
                .copy_from(&(rotation.matrix() * scale));
            h.fixed_view_mut::<3, 1>(0, 3).copy_from(&shift);
            let h_inv = h.try_inverse().unwrap();

            let transformed = SceneEstimate {
                cameras: truth
                    .cameras
                    .iter()
                    .map(|cam| CameraView::new(cam.matrix() * h_inv).unwrap())
                    .collect(),
                points: truth
                    .points
                    .iter()
                    .map(|p| Point3::from(rotation * p.coords * scale + shift))
                    .collect(),
            };
            let cost = reprojection_error(&transformed, &observations).unwrap();
            assert!(
                (cost - base_cost).abs() <= 1e-10 * base_cost.max(1e-6),
                "cost changed: {cost} vs {base_cost}"
            );
        }
    }
}
