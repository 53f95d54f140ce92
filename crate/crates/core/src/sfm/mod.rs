//! Multi-view geometry at desk scale: pinhole projection, two-view
//! triangulation, and bundle adjustment over synthetic scenes with known
//! pixel correspondences.
//!
//! Bundle adjustment jointly refines camera poses and 3D points by
//! minimizing the total reprojection error, the sum over all observations of
//! the squared pixel distance between the observed and the projected point.

mod bundle;
mod camera;
mod scene;
mod synth;
mod triangulate;

pub use bundle::{
    bundle_adjust, residual_jacobian, BaOptions, ConvergenceReport, TerminationReason,
};
pub use camera::CameraView;
pub use scene::{reprojection_error, rmse, Observation, SceneEstimate};
pub use synth::{synth_scene, SynthSceneSpec};
pub use triangulate::triangulate;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SfmError {
    #[error("projection matrix is singular (|det| = {0:.3e})")]
    SingularCamera(f64),
    #[error("point projects onto the camera's principal plane")]
    PointAtInfinity,
    #[error("observation (camera {camera}, point {point}) projects onto the principal plane")]
    ObservationAtInfinity { camera: u32, point: u32 },
    #[error("observation references camera {camera} / point {point}, scene has {cameras} cameras and {points} points")]
    InvalidObservation {
        camera: u32,
        point: u32,
        cameras: usize,
        points: usize,
    },
    #[error("duplicate observation for camera {camera}, point {point}")]
    DuplicateObservation { camera: u32, point: u32 },
    #[error("insufficient observations: {0}")]
    InsufficientObservations(String),
    #[error("cameras coincide (baseline below 1e-9)")]
    DegenerateBaseline,
    #[error("normal equations singular at maximum damping (lambda = {lambda:.3e})")]
    SingularNormalEquations { lambda: f64 },
}
