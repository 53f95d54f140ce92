use std::collections::HashSet;

use nalgebra::{Point3, Vector2};

use super::{CameraView, SfmError};

/// One measured pixel: point `point` seen by camera `camera` at `pixel`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub camera: u32,
    pub point: u32,
    pub pixel: Vector2<f64>,
}

/// Jointly estimated cameras and 3D points.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneEstimate {
    pub cameras: Vec<CameraView>,
    pub points: Vec<Point3<f64>>,
}

impl SceneEstimate {
    /// Check that every observation references a valid camera and point and
    /// that (camera, point) pairs are unique.
    pub fn check_observations(&self, observations: &[Observation]) -> Result<(), SfmError> {
        let mut seen = HashSet::new();
        for obs in observations {
            if obs.camera as usize >= self.cameras.len() || obs.point as usize >= self.points.len()
            {
                return Err(SfmError::InvalidObservation {
                    camera: obs.camera,
                    point: obs.point,
                    cameras: self.cameras.len(),
                    points: self.points.len(),
                });
            }
            if !seen.insert((obs.camera, obs.point)) {
                return Err(SfmError::DuplicateObservation {
                    camera: obs.camera,
                    point: obs.point,
                });
            }
        }
        Ok(())
    }
}

/// Total reprojection error: the sum over observations of the squared pixel
/// distance between the measurement and the projected point. Observations
/// whose point falls on a camera's principal plane are an error, not
/// silently skipped.
pub fn reprojection_error(
    estimate: &SceneEstimate,
    observations: &[Observation],
) -> Result<f64, SfmError> {
    estimate.check_observations(observations)?;
    let mut total = 0.0;
    for obs in observations {
        let projected = estimate.cameras[obs.camera as usize]
            .project(&estimate.points[obs.point as usize])
            .map_err(|_| SfmError::ObservationAtInfinity {
                camera: obs.camera,
                point: obs.point,
            })?;
        total += (obs.pixel - projected).norm_squared();
    }
    Ok(total)
}

/// Root-mean-square pixel distance corresponding to a total squared error.
pub fn rmse(total_squared_error: f64, observation_count: usize) -> f64 {
    if observation_count == 0 {
        0.0
    } else {
        (total_squared_error / observation_count as f64).sqrt()
    }
}
