use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::config::PipelineConfig;
use crate::AppError;

/// Machine-readable record of a run, written to `summary.json` in the
/// output directory. Field order is fixed so repeated runs with the same
/// configuration differ only in the stage timings.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub command: String,
    pub parameters: PipelineConfig,
    pub counts: Counts,
    pub outputs: Vec<String>,
    pub stages: Vec<StageTiming>,
}

#[derive(Debug, Default, Serialize)]
pub struct Counts {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh_vertices: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh_faces: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment_count: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_faces: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub particle_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cameras: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ba_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ba_initial_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ba_final_cost: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct StageTiming {
    pub name: String,
    pub seconds: f64,
}

impl RunSummary {
    pub fn new(command: &str, parameters: PipelineConfig) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            counts: Counts::default(),
            outputs: Vec::new(),
            stages: Vec::new(),
        }
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Time a pipeline stage, recording its duration under `name`.
    pub fn stage<T>(
        &mut self,
        name: &str,
        body: impl FnOnce() -> Result<T, AppError>,
    ) -> Result<T, AppError> {
        let started = Instant::now();
        let result = body();
        self.stages.push(StageTiming {
            name: name.to_string(),
            seconds: started.elapsed().as_secs_f64(),
        });
        result
    }

    /// Serialize and write `summary.json` into the output directory.
    pub fn write(&self) -> Result<std::path::PathBuf, AppError> {
        let path = self.parameters.output_dir.join("summary.json");
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| AppError::stage("summary", format!("serialize: {e}")))?;
        std::fs::write(&path, json + "\n")
            .map_err(|e| AppError::stage("summary", format!("write {}: {e}", path.display())))?;
        Ok(path)
    }
}
