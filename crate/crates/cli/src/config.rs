use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::AppError;

/// Resolved pipeline settings: defaults, overridden by a `key = value`
/// config file, overridden again by explicit command-line flags.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub grid_res: usize,
    pub padding: usize,
    pub cg_tol: f64,
    pub threshold: f64,
    pub min_faces: usize,
    pub true_length: Option<f64>,
    pub measured_length: Option<f64>,
    pub seed: u64,
    pub threads: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: None,
            output_dir: PathBuf::from("."),
            grid_res: 64,
            padding: 4,
            cg_tol: 1e-8,
            threshold: 0.7,
            min_faces: 1,
            true_length: None,
            measured_length: None,
            seed: 42,
            threads: 1,
        }
    }
}

/// Command-line values that override the config file. `None` means the flag
/// was not given.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub input: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub grid_res: Option<usize>,
    pub padding: Option<usize>,
    pub cg_tol: Option<f64>,
    pub threshold: Option<f64>,
    pub min_faces: Option<usize>,
    pub true_length: Option<f64>,
    pub measured_length: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl PipelineConfig {
    /// Defaults -> config file -> flags, then validation.
    pub fn resolve(config_file: Option<&Path>, overrides: &Overrides) -> Result<Self, AppError> {
        let mut config = Self::default();
        if let Some(path) = config_file {
            config.apply_file(path)?;
        }
        config.apply_overrides(overrides);
        config.validate()?;
        Ok(config)
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), AppError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            AppError::config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut entries = HashMap::new();
        for (index, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                AppError::config(format!(
                    "config line {} is not `key = value`: `{line}`",
                    index + 1
                ))
            })?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }

        for (key, value) in entries {
            let bad = |e: std::fmt::Arguments| {
                AppError::config(format!("config key `{key}`: {e}"))
            };
            match key.as_str() {
                "input" => self.input = Some(PathBuf::from(&value)),
                "output-dir" => self.output_dir = PathBuf::from(&value),
                "grid-res" => {
                    self.grid_res = value
                        .parse()
                        .map_err(|e| bad(format_args!("{e}")))?
                }
                "padding" => {
                    self.padding = value.parse().map_err(|e| bad(format_args!("{e}")))?
                }
                "cg-tol" => self.cg_tol = value.parse().map_err(|e| bad(format_args!("{e}")))?,
                "threshold" => {
                    self.threshold = value.parse().map_err(|e| bad(format_args!("{e}")))?
                }
                "min-faces" => {
                    self.min_faces = value.parse().map_err(|e| bad(format_args!("{e}")))?
                }
                "true-length" => {
                    self.true_length =
                        Some(value.parse().map_err(|e| bad(format_args!("{e}")))?)
                }
                "measured-length" => {
                    self.measured_length =
                        Some(value.parse().map_err(|e| bad(format_args!("{e}")))?)
                }
                "seed" => self.seed = value.parse().map_err(|e| bad(format_args!("{e}")))?,
                "threads" => {
                    self.threads = value.parse().map_err(|e| bad(format_args!("{e}")))?
                }
                other => {
                    return Err(AppError::config(format!("unknown config key `{other}`")));
                }
            }
        }
        Ok(())
    }

    fn apply_overrides(&mut self, overrides: &Overrides) {
        if let Some(v) = &overrides.input {
            self.input = Some(v.clone());
        }
        if let Some(v) = &overrides.output_dir {
            self.output_dir = v.clone();
        }
        if let Some(v) = overrides.grid_res {
            self.grid_res = v;
        }
        if let Some(v) = overrides.padding {
            self.padding = v;
        }
        if let Some(v) = overrides.cg_tol {
            self.cg_tol = v;
        }
        if let Some(v) = overrides.threshold {
            self.threshold = v;
        }
        if let Some(v) = overrides.min_faces {
            self.min_faces = v;
        }
        if let Some(v) = overrides.true_length {
            self.true_length = Some(v);
        }
        if let Some(v) = overrides.measured_length {
            self.measured_length = Some(v);
        }
        if let Some(v) = overrides.seed {
            self.seed = v;
        }
        if let Some(v) = overrides.threads {
            self.threads = v;
        }
    }

    fn validate(&self) -> Result<(), AppError> {
        if !(8..=256).contains(&self.grid_res) {
            return Err(AppError::config(format!(
                "grid-res {} outside [8, 256]",
                self.grid_res
            )));
        }
        if self.grid_res <= 2 * self.padding + 1 {
            return Err(AppError::config(format!(
                "padding {} leaves no interior cells at grid-res {}",
                self.padding, self.grid_res
            )));
        }
        if !(-2.0..=2.0).contains(&self.threshold) || self.threshold.is_nan() {
            return Err(AppError::config(format!(
                "threshold {} outside [-2, 2]",
                self.threshold
            )));
        }
        if self.min_faces < 1 {
            return Err(AppError::config("min-faces must be at least 1".into()));
        }
        if !self.cg_tol.is_finite() || self.cg_tol <= 0.0 {
            return Err(AppError::config(format!(
                "cg-tol must be positive, got {}",
                self.cg_tol
            )));
        }
        if self.threads < 1 {
            return Err(AppError::config("threads must be at least 1".into()));
        }
        if let Some(v) = self.true_length {
            if !v.is_finite() || v <= 0.0 {
                return Err(AppError::config(format!("true-length {v} must be positive")));
            }
        }
        if let Some(v) = self.measured_length {
            if !v.is_finite() || v <= 0.0 {
                return Err(AppError::config(format!(
                    "measured-length {v} must be positive"
                )));
            }
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(AppError::config("output-dir must not be empty".into()));
        }
        Ok(())
    }

    /// The input path, required by most subcommands.
    pub fn require_input(&self) -> Result<&Path, AppError> {
        self.input
            .as_deref()
            .ok_or_else(|| AppError::config("no input file given (use --input)".into()))
    }
}
