//! Command-line pipeline for aggregate stockpile analysis: reconstruct a
//! stockpile mesh from an oriented point cloud, segment it into individual
//! particles, and report per-particle size and shape metrics.

mod commands;
mod config;
mod summary;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Overrides;

/// Application failures mapped onto exit codes: configuration problems exit
/// with 2, pipeline stage failures with 3.
#[derive(Debug)]
pub enum AppError {
    Config(String),
    Stage { stage: String, message: String },
}

impl AppError {
    pub fn config(message: String) -> Self {
        Self::Config(message)
    }

    pub fn stage(stage: &str, message: impl Into<String>) -> Self {
        Self::Stage {
            stage: stage.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "granulite",
    about = "Stockpile reconstruction, particle segmentation, and morphometrics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; unset flags fall back to the config
/// file and then to built-in defaults.
#[derive(clap::Args, Clone, Debug)]
struct CommonArgs {
    /// Input file (PLY/OBJ cloud or mesh, or scene text file)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Directory for all outputs (created if missing)
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Optional key = value config file; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Curvature threshold t of the segmentation criterion [default: 0.7]
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
    /// Segments smaller than this are folded into the boundary [default: 1]
    #[arg(long)]
    min_faces: Option<usize>,
    /// Grid cells along the longest axis, padding included [default: 64]
    #[arg(long)]
    grid_res: Option<usize>,
    /// Empty padding cells around the cloud [default: 4]
    #[arg(long)]
    padding: Option<usize>,
    /// Relative tolerance of the conjugate-gradient solve [default: 1e-8]
    #[arg(long)]
    cg_tol: Option<f64>,
    /// Random seed for synthetic fixtures [default: 42]
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads per stage (current stages run single-threaded) [default: 1]
    #[arg(long)]
    threads: Option<usize>,
    /// True length of the calibration object, with --measured-length
    #[arg(long)]
    true_length: Option<f64>,
    /// Measured (model units) length of the calibration object
    #[arg(long)]
    measured_length: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct a triangle mesh from an oriented point cloud
    Reconstruct {
        #[command(flatten)]
        common: CommonArgs,
        /// Also dump the indicator grid as a raw f64 file
        #[arg(long)]
        dump_grid: bool,
    },
    /// Segment a stockpile mesh into particles and boundary faces
    Segment {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Per-particle metrics and gradation from a mesh plus labels
    Metrics {
        #[command(flatten)]
        common: CommonArgs,
        /// Label file produced by `segment`
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Comma-separated ascending sieve sizes for the gradation table
        #[arg(long)]
        sieves: Option<String>,
    },
    /// Bundle-adjust a scene file of cameras, points, and observations
    Ba {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Full pipeline: cloud -> mesh -> labels -> metrics
    Pipeline {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated ascending sieve sizes for the gradation table
        #[arg(long)]
        sieves: Option<String>,
    },
    /// Emit a synthetic fixture (cloud, mesh, or scene) for testing
    Synth {
        #[command(flatten)]
        common: CommonArgs,
        /// One of: sphere-cloud, icosphere, ellipsoid, two-ball, ten-ball,
        /// ba-scene
        #[arg(long)]
        fixture: String,
    },
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            input: self.input.clone(),
            output_dir: self.output_dir.clone(),
            grid_res: self.grid_res,
            padding: self.padding,
            cg_tol: self.cg_tol,
            threshold: self.threshold,
            min_faces: self.min_faces,
            true_length: self.true_length,
            measured_length: self.measured_length,
            seed: self.seed,
            threads: self.threads,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Config(message)) => {
            eprintln!("configuration error: {message}");
            ExitCode::from(2)
        }
        Err(AppError::Stage { stage, message }) => {
            eprintln!("stage `{stage}` failed: {message}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Reconstruct { common, dump_grid } => {
            let config = resolve(&common)?;
            commands::reconstruct(&config, dump_grid)
        }
        Command::Segment { common } => {
            let config = resolve(&common)?;
            commands::segment(&config)
        }
        Command::Metrics {
            common,
            labels,
            sieves,
        } => {
            let config = resolve(&common)?;
            let sieves = parse_sieves(sieves.as_deref())?;
            commands::metrics(&config, labels.as_deref(), sieves.as_deref())
        }
        Command::Ba { common } => {
            let config = resolve(&common)?;
            commands::bundle_adjust(&config)
        }
        Command::Pipeline { common, sieves } => {
            let config = resolve(&common)?;
            let sieves = parse_sieves(sieves.as_deref())?;
            commands::pipeline(&config, sieves.as_deref())
        }
        Command::Synth { common, fixture } => {
            let config = resolve(&common)?;
            commands::synth(&config, &fixture)
        }
    }
}

fn resolve(common: &CommonArgs) -> Result<config::PipelineConfig, AppError> {
    let config = config::PipelineConfig::resolve(common.config.as_deref(), &common.overrides())?;
    std::fs::create_dir_all(&config.output_dir).map_err(|e| {
        AppError::config(format!(
            "cannot create output dir {}: {e}",
            config.output_dir.display()
        ))
    })?;
    Ok(config)
}

fn parse_sieves(text: Option<&str>) -> Result<Option<Vec<f64>>, AppError> {
    let Some(text) = text else {
        return Ok(None);
    };
    let values: Result<Vec<f64>, _> = text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let values =
        values.map_err(|e| AppError::config(format!("bad sieve list `{text}`: {e}")))?;
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AppError::config(format!(
            "sieve sizes must be strictly ascending: `{text}`"
        )));
    }
    Ok(Some(values))
}
