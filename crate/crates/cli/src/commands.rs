use std::path::Path;

use granulite::fixtures;
use granulite::geometry::{FaceAdjacency, PointCloud, TriMesh};
use granulite::io::{self, PlyData, PlyFormat};
use granulite::morpho::{self, GradationReport, ParticleMetrics};
use granulite::recon::{reconstruct_surface_with_grid, ReconParams};
use granulite::segment::{
    boundary_faces, filter_segments, segment_mesh, CriterionParams, SegmentLabels,
};
use granulite::sfm;

use crate::config::PipelineConfig;
use crate::summary::RunSummary;
use crate::AppError;

fn stage_err<E: std::fmt::Display>(stage: &'static str) -> impl Fn(E) -> AppError {
    move |e| AppError::stage(stage, e.to_string())
}

fn load_cloud(path: &Path) -> Result<PointCloud, AppError> {
    if !path.exists() {
        return Err(AppError::stage(
            "load",
            format!("input file not found: {}", path.display()),
        ));
    }
    match io::read_ply(path).map_err(stage_err("load"))? {
        io::PlyReadResult {
            data: PlyData::Cloud(cloud),
            warnings,
        } => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            Ok(cloud)
        }
        _ => Err(AppError::stage(
            "load",
            format!("{} is a mesh, expected a point cloud", path.display()),
        )),
    }
}

fn load_mesh(path: &Path) -> Result<TriMesh, AppError> {
    if !path.exists() {
        return Err(AppError::stage(
            "load",
            format!("input file not found: {}", path.display()),
        ));
    }
    if path.extension().and_then(|e| e.to_str()) == Some("obj") {
        return io::read_obj(path).map_err(stage_err("load"));
    }
    match io::read_ply(path).map_err(stage_err("load"))? {
        io::PlyReadResult {
            data: PlyData::Mesh(mesh),
            warnings,
        } => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            Ok(mesh)
        }
        _ => Err(AppError::stage(
            "load",
            format!("{} is a point cloud, expected a mesh", path.display()),
        )),
    }
}

fn recon_params(config: &PipelineConfig) -> ReconParams {
    ReconParams {
        resolution: config.grid_res,
        padding: config.padding,
        cg_tolerance: config.cg_tol,
        ..Default::default()
    }
}

fn run_segmentation(
    mesh: &TriMesh,
    config: &PipelineConfig,
) -> Result<SegmentLabels, AppError> {
    let diagnostics = mesh.validate();
    if !diagnostics.is_clean() {
        if diagnostics.out_of_range.is_empty() && diagnostics.non_manifold_edges.is_empty() {
            eprintln!("warning: mesh has defects ({diagnostics})");
        } else {
            return Err(AppError::stage("segment", diagnostics.to_string()));
        }
    }
    let adjacency = FaceAdjacency::build(mesh).map_err(stage_err("segment"))?;
    let params =
        CriterionParams::new(config.threshold).map_err(stage_err("segment"))?;
    let labels = segment_mesh(mesh, &adjacency, &params).map_err(stage_err("segment"))?;
    Ok(filter_segments(&labels, config.min_faces))
}

fn apply_calibration(mesh: TriMesh, config: &PipelineConfig) -> Result<TriMesh, AppError> {
    match (config.true_length, config.measured_length) {
        (Some(true_len), Some(measured)) => {
            morpho::apply_scale(&mesh, true_len, measured).map_err(stage_err("calibrate"))
        }
        (None, None) => Ok(mesh),
        _ => Err(AppError::config(
            "calibration needs both --true-length and --measured-length".into(),
        )),
    }
}

/// Evenly spaced sieves spanning the observed d2 range, for when the user
/// gives none.
fn default_sieves(metrics: &[ParticleMetrics]) -> Vec<f64> {
    let d2s: Vec<f64> = metrics.iter().map(|m| m.principal_dimensions[1]).collect();
    let lo = d2s.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = d2s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return vec![hi.max(lo) * 2.0];
    }
    (1..=4).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect()
}

fn metrics_csv(metrics: &[ParticleMetrics]) -> String {
    let mut out =
        String::from("segment_id,face_count,surface_area,d1,d2,d3,elongation,flatness\n");
    for m in metrics {
        let [d1, d2, d3] = m.principal_dimensions;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            m.segment_id, m.face_count, m.surface_area, d1, d2, d3, m.elongation, m.flatness
        ));
    }
    out
}

fn gradation_csv(report: &GradationReport) -> String {
    let mut out = String::from("sieve_size,percent_finer\n");
    for (threshold, percent) in &report.entries {
        out.push_str(&format!("{threshold},{percent}\n"));
    }
    out
}

fn metrics_table(metrics: &[ParticleMetrics], gradation: &GradationReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>8} {:>8} {:>12} {:>10} {:>10} {:>10} {:>10} {:>9}\n",
        "segment", "faces", "area", "d1", "d2", "d3", "elongation", "flatness"
    ));
    for m in metrics {
        let [d1, d2, d3] = m.principal_dimensions;
        out.push_str(&format!(
            "{:>8} {:>8} {:>12.5} {:>10.4} {:>10.4} {:>10.4} {:>10.3} {:>9.3}\n",
            m.segment_id, m.face_count, m.surface_area, d1, d2, d3, m.elongation, m.flatness
        ));
    }
    out.push_str(&format!(
        "\ngradation over {} particles (percent finer by d2):\n",
        gradation.particle_count
    ));
    for (threshold, percent) in &gradation.entries {
        out.push_str(&format!("{:>10.4}  {:>6.1}%\n", threshold, percent));
    }
    out
}

fn write_text(path: &Path, text: &str, stage: &'static str) -> Result<(), AppError> {
    std::fs::write(path, text)
        .map_err(|e| AppError::stage(stage, format!("write {}: {e}", path.display())))
}

pub fn reconstruct(config: &PipelineConfig, dump_grid: bool) -> Result<(), AppError> {
    let mut summary = RunSummary::new("reconstruct", config.clone());
    let input = config.require_input()?.to_path_buf();
    let cloud = summary.stage("load", || load_cloud(&input))?;
    summary.counts.input_points = Some(cloud.len());

    let params = recon_params(config);
    let (mesh, grid) = summary.stage("reconstruct", || {
        reconstruct_surface_with_grid(&cloud, &params).map_err(stage_err("reconstruct"))
    })?;
    summary.counts.mesh_vertices = Some(mesh.vertex_count());
    summary.counts.mesh_faces = Some(mesh.face_count());

    let mesh_path = config.output_dir.join("mesh.ply");
    io::write_ply_mesh(&mesh, &mesh_path, PlyFormat::BinaryLittleEndian)
        .map_err(stage_err("write"))?;
    summary.record_output(&mesh_path);
    if dump_grid {
        let grid_path = config.output_dir.join("indicator.grid");
        io::write_grid(&grid, &grid_path).map_err(stage_err("write"))?;
        summary.record_output(&grid_path);
    }

    let path = summary.write()?;
    println!(
        "reconstructed {} vertices / {} faces -> {}",
        mesh.vertex_count(),
        mesh.face_count(),
        path.parent().unwrap_or(Path::new(".")).display()
    );
    Ok(())
}

pub fn segment(config: &PipelineConfig) -> Result<(), AppError> {
    let mut summary = RunSummary::new("segment", config.clone());
    let input = config.require_input()?.to_path_buf();
    let mesh = summary.stage("load", || load_mesh(&input))?;
    summary.counts.mesh_vertices = Some(mesh.vertex_count());
    summary.counts.mesh_faces = Some(mesh.face_count());

    let labels = summary.stage("segment", || run_segmentation(&mesh, config))?;
    summary.counts.segment_count = Some(labels.segment_count);
    summary.counts.boundary_faces = Some(boundary_faces(&labels).len());

    let labeled_path = config.output_dir.join("labeled.ply");
    io::write_ply_labeled(&mesh, &labels, &labeled_path).map_err(stage_err("write"))?;
    summary.record_output(&labeled_path);
    summary.record_output(&config.output_dir.join("labeled.labels.txt"));

    summary.write()?;
    println!(
        "{} segments, {} boundary faces",
        labels.segment_count,
        boundary_faces(&labels).len()
    );
    Ok(())
}

pub fn metrics(
    config: &PipelineConfig,
    labels_path: Option<&Path>,
    sieves: Option<&[f64]>,
) -> Result<(), AppError> {
    let mut summary = RunSummary::new("metrics", config.clone());
    let input = config.require_input()?.to_path_buf();
    let mesh = summary.stage("load", || load_mesh(&input))?;
    let labels_path = labels_path
        .ok_or_else(|| AppError::config("metrics needs --labels <file>".into()))?;
    let labels = io::read_labels(labels_path).map_err(stage_err("load"))?;
    if labels.face_count() != mesh.face_count() {
        return Err(AppError::stage(
            "load",
            format!(
                "labels cover {} faces but the mesh has {}",
                labels.face_count(),
                mesh.face_count()
            ),
        ));
    }

    let mesh = apply_calibration(mesh, config)?;
    let (particle_metrics, gradation) = summary.stage("metrics", || {
        let particle_metrics = morpho::all_segment_metrics(&mesh, &labels);
        if particle_metrics.is_empty() {
            return Err(AppError::stage("metrics", "no measurable segments"));
        }
        let sieve_list: Vec<f64> = match sieves {
            Some(list) => list.to_vec(),
            None => default_sieves(&particle_metrics),
        };
        let gradation = morpho::gradation_report(&particle_metrics, &sieve_list)
            .map_err(stage_err("metrics"))?;
        Ok((particle_metrics, gradation))
    })?;
    summary.counts.particle_count = Some(particle_metrics.len());

    let metrics_path = config.output_dir.join("metrics.csv");
    write_text(&metrics_path, &metrics_csv(&particle_metrics), "write")?;
    summary.record_output(&metrics_path);
    let gradation_path = config.output_dir.join("gradation.csv");
    write_text(&gradation_path, &gradation_csv(&gradation), "write")?;
    summary.record_output(&gradation_path);

    summary.write()?;
    print!("{}", metrics_table(&particle_metrics, &gradation));
    Ok(())
}

pub fn bundle_adjust(config: &PipelineConfig) -> Result<(), AppError> {
    let mut summary = RunSummary::new("ba", config.clone());
    let input = config.require_input()?.to_path_buf();
    if !input.exists() {
        return Err(AppError::stage(
            "load",
            format!("input file not found: {}", input.display()),
        ));
    }
    let (scene, observations) =
        summary.stage("load", || io::read_scene(&input).map_err(stage_err("load")))?;
    summary.counts.cameras = Some(scene.cameras.len());
    summary.counts.points = Some(scene.points.len());
    summary.counts.observations = Some(observations.len());

    let (refined, report) = summary.stage("ba", || {
        sfm::bundle_adjust(&scene, &observations, &sfm::BaOptions::default())
            .map_err(stage_err("ba"))
    })?;
    summary.counts.ba_iterations = Some(report.iterations);
    summary.counts.ba_initial_cost = Some(report.initial_cost);
    summary.counts.ba_final_cost = Some(report.final_cost);

    let refined_path = config.output_dir.join("refined_scene.txt");
    io::write_scene(&refined, &observations, &refined_path).map_err(stage_err("write"))?;
    summary.record_output(&refined_path);

    summary.write()?;
    println!(
        "cost {:.6e} -> {:.6e} in {} iterations ({:?})",
        report.initial_cost, report.final_cost, report.iterations, report.termination
    );
    Ok(())
}

pub fn pipeline(config: &PipelineConfig, sieves: Option<&[f64]>) -> Result<(), AppError> {
    let mut summary = RunSummary::new("pipeline", config.clone());
    let input = config.require_input()?.to_path_buf();
    let cloud = summary.stage("load", || load_cloud(&input))?;
    summary.counts.input_points = Some(cloud.len());

    let params = recon_params(config);
    let (mesh, _) = summary.stage("reconstruct", || {
        reconstruct_surface_with_grid(&cloud, &params).map_err(stage_err("reconstruct"))
    })?;
    summary.counts.mesh_vertices = Some(mesh.vertex_count());
    summary.counts.mesh_faces = Some(mesh.face_count());
    let mesh_path = config.output_dir.join("mesh.ply");
    io::write_ply_mesh(&mesh, &mesh_path, PlyFormat::BinaryLittleEndian)
        .map_err(stage_err("write"))?;
    summary.record_output(&mesh_path);

    let labels = summary.stage("segment", || run_segmentation(&mesh, config))?;
    summary.counts.segment_count = Some(labels.segment_count);
    summary.counts.boundary_faces = Some(boundary_faces(&labels).len());
    let labeled_path = config.output_dir.join("labeled.ply");
    io::write_ply_labeled(&mesh, &labels, &labeled_path).map_err(stage_err("write"))?;
    summary.record_output(&labeled_path);
    summary.record_output(&config.output_dir.join("labeled.labels.txt"));

    let mesh = apply_calibration(mesh, config)?;
    let (particle_metrics, gradation) = summary.stage("metrics", || {
        let particle_metrics = morpho::all_segment_metrics(&mesh, &labels);
        if particle_metrics.is_empty() {
            return Err(AppError::stage("metrics", "no measurable segments"));
        }
        let sieve_list: Vec<f64> = match sieves {
            Some(list) => list.to_vec(),
            None => default_sieves(&particle_metrics),
        };
        let gradation = morpho::gradation_report(&particle_metrics, &sieve_list)
            .map_err(stage_err("metrics"))?;
        Ok((particle_metrics, gradation))
    })?;
    summary.counts.particle_count = Some(particle_metrics.len());

    let metrics_path = config.output_dir.join("metrics.csv");
    write_text(&metrics_path, &metrics_csv(&particle_metrics), "write")?;
    summary.record_output(&metrics_path);
    let gradation_path = config.output_dir.join("gradation.csv");
    write_text(&gradation_path, &gradation_csv(&gradation), "write")?;
    summary.record_output(&gradation_path);

    summary.write()?;
    println!(
        "pipeline done: {} segments, {} measurable particles",
        labels.segment_count,
        particle_metrics.len()
    );
    print!("{}", metrics_table(&particle_metrics, &gradation));
    Ok(())
}

pub fn synth(config: &PipelineConfig, fixture: &str) -> Result<(), AppError> {
    let mut summary = RunSummary::new("synth", config.clone());
    let out = &config.output_dir;
    match fixture {
        "sphere-cloud" => {
            let cloud = fixtures::sphere_cloud(2000, config.seed);
            let path = out.join("sphere-cloud.ply");
            io::write_ply_cloud(&cloud, &path, PlyFormat::BinaryLittleEndian)
                .map_err(stage_err("write"))?;
            summary.counts.input_points = Some(cloud.len());
            summary.record_output(&path);
        }
        "icosphere" => {
            let mesh = fixtures::icosphere(3, 1.0);
            let path = out.join("icosphere.ply");
            io::write_ply_mesh(&mesh, &path, PlyFormat::BinaryLittleEndian)
                .map_err(stage_err("write"))?;
            summary.counts.mesh_faces = Some(mesh.face_count());
            summary.record_output(&path);
        }
        "ellipsoid" => {
            let mesh = fixtures::ellipsoid(2.0, 1.0, 0.5, 3);
            let path = out.join("ellipsoid.ply");
            io::write_ply_mesh(&mesh, &path, PlyFormat::BinaryLittleEndian)
                .map_err(stage_err("write"))?;
            summary.counts.mesh_faces = Some(mesh.face_count());
            summary.record_output(&path);
        }
        "two-ball" | "ten-ball" => {
            let pile = if fixture == "two-ball" {
                fixtures::two_ball_pile()
            } else {
                fixtures::ten_ball_pile()
            };
            let (cloud, _) = pile.sample_surface(fixtures::PILE_CLOUD_DENSITY, config.seed);
            let cloud_path = out.join(format!("{fixture}.ply"));
            io::write_ply_cloud(&cloud, &cloud_path, PlyFormat::BinaryLittleEndian)
                .map_err(stage_err("write"))?;
            summary.counts.input_points = Some(cloud.len());
            summary.record_output(&cloud_path);

            // Ground-truth ball list for cross-checking metrics.
            let mut truth = String::new();
            for b in &pile.balls {
                truth.push_str(&format!(
                    "BALL {} {} {} {}\n",
                    b.center.x, b.center.y, b.center.z, b.radius
                ));
            }
            let truth_path = out.join(format!("{fixture}.balls.txt"));
            write_text(&truth_path, &truth, "write")?;
            summary.record_output(&truth_path);
        }
        "ba-scene" => {
            let (scene, observations) = sfm::synth_scene(&sfm::SynthSceneSpec {
                seed: config.seed,
                ..Default::default()
            })
            .map_err(stage_err("synth"))?;
            let path = out.join("scene.txt");
            io::write_scene(&scene, &observations, &path).map_err(stage_err("write"))?;
            summary.counts.cameras = Some(scene.cameras.len());
            summary.counts.points = Some(scene.points.len());
            summary.counts.observations = Some(observations.len());
            summary.record_output(&path);
        }
        other => {
            return Err(AppError::config(format!(
                "unknown fixture `{other}` (expected sphere-cloud, icosphere, ellipsoid, \
                 two-ball, ten-ball, or ba-scene)"
            )));
        }
    }
    summary.write()?;
    println!("wrote {fixture} fixture to {}", out.display());
    Ok(())
}
