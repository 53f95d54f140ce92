use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::{Matrix3x4, Point3, Vector2};

use super::IoError;
use crate::sfm::{CameraView, Observation, SceneEstimate};

/// Write a scene as plain text, one record per line:
/// `CAM i p00 .. p23` (row-major projection matrix), `PT j x y z`,
/// `OBS i j u v`, `#` comments. Floats use the shortest representation that
/// round-trips exactly.
pub fn write_scene(
    scene: &SceneEstimate,
    observations: &[Observation],
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    writeln!(w, "# granulite scene: CAM/PT/OBS records")?;
    for (i, cam) in scene.cameras.iter().enumerate() {
        let m = cam.matrix();
        write!(w, "CAM {i}")?;
        for r in 0..3 {
            for c in 0..4 {
                write!(w, " {}", m[(r, c)])?;
            }
        }
        writeln!(w)?;
    }
    for (j, p) in scene.points.iter().enumerate() {
        writeln!(w, "PT {j} {} {} {}", p.x, p.y, p.z)?;
    }
    for obs in observations {
        writeln!(
            w,
            "OBS {} {} {} {}",
            obs.camera, obs.point, obs.pixel.x, obs.pixel.y
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Read a scene file written by [`write_scene`]. Camera and point indices
/// must be dense from zero.
pub fn read_scene(
    path: impl AsRef<Path>,
) -> Result<(SceneEstimate, Vec<Observation>), IoError> {
    let reader = BufReader::new(File::open(path.as_ref())?);
    let mut cameras: Vec<Option<CameraView>> = Vec::new();
    let mut points: Vec<Option<Point3<f64>>> = Vec::new();
    let mut observations = Vec::new();

    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let kind = parts.next().expect("non-empty line");
        let mut floats = |n: usize| -> Result<Vec<f64>, IoError> {
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                out.push(
                    parts
                        .next()
                        .ok_or_else(|| IoError::parse(line_no, "record too short"))?
                        .parse::<f64>()
                        .map_err(|e| IoError::parse(line_no, format!("bad number: {e}")))?,
                );
            }
            Ok(out)
        };
        match kind {
            "CAM" => {
                let values = floats(13)?;
                let index = values[0] as usize;
                let mut m = Matrix3x4::zeros();
                for r in 0..3 {
                    for c in 0..4 {
                        m[(r, c)] = values[1 + r * 4 + c];
                    }
                }
                let cam = CameraView::new(m)
                    .map_err(|e| IoError::parse(line_no, e.to_string()))?;
                if cameras.len() <= index {
                    cameras.resize(index + 1, None);
                }
                cameras[index] = Some(cam);
            }
            "PT" => {
                let values = floats(4)?;
                let index = values[0] as usize;
                if points.len() <= index {
                    points.resize(index + 1, None);
                }
                points[index] = Some(Point3::new(values[1], values[2], values[3]));
            }
            "OBS" => {
                let values = floats(4)?;
                observations.push(Observation {
                    camera: values[0] as u32,
                    point: values[1] as u32,
                    pixel: Vector2::new(values[2], values[3]),
                });
            }
            other => {
                return Err(IoError::parse(
                    line_no,
                    format!("unknown record type `{other}`"),
                ))
            }
        }
    }

    let cameras: Vec<CameraView> = cameras
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| IoError::InvalidData(format!("missing camera {i}"))))
        .collect::<Result<_, _>>()?;
    let points: Vec<Point3<f64>> = points
        .into_iter()
        .enumerate()
        .map(|(j, p)| p.ok_or_else(|| IoError::InvalidData(format!("missing point {j}"))))
        .collect::<Result<_, _>>()?;
    Ok((SceneEstimate { cameras, points }, observations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfm::{synth_scene, SynthSceneSpec};

    #[test]
    fn scene_roundtrip_is_exact() {
        let (scene, observations) = synth_scene(&SynthSceneSpec {
            pixel_noise_sigma: 0.25,
            seed: 9,
            ..Default::default()
        })
        .unwrap();
        let path = std::env::temp_dir().join(format!("granulite-scene-{}.txt", std::process::id()));
        write_scene(&scene, &observations, &path).unwrap();
        let (read_scene_data, read_obs) = read_scene(&path).unwrap();
        assert_eq!(read_obs, observations);
        assert_eq!(read_scene_data.points, scene.points);
        for (a, b) in read_scene_data.cameras.iter().zip(&scene.cameras) {
            assert_eq!(a.matrix(), b.matrix());
        }
    }

    #[test]
    fn unknown_records_are_rejected_with_line() {
        let path = std::env::temp_dir().join(format!("granulite-badscene-{}.txt", std::process::id()));
        std::fs::write(&path, "# ok\nWAT 1 2 3\n").unwrap();
        match read_scene(&path) {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
