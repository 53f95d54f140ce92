use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use nalgebra::Point3;

use super::IoError;
use crate::geometry::TriMesh;

/// Minimal OBJ import: `v` and `f` records only, fan-triangulating polygons.
/// Texture/normal indices after `/` are ignored.
pub fn read_obj(path: impl AsRef<Path>) -> Result<TriMesh, IoError> {
    let reader = BufReader::new(File::open(path.as_ref())?);
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();

    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        let trimmed = line.trim();
        let mut parts = trimmed.split_whitespace();
        match parts.next() {
            Some("v") => {
                let mut coord = |line_no: usize| -> Result<f64, IoError> {
                    parts
                        .next()
                        .ok_or_else(|| IoError::parse(line_no, "vertex needs 3 coordinates"))?
                        .parse()
                        .map_err(|e| IoError::parse(line_no, format!("bad coordinate: {e}")))
                };
                vertices.push(Point3::new(
                    coord(line_no)?,
                    coord(line_no)?,
                    coord(line_no)?,
                ));
            }
            Some("f") => {
                let indices: Vec<u32> = parts
                    .map(|token| {
                        let first = token.split('/').next().unwrap_or(token);
                        let signed: i64 = first
                            .parse()
                            .map_err(|e| IoError::parse(line_no, format!("bad index: {e}")))?;
                        let resolved = if signed < 0 {
                            vertices.len() as i64 + signed
                        } else {
                            signed - 1
                        };
                        if resolved < 0 || resolved as usize >= vertices.len() {
                            return Err(IoError::parse(
                                line_no,
                                format!("vertex index {signed} out of range"),
                            ));
                        }
                        Ok(resolved as u32)
                    })
                    .collect::<Result<_, _>>()?;
                if indices.len() < 3 {
                    return Err(IoError::parse(line_no, "face needs at least 3 vertices"));
                }
                for k in 1..indices.len() - 1 {
                    faces.push([indices[0], indices[k], indices[k + 1]]);
                }
            }
            _ => {} // comments, normals, groups, materials
        }
    }
    Ok(TriMesh::new(vertices, faces))
}
