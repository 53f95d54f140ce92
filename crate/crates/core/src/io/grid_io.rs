use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::Point3;

use super::IoError;
use crate::recon::{GridLayout, ScalarGrid};

/// Debug dump of a scalar grid: a small text header (dimensions, origin,
/// spacing) followed by the node values as raw little-endian f64.
pub fn write_grid(grid: &ScalarGrid, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    let l = grid.layout;
    writeln!(w, "grid {} {} {}", l.nx, l.ny, l.nz)?;
    writeln!(w, "origin {} {} {}", l.origin.x, l.origin.y, l.origin.z)?;
    writeln!(w, "spacing {}", l.spacing)?;
    writeln!(w, "data")?;
    for v in &grid.values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<ScalarGrid, IoError> {
    let mut reader = BufReader::new(File::open(path.as_ref())?);
    let mut line = String::new();
    let mut line_no = 0;
    let mut next_line = |reader: &mut BufReader<File>, line: &mut String| -> Result<(), IoError> {
        line.clear();
        line_no += 1;
        if reader.read_line(line)? == 0 {
            return Err(IoError::parse(line_no, "unexpected end of grid header"));
        }
        Ok(())
    };

    next_line(&mut reader, &mut line)?;
    let dims: Vec<usize> = line
        .trim()
        .strip_prefix("grid ")
        .map(|s| s.split_whitespace().filter_map(|t| t.parse().ok()).collect())
        .unwrap_or_default();
    if dims.len() != 3 {
        return Err(IoError::parse(1, "expected `grid nx ny nz`"));
    }
    next_line(&mut reader, &mut line)?;
    let origin: Vec<f64> = line
        .trim()
        .strip_prefix("origin ")
        .map(|s| s.split_whitespace().filter_map(|t| t.parse().ok()).collect())
        .unwrap_or_default();
    if origin.len() != 3 {
        return Err(IoError::parse(2, "expected `origin x y z`"));
    }
    next_line(&mut reader, &mut line)?;
    let spacing: f64 = line
        .trim()
        .strip_prefix("spacing ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| IoError::parse(3, "expected `spacing h`"))?;
    next_line(&mut reader, &mut line)?;
    if line.trim() != "data" {
        return Err(IoError::parse(4, "expected `data`"));
    }

    let layout = GridLayout::new(
        dims[0],
        dims[1],
        dims[2],
        Point3::new(origin[0], origin[1], origin[2]),
        spacing,
    )
    .map_err(|e| IoError::InvalidData(e.to_string()))?;
    let mut values = vec![0.0f64; layout.node_total()];
    let mut buf = [0u8; 8];
    for v in &mut values {
        reader.read_exact(&mut buf)?;
        *v = f64::from_le_bytes(buf);
    }
    Ok(ScalarGrid { layout, values })
}
