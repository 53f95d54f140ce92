use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::IoError;
use crate::segment::{FaceLabel, SegmentLabels};

/// Write labels as text: a `S <segment_count>` header, then one
/// `<face_id> <segment_id|B>` line per face in ascending face order.
pub fn write_labels(labels: &SegmentLabels, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    writeln!(w, "S {}", labels.segment_count)?;
    for (face, label) in labels.labels.iter().enumerate() {
        match label {
            FaceLabel::Segment(s) => writeln!(w, "{face} {s}")?,
            FaceLabel::Boundary => writeln!(w, "{face} B")?,
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a label file; face ids must cover 0..N-1 exactly once.
pub fn read_labels(path: impl AsRef<Path>) -> Result<SegmentLabels, IoError> {
    let reader = BufReader::new(File::open(path.as_ref())?);
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| IoError::parse(1, "empty label file"))?;
    let header = header?;
    let segment_count: u32 = header
        .strip_prefix("S ")
        .and_then(|c| c.trim().parse().ok())
        .ok_or_else(|| IoError::parse(1, "expected `S <segment_count>` header"))?;

    let mut entries: Vec<(usize, FaceLabel)> = Vec::new();
    for (index, line) in lines {
        let line_no = index + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let face: usize = parts
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| IoError::parse(line_no, "bad face id"))?;
        let label = match parts
            .next()
            .ok_or_else(|| IoError::parse(line_no, "missing label"))?
        {
            "B" => FaceLabel::Boundary,
            s => {
                let id: u32 = s
                    .parse()
                    .map_err(|_| IoError::parse(line_no, format!("bad segment id `{s}`")))?;
                if id >= segment_count {
                    return Err(IoError::parse(
                        line_no,
                        format!("segment id {id} exceeds declared count {segment_count}"),
                    ));
                }
                FaceLabel::Segment(id)
            }
        };
        entries.push((face, label));
    }

    let mut labels = vec![None; entries.len()];
    for (face, label) in entries {
        if face >= labels.len() || labels[face].is_some() {
            return Err(IoError::InvalidData(format!(
                "face ids must cover 0..{} exactly once (face {face})",
                labels.len()
            )));
        }
        labels[face] = Some(label);
    }
    Ok(SegmentLabels {
        labels: labels.into_iter().map(|l| l.expect("dense")).collect(),
        segment_count,
    })
}
