use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{Point3, Vector3};

use super::palette::{BOUNDARY_COLOR, PALETTE};
use super::IoError;
use crate::geometry::{PointCloud, TriMesh};
use crate::segment::{FaceLabel, SegmentLabels};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyFormat {
    Ascii,
    BinaryLittleEndian,
}

/// What a PLY file contained: a bare point cloud, or an indexed mesh when a
/// face element is present.
#[derive(Debug, Clone, PartialEq)]
pub enum PlyData {
    Cloud(PointCloud),
    Mesh(TriMesh),
}

/// Parsed file plus non-fatal notes (skipped properties, ignored
/// attributes).
#[derive(Debug, Clone)]
pub struct PlyReadResult {
    pub data: PlyData,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str, line: usize) -> Result<Self, IoError> {
        Ok(match name {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            other => return Err(IoError::parse(line, format!("unknown type `{other}`"))),
        })
    }

    fn size(self) -> usize {
        match self {
            Self::I8 | Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::I32 | Self::U32 | Self::F32 => 4,
            Self::F64 => 8,
        }
    }

    fn read_binary(self, bytes: &[u8]) -> f64 {
        match self {
            Self::I8 => bytes[0] as i8 as f64,
            Self::U8 => bytes[0] as f64,
            Self::I16 => i16::from_le_bytes([bytes[0], bytes[1]]) as f64,
            Self::U16 => u16::from_le_bytes([bytes[0], bytes[1]]) as f64,
            Self::I32 => i32::from_le_bytes(bytes[..4].try_into().unwrap()) as f64,
            Self::U32 => u32::from_le_bytes(bytes[..4].try_into().unwrap()) as f64,
            Self::F32 => f32::from_le_bytes(bytes[..4].try_into().unwrap()) as f64,
            Self::F64 => f64::from_le_bytes(bytes[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { name: String, count: Scalar, item: Scalar },
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

/// Read a PLY 1.0 file (ASCII or binary little-endian). Vertex positions are
/// required; normals (`nx ny nz`) and colors (`red green blue`) are picked
/// up when present; everything else is skipped with a warning. A `face`
/// element turns the result into a mesh.
pub fn read_ply(path: impl AsRef<Path>) -> Result<PlyReadResult, IoError> {
    let mut reader = BufReader::new(File::open(path.as_ref())?);
    let mut warnings = Vec::new();

    // Header.
    fn read_line(reader: &mut BufReader<File>, line_no: &mut usize) -> Result<String, IoError> {
        let mut line = String::new();
        let n = reader.read_line(&mut line)?;
        *line_no += 1;
        if n == 0 {
            return Err(IoError::parse(*line_no, "unexpected end of header"));
        }
        Ok(line.trim_end().to_string())
    }
    let mut line_no = 0usize;

    let magic = read_line(&mut reader, &mut line_no)?;
    if magic.trim() != "ply" {
        return Err(IoError::parse(1, "missing `ply` magic"));
    }
    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let line = read_line(&mut reader, &mut line_no)?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("comment") | Some("obj_info") | None => continue,
            Some("format") => {
                let kind = parts.next().unwrap_or("");
                format = Some(match kind {
                    "ascii" => PlyFormat::Ascii,
                    "binary_little_endian" => PlyFormat::BinaryLittleEndian,
                    "binary_big_endian" => {
                        return Err(IoError::UnsupportedFormat(
                            "binary_big_endian PLY".to_string(),
                        ))
                    }
                    other => {
                        return Err(IoError::parse(line_no, format!("unknown format `{other}`")))
                    }
                });
            }
            Some("element") => {
                let name = parts
                    .next()
                    .ok_or_else(|| IoError::parse(line_no, "element needs a name"))?;
                let count: usize = parts
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| IoError::parse(line_no, "element needs a count"))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| IoError::parse(line_no, "property before any element"))?;
                let first = parts
                    .next()
                    .ok_or_else(|| IoError::parse(line_no, "property needs a type"))?;
                if first == "list" {
                    let count = Scalar::parse(
                        parts
                            .next()
                            .ok_or_else(|| IoError::parse(line_no, "list needs a count type"))?,
                        line_no,
                    )?;
                    let item = Scalar::parse(
                        parts
                            .next()
                            .ok_or_else(|| IoError::parse(line_no, "list needs an item type"))?,
                        line_no,
                    )?;
                    let name = parts
                        .next()
                        .ok_or_else(|| IoError::parse(line_no, "list needs a name"))?;
                    element.properties.push(Property::List {
                        name: name.to_string(),
                        count,
                        item,
                    });
                } else {
                    let ty = Scalar::parse(first, line_no)?;
                    let name = parts
                        .next()
                        .ok_or_else(|| IoError::parse(line_no, "property needs a name"))?;
                    element.properties.push(Property::Scalar {
                        name: name.to_string(),
                        ty,
                    });
                }
            }
            Some("end_header") => break,
            Some(other) => {
                return Err(IoError::parse(
                    line_no,
                    format!("unknown header keyword `{other}`"),
                ))
            }
        }
    }
    let format =
        format.ok_or_else(|| IoError::parse(line_no, "header has no format declaration"))?;

    let mut positions = Vec::new();
    let mut normals: Option<Vec<Vector3<f64>>> = None;
    let mut colors: Option<Vec<[u8; 3]>> = None;
    let mut faces: Option<Vec<[u32; 3]>> = None;

    for element in &elements {
        match element.name.as_str() {
            "vertex" => {
                let layout = VertexLayout::new(element, &mut warnings)?;
                positions.reserve(element.count);
                for _ in 0..element.count {
                    let values = read_record(&mut reader, format, element, &mut line_no)?;
                    let (p, n, c) = layout.extract(&values);
                    positions.push(p);
                    if let Some(n) = n {
                        normals.get_or_insert_with(Vec::new).push(n);
                    }
                    if let Some(c) = c {
                        colors.get_or_insert_with(Vec::new).push(c);
                    }
                }
            }
            "face" => {
                let list_index = element
                    .properties
                    .iter()
                    .position(|p| {
                        matches!(p, Property::List { name, .. }
                            if name == "vertex_indices" || name == "vertex_index")
                    })
                    .ok_or_else(|| {
                        IoError::parse(line_no, "face element has no vertex_indices list")
                    })?;
                for (index, property) in element.properties.iter().enumerate() {
                    if index != list_index {
                        warnings.push(format!(
                            "skipping face property `{}`",
                            property_name(property)
                        ));
                    }
                }
                let out = faces.get_or_insert_with(Vec::new);
                let mut warned_polygon = false;
                for _ in 0..element.count {
                    let values = read_record(&mut reader, format, element, &mut line_no)?;
                    let indices = &values[list_index];
                    if indices.len() < 3 {
                        return Err(IoError::parse(
                            line_no,
                            format!("face with {} vertices", indices.len()),
                        ));
                    }
                    if indices.len() > 3 && !warned_polygon {
                        warnings.push("triangulating non-triangle faces".to_string());
                        warned_polygon = true;
                    }
                    let to_index = |v: f64| -> Result<u32, IoError> {
                        if v < 0.0 || v.fract() != 0.0 {
                            return Err(IoError::parse(line_no, format!("bad vertex index {v}")));
                        }
                        Ok(v as u32)
                    };
                    let a = to_index(indices[0])?;
                    for k in 1..indices.len() - 1 {
                        out.push([a, to_index(indices[k])?, to_index(indices[k + 1])?]);
                    }
                }
            }
            other => {
                warnings.push(format!("skipping element `{other}`"));
                for _ in 0..element.count {
                    read_record(&mut reader, format, element, &mut line_no)?;
                }
            }
        }
    }

    if let Some(normals) = &normals {
        if normals.len() != positions.len() {
            return Err(IoError::InvalidData(format!(
                "{} normals for {} vertices",
                normals.len(),
                positions.len()
            )));
        }
    }
    if let Some(colors) = &colors {
        if colors.len() != positions.len() {
            return Err(IoError::InvalidData(format!(
                "{} colors for {} vertices",
                colors.len(),
                positions.len()
            )));
        }
    }

    let data = match faces {
        Some(faces) => {
            if normals.is_some() || colors.is_some() {
                warnings.push("vertex normals/colors on a mesh file are ignored".to_string());
            }
            PlyData::Mesh(TriMesh::new(positions, faces))
        }
        None => PlyData::Cloud(
            PointCloud::new(positions, normals, colors)
                .map_err(|e| IoError::InvalidData(e.to_string()))?,
        ),
    };
    Ok(PlyReadResult { data, warnings })
}

fn property_name(p: &Property) -> &str {
    match p {
        Property::Scalar { name, .. } => name,
        Property::List { name, .. } => name,
    }
}

/// Positions of the interesting vertex properties within a record.
struct VertexLayout {
    xyz: [usize; 3],
    normal: Option<[usize; 3]>,
    color: Option<[usize; 3]>,
}

impl VertexLayout {
    fn new(element: &Element, warnings: &mut Vec<String>) -> Result<Self, IoError> {
        let find = |name: &str| -> Option<usize> {
            element.properties.iter().position(|p| {
                matches!(p, Property::Scalar { name: n, .. } if n == name)
            })
        };
        let xyz = match (find("x"), find("y"), find("z")) {
            (Some(x), Some(y), Some(z)) => [x, y, z],
            _ => {
                return Err(IoError::InvalidData(
                    "vertex element lacks x/y/z properties".to_string(),
                ))
            }
        };
        let normal = match (find("nx"), find("ny"), find("nz")) {
            (Some(a), Some(b), Some(c)) => Some([a, b, c]),
            _ => None,
        };
        let color = match (find("red"), find("green"), find("blue")) {
            (Some(a), Some(b), Some(c)) => Some([a, b, c]),
            _ => None,
        };
        let known: Vec<usize> = xyz
            .iter()
            .chain(normal.iter().flatten())
            .chain(color.iter().flatten())
            .copied()
            .collect();
        for (index, property) in element.properties.iter().enumerate() {
            if !known.contains(&index) {
                warnings.push(format!(
                    "skipping vertex property `{}`",
                    property_name(property)
                ));
            }
        }
        Ok(Self { xyz, normal, color })
    }

    fn extract(
        &self,
        values: &[Vec<f64>],
    ) -> (Point3<f64>, Option<Vector3<f64>>, Option<[u8; 3]>) {
        let at = |i: usize| values[i][0];
        let p = Point3::new(at(self.xyz[0]), at(self.xyz[1]), at(self.xyz[2]));
        let n = self
            .normal
            .map(|[a, b, c]| Vector3::new(at(a), at(b), at(c)));
        let c = self.color.map(|[a, b, c]| {
            [at(a) as u8, at(b) as u8, at(c) as u8]
        });
        (p, n, c)
    }
}

/// One record of an element: each property's values (lists hold many).
fn read_record(
    reader: &mut BufReader<File>,
    format: PlyFormat,
    element: &Element,
    line_no: &mut usize,
) -> Result<Vec<Vec<f64>>, IoError> {
    match format {
        PlyFormat::Ascii => {
            let mut line = String::new();
            let n = reader.read_line(&mut line)?;
            *line_no += 1;
            if n == 0 {
                return Err(IoError::parse(*line_no, "unexpected end of file"));
            }
            let mut tokens = line.split_whitespace();
            let mut next_value = |line_no: usize| -> Result<f64, IoError> {
                tokens
                    .next()
                    .ok_or_else(|| IoError::parse(line_no, "record too short"))?
                    .parse::<f64>()
                    .map_err(|e| IoError::parse(line_no, format!("bad number: {e}")))
            };
            let mut out = Vec::with_capacity(element.properties.len());
            for property in &element.properties {
                match property {
                    Property::Scalar { .. } => out.push(vec![next_value(*line_no)?]),
                    Property::List { .. } => {
                        let count = next_value(*line_no)? as usize;
                        let mut items = Vec::with_capacity(count);
                        for _ in 0..count {
                            items.push(next_value(*line_no)?);
                        }
                        out.push(items);
                    }
                }
            }
            Ok(out)
        }
        PlyFormat::BinaryLittleEndian => {
            let mut out = Vec::with_capacity(element.properties.len());
            let mut buf = [0u8; 8];
            let mut read_scalar = |reader: &mut BufReader<File>, ty: Scalar| -> Result<f64, IoError> {
                let size = ty.size();
                reader.read_exact(&mut buf[..size])?;
                Ok(ty.read_binary(&buf[..size]))
            };
            for property in &element.properties {
                match property {
                    Property::Scalar { ty, .. } => out.push(vec![read_scalar(reader, *ty)?]),
                    Property::List { count, item, .. } => {
                        let n = read_scalar(reader, *count)? as usize;
                        let mut items = Vec::with_capacity(n);
                        for _ in 0..n {
                            items.push(read_scalar(reader, *item)?);
                        }
                        out.push(items);
                    }
                }
            }
            Ok(out)
        }
    }
}

fn open_writer(path: impl AsRef<Path>) -> Result<BufWriter<File>, IoError> {
    Ok(BufWriter::new(File::create(path.as_ref())?))
}

fn float_token(v: f64) -> String {
    // Shortest representation that round-trips exactly.
    format!("{v}")
}

/// Write a point cloud; positions and normals as doubles, colors as uchar.
pub fn write_ply_cloud(
    cloud: &PointCloud,
    path: impl AsRef<Path>,
    format: PlyFormat,
) -> Result<(), IoError> {
    let mut w = open_writer(path)?;
    write_header(
        &mut w,
        format,
        cloud.len(),
        cloud.normals.is_some(),
        cloud.colors.is_some(),
        None,
    )?;
    for i in 0..cloud.len() {
        let p = cloud.positions[i];
        match format {
            PlyFormat::Ascii => {
                let mut tokens = vec![float_token(p.x), float_token(p.y), float_token(p.z)];
                if let Some(normals) = &cloud.normals {
                    let n = normals[i];
                    tokens.extend([float_token(n.x), float_token(n.y), float_token(n.z)]);
                }
                if let Some(colors) = &cloud.colors {
                    let c = colors[i];
                    tokens.extend([c[0].to_string(), c[1].to_string(), c[2].to_string()]);
                }
                writeln!(w, "{}", tokens.join(" "))?;
            }
            PlyFormat::BinaryLittleEndian => {
                for v in [p.x, p.y, p.z] {
                    w.write_all(&v.to_le_bytes())?;
                }
                if let Some(normals) = &cloud.normals {
                    for v in [normals[i].x, normals[i].y, normals[i].z] {
                        w.write_all(&v.to_le_bytes())?;
                    }
                }
                if let Some(colors) = &cloud.colors {
                    w.write_all(&colors[i])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Write an indexed triangle mesh.
pub fn write_ply_mesh(
    mesh: &TriMesh,
    path: impl AsRef<Path>,
    format: PlyFormat,
) -> Result<(), IoError> {
    let mut w = open_writer(path)?;
    write_header(
        &mut w,
        format,
        mesh.vertex_count(),
        false,
        false,
        Some((mesh.face_count(), false)),
    )?;
    write_mesh_body(&mut w, mesh, format, None)?;
    w.flush()?;
    Ok(())
}

/// Write a mesh with per-face colors taken from the segment palette
/// (boundary faces black), plus a sidecar label text file next to it
/// (`<stem>.labels.txt`).
pub fn write_ply_labeled(
    mesh: &TriMesh,
    labels: &SegmentLabels,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    let path = path.as_ref();
    if labels.face_count() != mesh.face_count() {
        return Err(IoError::InvalidData(format!(
            "labels cover {} faces, mesh has {}",
            labels.face_count(),
            mesh.face_count()
        )));
    }
    let mut w = open_writer(path)?;
    write_header(
        &mut w,
        PlyFormat::BinaryLittleEndian,
        mesh.vertex_count(),
        false,
        false,
        Some((mesh.face_count(), true)),
    )?;
    write_mesh_body(&mut w, mesh, PlyFormat::BinaryLittleEndian, Some(labels))?;
    w.flush()?;

    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("labels");
    let sidecar = path.with_file_name(format!("{stem}.labels.txt"));
    super::labels_io::write_labels(labels, sidecar)?;
    Ok(())
}

fn write_header(
    w: &mut impl Write,
    format: PlyFormat,
    vertices: usize,
    normals: bool,
    colors: bool,
    faces: Option<(usize, bool)>,
) -> Result<(), IoError> {
    writeln!(w, "ply")?;
    match format {
        PlyFormat::Ascii => writeln!(w, "format ascii 1.0")?,
        PlyFormat::BinaryLittleEndian => writeln!(w, "format binary_little_endian 1.0")?,
    }
    writeln!(w, "comment granulite")?;
    writeln!(w, "element vertex {vertices}")?;
    for axis in ["x", "y", "z"] {
        writeln!(w, "property double {axis}")?;
    }
    if normals {
        for axis in ["nx", "ny", "nz"] {
            writeln!(w, "property double {axis}")?;
        }
    }
    if colors {
        for channel in ["red", "green", "blue"] {
            writeln!(w, "property uchar {channel}")?;
        }
    }
    if let Some((count, face_colors)) = faces {
        writeln!(w, "element face {count}")?;
        writeln!(w, "property list uchar uint vertex_indices")?;
        if face_colors {
            for channel in ["red", "green", "blue"] {
                writeln!(w, "property uchar {channel}")?;
            }
        }
    }
    writeln!(w, "end_header")?;
    Ok(())
}

fn write_mesh_body(
    w: &mut impl Write,
    mesh: &TriMesh,
    format: PlyFormat,
    labels: Option<&SegmentLabels>,
) -> Result<(), IoError> {
    match format {
        PlyFormat::Ascii => {
            for p in &mesh.vertices {
                writeln!(
                    w,
                    "{} {} {}",
                    float_token(p.x),
                    float_token(p.y),
                    float_token(p.z)
                )?;
            }
            for (f, face) in mesh.faces.iter().enumerate() {
                if let Some(labels) = labels {
                    let c = face_color(&labels.labels[f]);
                    writeln!(
                        w,
                        "3 {} {} {} {} {} {}",
                        face[0], face[1], face[2], c[0], c[1], c[2]
                    )?;
                } else {
                    writeln!(w, "3 {} {} {}", face[0], face[1], face[2])?;
                }
            }
        }
        PlyFormat::BinaryLittleEndian => {
            for p in &mesh.vertices {
                for v in [p.x, p.y, p.z] {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
            for (f, face) in mesh.faces.iter().enumerate() {
                w.write_all(&[3u8])?;
                for idx in face {
                    w.write_all(&idx.to_le_bytes())?;
                }
                if let Some(labels) = labels {
                    w.write_all(&face_color(&labels.labels[f]))?;
                }
            }
        }
    }
    Ok(())
}

fn face_color(label: &FaceLabel) -> [u8; 3] {
    match label {
        FaceLabel::Segment(s) => PALETTE[*s as usize % PALETTE.len()],
        FaceLabel::Boundary => BOUNDARY_COLOR,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn temp_path(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("granulite-ply-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn minimal_ascii_fixture_parses_to_a_mesh() {
        let path = temp_path("minimal.ply");
        std::fs::write(
            &path,
            "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\n\
             property float z\nelement face 1\nproperty list uchar int vertex_indices\n\
             end_header\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n",
        )
        .unwrap();
        let result = read_ply(&path).unwrap();
        match result.data {
            PlyData::Mesh(mesh) => {
                assert_eq!(mesh.face_count(), 1);
                assert_eq!(mesh.vertex_count(), 3);
            }
            PlyData::Cloud(_) => panic!("expected a mesh"),
        }
    }

    #[test]
    fn binary_cloud_roundtrip_is_bit_exact() {
        let cloud = fixtures::sphere_cloud(64, 3);
        let path = temp_path("cloud.ply");
        write_ply_cloud(&cloud, &path, PlyFormat::BinaryLittleEndian).unwrap();
        let result = read_ply(&path).unwrap();
        match result.data {
            PlyData::Cloud(read) => assert_eq!(read, cloud),
            PlyData::Mesh(_) => panic!("expected a cloud"),
        }
    }

    #[test]
    fn ascii_cloud_roundtrip_is_exact_with_shortest_floats() {
        let cloud = fixtures::sphere_cloud(64, 4);
        let path = temp_path("cloud_ascii.ply");
        write_ply_cloud(&cloud, &path, PlyFormat::Ascii).unwrap();
        match read_ply(&path).unwrap().data {
            PlyData::Cloud(read) => {
                for (a, b) in read.positions.iter().zip(&cloud.positions) {
                    assert!((a - b).norm() < 1e-6);
                }
            }
            PlyData::Mesh(_) => panic!("expected a cloud"),
        }
    }

    #[test]
    fn normals_and_colors_are_read_back() {
        let (cloud, _) = fixtures::two_ball_cloud();
        let path = temp_path("attrs.ply");
        write_ply_cloud(&cloud, &path, PlyFormat::BinaryLittleEndian).unwrap();
        match read_ply(&path).unwrap().data {
            PlyData::Cloud(read) => {
                assert!(read.normals.is_some());
                assert!(read.colors.is_some());
                assert_eq!(read, cloud);
            }
            PlyData::Mesh(_) => panic!("expected a cloud"),
        }
    }

    #[test]
    fn unknown_properties_are_skipped_with_a_warning() {
        let path = temp_path("extra.ply");
        std::fs::write(
            &path,
            "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n\
             property float z\nproperty float confidence\nend_header\n0 0 0 0.5\n1 1 1 0.75\n",
        )
        .unwrap();
        let result = read_ply(&path).unwrap();
        assert!(result
            .warnings
            .iter()
            .any(|w| w.contains("confidence")));
        match result.data {
            PlyData::Cloud(cloud) => assert_eq!(cloud.len(), 2),
            PlyData::Mesh(_) => panic!("expected a cloud"),
        }
    }

    #[test]
    fn big_endian_is_unsupported() {
        let path = temp_path("bigendian.ply");
        std::fs::write(
            &path,
            "ply\nformat binary_big_endian 1.0\nelement vertex 0\nproperty float x\nend_header\n",
        )
        .unwrap();
        assert!(matches!(
            read_ply(&path),
            Err(IoError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn parse_errors_carry_the_line() {
        let path = temp_path("bad.ply");
        std::fs::write(
            &path,
            "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\n\
             property float z\nend_header\n0 zero 0\n",
        )
        .unwrap();
        match read_ply(&path) {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn mesh_roundtrip_is_bit_exact() {
        let mesh = fixtures::icosphere(2, 1.0);
        let path = temp_path("mesh.ply");
        write_ply_mesh(&mesh, &path, PlyFormat::BinaryLittleEndian).unwrap();
        match read_ply(&path).unwrap().data {
            PlyData::Mesh(read) => assert_eq!(read, mesh),
            PlyData::Cloud(_) => panic!("expected a mesh"),
        }
    }

    #[test]
    fn labeled_mesh_preserves_face_count_and_writes_sidecar() {
        use crate::segment::SegmentLabels;
        let mesh = fixtures::icosphere(1, 1.0);
        let labels = SegmentLabels {
            labels: (0..mesh.face_count())
                .map(|f| {
                    if f % 7 == 0 {
                        FaceLabel::Boundary
                    } else {
                        FaceLabel::Segment((f % 3) as u32)
                    }
                })
                .collect(),
            segment_count: 3,
        };
        let path = temp_path("labeled.ply");
        write_ply_labeled(&mesh, &labels, &path).unwrap();
        match read_ply(&path).unwrap().data {
            PlyData::Mesh(read) => {
                assert_eq!(read.face_count(), mesh.face_count());
                assert_eq!(read.vertices, mesh.vertices);
            }
            PlyData::Cloud(_) => panic!("expected a mesh"),
        }
        let sidecar = path.with_file_name("labeled.labels.txt");
        let read = super::super::read_labels(&sidecar).unwrap();
        assert_eq!(read, labels);
    }
}
