//! File formats: PLY clouds and meshes (ASCII and binary little-endian),
//! OBJ import, segmentation label files, bundle-adjustment scene files, and
//! raw grid dumps.

mod grid_io;
mod labels_io;
mod obj;
pub mod palette;
mod ply;
mod scene_io;

pub use grid_io::{read_grid, write_grid};
pub use labels_io::{read_labels, write_labels};
pub use obj::read_obj;
pub use ply::{
    read_ply, write_ply_cloud, write_ply_labeled, write_ply_mesh, PlyData, PlyFormat,
    PlyReadResult,
};
pub use scene_io::{read_scene, write_scene};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("invalid data: {0}")]
    InvalidData(String),
}

impl IoError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Self::Parse {
            line,
            message: message.into(),
        }
    }
}
