use std::fmt::Write as _;
use std::path::Path;

use super::{write_text, IoError};
use crate::kernel::{GeometryError, PolytopeMesh};

/// OBJ text for a 3D mesh: one `v` per vertex, facets fanned into
/// triangles wound counterclockwise seen from outside.
pub fn write_obj(mesh: &PolytopeMesh<f64>) -> Result<String, IoError> {
    if mesh.dim() != 3 {
        return Err(GeometryError::DimUnsupported(mesh.dim()).into());
    }
    let mut out = String::new();
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {:?} {:?} {:?}", v[0], v[1], v[2]);
    }
    for facet in mesh.facets().iter().flatten() {
        let ring = &facet.ring;
        for i in 1..ring.len().saturating_sub(1) {
            let _ = writeln!(out, "f {} {} {}", ring[0] + 1, ring[i] + 1, ring[i + 1] + 1);
        }
    }
    Ok(out)
}

pub fn export_obj(mesh: &PolytopeMesh<f64>, path: &Path) -> Result<(), IoError> {
    write_text(path, &write_obj(mesh)?)
}
