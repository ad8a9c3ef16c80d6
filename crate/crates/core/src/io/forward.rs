use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{from_toml, parse_direction, read_text, to_toml, IoError};
use crate::kernel::{intersect_halfspaces, polytope_from_points, DirectionSet, PolytopeMesh, SupportVector};
use crate::measure::sp_measure;
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub u: Vec<f64>,
    pub h: f64,
}

/// Input of the forward map: either support numbers or a vertex list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardInput {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub halfspaces: Vec<Halfspace>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardRecord {
    pub u: Vec<f64>,
    pub h: f64,
    pub area: f64,
    pub sp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardReport {
    pub dim: usize,
    pub p: f64,
    pub volume: f64,
    pub directions: Vec<ForwardRecord>,
}

impl ForwardInput {
    pub fn read(path: &Path) -> Result<Self, IoError> {
        from_toml(&read_text(path)?)
    }

    pub fn mesh(&self) -> Result<PolytopeMesh<f64>, IoError> {
        match (self.halfspaces.is_empty(), self.vertices.is_empty()) {
            (false, true) => {
                let dirs = self
                    .halfspaces
                    .iter()
                    .enumerate()
                    .map(|(k, hs)| parse_direction(self.dim, k, &hs.u))
                    .collect::<Result<Vec<_>, _>>()?;
                let dirs = DirectionSet::new(self.dim, dirs)?;
                let h = SupportVector(self.halfspaces.iter().map(|hs| hs.h).collect());
                Ok(intersect_halfspaces(&dirs, &h)?)
            }
            (true, false) => {
                let points = self
                    .vertices
                    .iter()
                    .map(|c| {
                        Vector::from_slice(self.dim, c)
                            .ok_or_else(|| IoError::Parse(format!("vertex with {} coordinates", c.len())))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(polytope_from_points(self.dim, &points)?.1)
            }
            _ => Err(IoError::Parse("give exactly one of `halfspaces` or `vertices`".into())),
        }
    }
}

impl ForwardReport {
    pub fn to_toml_string(&self) -> Result<String, IoError> {
        to_toml(self)
    }
}

/// The L_p surface area measure of the described polytope.
pub fn forward(input: &ForwardInput, p: f64) -> Result<ForwardReport, IoError> {
    let mesh = input.mesh()?;
    let sp = sp_measure(&mesh, p)?;
    let dim = mesh.dim();
    let directions = mesh
        .directions()
        .iter()
        .zip(mesh.support())
        .zip(mesh.facet_areas())
        .zip(sp)
        .map(|(((u, &h), area), sp)| ForwardRecord { u: u.coords(dim).to_vec(), h, area, sp })
        .collect();
    Ok(ForwardReport { dim, p, volume: mesh.volume(), directions })
}
