use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{from_toml, read_text, to_toml, write_text, IoError, ProblemFile};
use crate::kernel::{intersect_halfspaces, PolytopeMesh, SupportVector};
use crate::measure::sp_measure;
use crate::outer::SolveReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionRecord {
    pub u: Vec<f64>,
    pub alpha: f64,
    pub h: f64,
    pub area: f64,
    pub sp: f64,
    /// `|sp - alpha| / alpha`.
    pub residual: f64,
}

/// Everything needed to audit a solve after the fact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub regime: String,
    pub termination: String,
    pub converged: bool,
    pub iterations: usize,
    pub wall_time_seconds: f64,
    pub tol: f64,
    pub scale: f64,
    pub max_relative_residual: f64,
    pub stationarity: f64,
    pub instance: ProblemFile,
    pub vertices: Vec<Vec<f64>>,
    pub directions: Vec<DirectionRecord>,
    pub objective_trace: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residual_trace: Vec<f64>,
}

impl RunReport {
    pub fn new(instance: ProblemFile, tol: f64, report: &SolveReport<f64>, wall_time_seconds: f64) -> Self {
        let mesh = &report.solution;
        let dim = mesh.dim();
        let p = instance.p;
        let directions = mesh
            .directions()
            .iter()
            .zip(&instance.items)
            .zip(mesh.support().iter().zip(mesh.facet_areas()))
            .zip(&report.residual.relative)
            .map(|(((u, item), (&h, area)), &residual)| DirectionRecord {
                u: u.coords(dim).to_vec(),
                alpha: item.alpha,
                h,
                area,
                sp: if p == 1.0 { area } else { h.powf(1.0 - p) * area },
                residual,
            })
            .collect();
        RunReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            regime: report.regime.name().to_string(),
            termination: report.termination.name().to_string(),
            converged: report.residual.max_relative <= tol,
            iterations: report.iterations,
            wall_time_seconds,
            tol,
            scale: report.scale,
            max_relative_residual: report.residual.max_relative,
            stationarity: report.residual.stationarity,
            instance,
            vertices: mesh.vertices().iter().map(|v| v.coords(dim).to_vec()).collect(),
            directions,
            objective_trace: report.objective_trace.clone(),
            residual_trace: report.residual_trace.clone(),
        }
    }

    pub fn to_toml_string(&self) -> Result<String, IoError> {
        to_toml(self)
    }

    /// Rebuilds the solution from the stored support numbers.
    pub fn mesh(&self) -> Result<PolytopeMesh<f64>, IoError> {
        let dirs = self.instance.directions()?;
        let h = SupportVector(self.directions.iter().map(|d| d.h).collect());
        Ok(intersect_halfspaces(&dirs, &h)?)
    }

    /// `S_p` of the stored solution, recomputed from scratch.
    pub fn recompute_sp(&self) -> Result<Vec<f64>, IoError> {
        Ok(sp_measure(&self.mesh()?, self.instance.p)?)
    }

    fn first_non_finite(&self) -> Option<String> {
        let scalars = [
            ("wall_time_seconds", self.wall_time_seconds),
            ("tol", self.tol),
            ("scale", self.scale),
            ("max_relative_residual", self.max_relative_residual),
            ("stationarity", self.stationarity),
            ("p", self.instance.p),
        ];
        if let Some((name, _)) = scalars.iter().find(|(_, v)| !v.is_finite()) {
            return Some(name.to_string());
        }
        for (k, d) in self.directions.iter().enumerate() {
            let fields = [("u", d.u.iter().all(|v| v.is_finite())), ("alpha", d.alpha.is_finite()),
                ("h", d.h.is_finite()), ("area", d.area.is_finite()), ("sp", d.sp.is_finite()),
                ("residual", d.residual.is_finite())];
            if let Some((name, _)) = fields.iter().find(|(_, ok)| !ok) {
                return Some(format!("directions[{k}].{name}"));
            }
        }
        if self.vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Some("vertices".into());
        }
        if self.objective_trace.iter().chain(&self.residual_trace).any(|v| !v.is_finite()) {
            return Some("trace".into());
        }
        None
    }
}

/// Writes `report`, refusing non-finite numbers.
pub fn write_report(report: &RunReport, path: &Path) -> Result<(), IoError> {
    if let Some(field) = report.first_non_finite() {
        return Err(IoError::Invalid(format!("non-finite value in {field}")));
    }
    write_text(path, &to_toml(report)?)
}

pub fn read_report(path: &Path) -> Result<RunReport, IoError> {
    from_toml(&read_text(path)?)
}
