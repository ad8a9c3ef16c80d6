//! Problem files, run reports, OBJ export and random instances.
//!
//! Everything on disk is TOML. Floats are written in shortest round-trip
//! decimal form, so reading a file back reproduces every number bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{DirectionSet, GeometryError};
use crate::measure::{AdmissionError, DiscreteMeasure, MeasureError};
use crate::outer::{Method, Regime, SolverOptions};
use crate::vector::Vector;

mod forward;
mod generate;
mod obj;
mod report;

pub use forward::{forward, ForwardInput, ForwardRecord, ForwardReport, Halfspace};
pub use generate::gen_random_instance;
pub use obj::{export_obj, write_obj};
pub use report::{read_report, write_report, DirectionRecord, RunReport};

/// Directions may be off unit length by this much before renormalization.
pub const DIRECTION_NORM_SLACK: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("inadmissible instance: {0}")]
    Admission(#[from] AdmissionError<f64>),
    #[error(transparent)]
    Geometry(#[from] GeometryError<f64>),
    #[error(transparent)]
    Measure(#[from] MeasureError<f64>),
    #[error("refusing to write: {0}")]
    Invalid(String),
    #[error("could not generate an admissible instance in {attempts} attempts")]
    Infeasible { attempts: usize },
}

impl IoError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io { path: path.to_path_buf(), source }
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|e| IoError::io(path, e))
}

pub(crate) fn to_toml<S: Serialize>(value: &S) -> Result<String, IoError> {
    toml::to_string(value).map_err(|e| IoError::Invalid(e.to_string()))
}

pub(crate) fn from_toml<D: for<'de> Deserialize<'de>>(text: &str) -> Result<D, IoError> {
    toml::from_str(text).map_err(|e| IoError::Parse(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub u: Vec<f64>,
    pub alpha: f64,
}

/// Optional `[options]` block of a problem file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    /// `"lbfgs"` or `"gradient"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memory: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub armijo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backtrack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_backtracks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_relative_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_tol: Option<f64>,
    /// `"sub-one"` or `"p-ge-one"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<bool>,
}

impl OptionsBlock {
    pub fn to_options(&self) -> Result<SolverOptions<f64>, IoError> {
        let mut opts = SolverOptions::default();
        if let Some(v) = self.tol {
            opts.tol = v;
        }
        if let Some(v) = self.max_iterations {
            opts.max_iterations = v;
        }
        if let Some(m) = &self.method {
            opts.method = match m.as_str() {
                "lbfgs" => Method::Lbfgs,
                "gradient" => Method::Gradient,
                other => return Err(IoError::Parse(format!("unknown method {other:?}"))),
            };
        }
        if let Some(v) = self.memory {
            opts.memory = v;
        }
        if let Some(v) = self.armijo {
            opts.armijo = v;
        }
        if let Some(v) = self.backtrack {
            opts.backtrack = v;
        }
        if let Some(v) = self.max_backtracks {
            opts.max_backtracks = v;
        }
        if let Some(v) = self.max_relative_step {
            opts.max_relative_step = v;
        }
        if let Some(v) = self.inner_tol {
            opts.inner_tol = v;
        }
        if let Some(r) = &self.regime {
            opts.regime = Some(match r.as_str() {
                "sub-one" => Regime::SubOne,
                "p-ge-one" => Regime::PGeOne,
                other => return Err(IoError::Parse(format!("unknown regime {other:?}"))),
            });
        }
        if let Some(v) = self.trace {
            opts.trace = v;
        }
        Ok(opts)
    }
}

/// A problem instance as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dim: usize,
    pub p: f64,
    pub items: Vec<Item>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsBlock>,
}

impl ProblemFile {
    pub fn from_measure(measure: &DiscreteMeasure<f64>) -> Self {
        let dim = measure.dim();
        let items = measure
            .directions()
            .iter()
            .zip(measure.alpha())
            .map(|(u, &alpha)| Item { u: u.coords(dim).to_vec(), alpha })
            .collect();
        ProblemFile { dim, p: measure.p(), items, options: None }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        from_toml(text)
    }

    pub fn to_toml_string(&self) -> Result<String, IoError> {
        to_toml(self)
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        Self::parse(&read_text(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        write_text(path, &self.to_toml_string()?)
    }

    /// Directions renormalized exactly; each must already be unit within
    /// [`DIRECTION_NORM_SLACK`].
    pub fn directions(&self) -> Result<DirectionSet<f64>, IoError> {
        let dirs = self
            .items
            .iter()
            .enumerate()
            .map(|(index, item)| parse_direction(self.dim, index, &item.u))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DirectionSet::new(self.dim, dirs)?)
    }

    /// Runs every admission check on the instance.
    pub fn to_measure(&self) -> Result<DiscreteMeasure<f64>, IoError> {
        if self.dim != 2 && self.dim != 3 {
            return Err(GeometryError::DimUnsupported(self.dim).into());
        }
        let dirs = self.directions()?;
        let alpha = self.items.iter().map(|i| i.alpha).collect();
        Ok(DiscreteMeasure::new(dirs, alpha, self.p)?)
    }

    pub fn solver_options(&self) -> Result<SolverOptions<f64>, IoError> {
        self.options.clone().unwrap_or_default().to_options()
    }
}

pub(crate) fn parse_direction(dim: usize, index: usize, coords: &[f64]) -> Result<Vector<f64>, IoError> {
    let v = Vector::from_slice(dim, coords).ok_or_else(|| {
        IoError::Parse(format!("direction {index} has {} coordinates, expected {dim}", coords.len()))
    })?;
    let norm = v.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > DIRECTION_NORM_SLACK {
        return Err(GeometryError::NotUnit { index, norm }.into());
    }
    Ok(v / norm)
}

/// Reads and validates a problem file.
pub fn parse_problem(path: &Path) -> Result<(DiscreteMeasure<f64>, SolverOptions<f64>), IoError> {
    let file = ProblemFile::read(path)?;
    let measure = file.to_measure()?;
    Ok((measure, file.solver_options()?))
}

#[cfg(test)]
mod tests;
