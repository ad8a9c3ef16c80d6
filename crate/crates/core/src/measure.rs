//! The discrete L_p surface area measure and the admission rules for a
//! problem instance.

use thiserror::Error;

use crate::kernel::{intersect_halfspaces, DirectionSet, GeometryError, PolytopeMesh, SupportVector};
use crate::scalar::Scalar;
use crate::vector::Vector;

/// `|p - dim|` below this counts as `p = dim`, where the rescaling exponent
/// `1 / (dim - p)` blows up.
pub const DIMENSION_EXPONENT_GAP: f64 = 1e-9;

/// Relative closure `|sum alpha_k u_k| / sum alpha_k` tolerated when `p = 1`.
pub const CLOSURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdmissionError<T: Scalar> {
    #[error(transparent)]
    Geometry(#[from] GeometryError<T>),
    #[error("{got} weights given for {expected} directions")]
    LengthMismatch { expected: usize, got: usize },
    #[error("weight alpha_{index} = {value} is not positive")]
    NonPositiveAlpha { index: usize, value: T },
    #[error("exponent p = {p} is outside (0, inf)")]
    ExponentOutOfRange { p: T },
    #[error("exponent p = {p} equals the dimension {dim}; the rescaling exponent 1/(n - p) is singular")]
    ExponentEqualsDimension { p: T, dim: usize },
    #[error("directions lie in a closed hemisphere around {witness:?}")]
    Hemisphere { witness: Vector<T> },
    #[error("p = 1 requires sum alpha_k u_k = 0; relative closure defect is {defect}")]
    ClosureViolated { defect: T },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError<T: Scalar> {
    #[error("origin is not interior: h(P, u_{index}) = {support}")]
    OriginNotInterior { index: usize, support: T },
    #[error("mesh has {got} directions, measure has {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Outcome of the hemisphere test.
#[derive(Debug, Clone, PartialEq)]
pub enum HemisphereCheck<T> {
    Pass,
    /// Every direction satisfies `u_k . witness >= 0` (up to rounding).
    Fail { witness: Vector<T> },
}

impl<T> HemisphereCheck<T> {
    pub fn passed(&self) -> bool {
        matches!(self, HemisphereCheck::Pass)
    }
}

/// A problem instance `mu = sum_k alpha_k delta_{u_k}` with exponent `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<T> {
    dirs: DirectionSet<T>,
    alpha: Vec<T>,
    p: T,
}

impl<T: Scalar> DiscreteMeasure<T> {
    /// Runs every admission check: positive weights, `p > 0`, `p != dim`,
    /// the hemisphere condition and, for `p = 1`, closure of the weights.
    pub fn new(dirs: DirectionSet<T>, alpha: Vec<T>, p: T) -> Result<Self, AdmissionError<T>> {
        if alpha.len() != dirs.len() {
            return Err(AdmissionError::LengthMismatch { expected: dirs.len(), got: alpha.len() });
        }
        if let Some((index, &value)) = alpha
            .iter()
            .enumerate()
            .find(|(_, a)| !(a.is_finite() && **a > T::zero()))
        {
            return Err(AdmissionError::NonPositiveAlpha { index, value });
        }
        if !(p.is_finite() && p > T::zero()) {
            return Err(AdmissionError::ExponentOutOfRange { p });
        }
        let dim = dirs.dim();
        if (p - T::from_usize_lossy(dim)).abs() < T::lit(DIMENSION_EXPONENT_GAP) {
            return Err(AdmissionError::ExponentEqualsDimension { p, dim });
        }
        if let HemisphereCheck::Fail { witness } = check_hemisphere(&dirs) {
            return Err(AdmissionError::Hemisphere { witness });
        }
        if p == T::one() {
            let defect = check_closure(&dirs, &alpha);
            if defect > T::lit(CLOSURE_TOL) {
                return Err(AdmissionError::ClosureViolated { defect });
            }
        }
        Ok(DiscreteMeasure { dirs, alpha, p })
    }

    pub fn directions(&self) -> &DirectionSet<T> {
        &self.dirs
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dirs.dim()
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn total_mass(&self) -> T {
        self.alpha.iter().copied().sum()
    }

    /// `|sum alpha_k u_k| / sum alpha_k`.
    pub fn closure_defect(&self) -> T {
        check_closure(&self.dirs, &self.alpha)
    }
}

/// Components `h(P, u_k)^(1-p) * a_k` of the L_p surface area measure, using
/// the mesh's realized support values. Absent facets contribute zero.
pub fn sp_measure<T: Scalar>(mesh: &PolytopeMesh<T>, p: T) -> Result<Vec<T>, MeasureError<T>> {
    if p == T::one() {
        return Ok(mesh.facet_areas());
    }
    if let Some((index, &support)) = mesh.support().iter().enumerate().find(|(_, s)| !(**s > T::zero())) {
        return Err(MeasureError::OriginNotInterior { index, support });
    }
    let exponent = T::one() - p;
    Ok(mesh
        .support()
        .iter()
        .zip(mesh.facets())
        .map(|(&s, f)| f.as_ref().map_or(T::zero(), |f| s.powf(exponent) * f.area))
        .collect())
}

/// Bounded-intersection test: passes iff `{x : u_k . x <= 1}` is bounded,
/// i.e. the origin is interior to the convex hull of the directions.
pub fn check_hemisphere<T: Scalar>(dirs: &DirectionSet<T>) -> HemisphereCheck<T> {
    match intersect_halfspaces(dirs, &SupportVector::constant(dirs.len(), T::one())) {
        Ok(_) => HemisphereCheck::Pass,
        Err(GeometryError::Unbounded { witness }) => HemisphereCheck::Fail { witness },
        Err(_) => HemisphereCheck::Fail { witness: Vector::zero() },
    }
}

/// Relative closure defect `|sum alpha_k u_k| / sum alpha_k`.
pub fn check_closure<T: Scalar>(dirs: &DirectionSet<T>, alpha: &[T]) -> T {
    let sum = dirs
        .iter()
        .zip(alpha)
        .fold(Vector::zero(), |acc, (u, &a)| acc + *u * a);
    let mass: T = alpha.iter().copied().sum();
    sum.norm() / mass
}

/// How far a polytope is from solving the instance.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResidual<T> {
    /// `|h_k^(1-p) a_k - alpha_k|`.
    pub absolute: Vec<T>,
    /// `absolute_k / alpha_k`.
    pub relative: Vec<T>,
    pub max_relative: T,
    /// `|sum alpha_k u_k h_k^(p-1)| / sum alpha_k h_k^(p-1)`: vanishes when the
    /// origin is the maximizer of the inner functional.
    pub stationarity: T,
}

pub fn residual<T: Scalar>(
    mesh: &PolytopeMesh<T>,
    measure: &DiscreteMeasure<T>,
) -> Result<MeasureResidual<T>, MeasureError<T>> {
    if mesh.directions().len() != measure.len() {
        return Err(MeasureError::LengthMismatch { expected: measure.len(), got: mesh.directions().len() });
    }
    let p = measure.p();
    let sp = sp_measure(mesh, p)?;
    if let Some((index, &support)) = mesh.support().iter().enumerate().find(|(_, s)| !(**s > T::zero())) {
        return Err(MeasureError::OriginNotInterior { index, support });
    }
    let absolute: Vec<T> = sp.iter().zip(measure.alpha()).map(|(&s, &a)| (s - a).abs()).collect();
    let relative: Vec<T> = absolute.iter().zip(measure.alpha()).map(|(&d, &a)| d / a).collect();
    let max_relative = relative.iter().copied().fold(T::zero(), T::max);

    let mut moment = Vector::zero();
    let mut weight = T::zero();
    for ((u, &a), &s) in measure.directions().iter().zip(measure.alpha()).zip(mesh.support()) {
        let w = a * s.powf(p - T::one());
        moment += *u * w;
        weight = weight + w;
    }
    Ok(MeasureResidual { absolute, relative, max_relative, stationarity: moment.norm() / weight })
}
