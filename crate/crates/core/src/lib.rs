//! Variational solver for the discrete L_p Minkowski problem.
//!
//! Given unit directions `u_1, ..., u_N` that are not concentrated on a
//! closed hemisphere, positive weights `alpha_k` and an exponent `p`, the
//! solver constructs a polytope `P` with
//!
//! ```text
//!     h(P, u_k)^(1 - p) * area(F(P, u_k)) = alpha_k      for every k,
//! ```
//!
//! i.e. whose L_p surface area measure is `sum_k alpha_k delta_{u_k}`.
//! Two regimes are covered:
//!
//! - `0 < p < 1`: minimize `max_xi sum_k alpha_k (h_k - xi . u_k)^p` over
//!   unit-volume polytopes with the prescribed normals ([`solve_sub_one`]).
//! - `p >= 1`, `p != n`: minimize `sum_k alpha_k h_k^p` over unit-volume
//!   polytopes containing the origin ([`solve_p_ge_one`]).
//!
//! Both end with a dilation that turns the volume-normalized optimizer into
//! the solution. Geometry is exact-enough floating point in R^2 and R^3.
//!
//! All numeric code is generic over [`Scalar`] (`f64` and `f32`); the
//! `*64` aliases below name the double precision instantiations that the CLI
//! and the file formats use.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod inner;
pub mod io;
pub mod kernel;
pub mod measure;
pub mod outer;
pub mod scalar;
pub mod vector;

pub use inner::{solve_xi, InnerError, InnerProblem, InnerSolution};
pub use kernel::{
    chebyshev_center, intersect_halfspaces, polytope_from_points, DirectionSet, Facet, GeometryError,
    PolytopeMesh, SupportVector,
};
pub use measure::{
    check_closure, check_hemisphere, residual, sp_measure, AdmissionError, DiscreteMeasure,
    HemisphereCheck, MeasureError, MeasureResidual,
};
pub use outer::{
    normalize_volume, objective_p_ge_one, objective_sub_one, rescale_solution, solve, solve_from, solve_p_ge_one,
    solve_sub_one, Method, OuterState, Regime, SolveError, SolveReport, SolverOptions, Termination,
};
pub use scalar::Scalar;
pub use vector::Vector;

pub type Vector64 = Vector<f64>;
pub type DirectionSet64 = DirectionSet<f64>;
pub type SupportVector64 = SupportVector<f64>;
pub type PolytopeMesh64 = PolytopeMesh<f64>;
pub type DiscreteMeasure64 = DiscreteMeasure<f64>;
pub type SolverOptions64 = SolverOptions<f64>;
pub type SolveReport64 = SolveReport<f64>;

pub type Vector32 = Vector<f32>;
pub type DirectionSet32 = DirectionSet<f32>;
pub type PolytopeMesh32 = PolytopeMesh<f32>;
pub type DiscreteMeasure32 = DiscreteMeasure<f32>;
pub type SolveReport32 = SolveReport<f32>;
