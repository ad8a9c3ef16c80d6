//! Variational schemes that produce the Minkowski solution.
//!
//! Both regimes minimize a functional of the support vector `h` over
//! unit-volume polytopes with the prescribed normals:
//!
//! - sub-one (`0 < p < 1`): `F(h) = max_xi sum_k alpha_k (h_k - xi . u_k)^p`,
//! - p-ge-one (`p >= 1`): `Psi(h) = sum_k alpha_k h_k^p` with the origin inside.
//!
//! The iteration works on the degree-zero extension `G(h) = V(h)^(-p/n) F(h)`,
//! whose gradient at a unit-volume polytope with `xi_p = 0` is
//!
//! ```text
//!     dG/dh_k = p alpha_k h_k^(p-1) - (p/n) a_k F,
//! ```
//!
//! (the dependence of `xi_p` on `h` drops out because `xi_p` is a critical
//! point of the inner functional). It vanishes exactly when
//! `(F/n) h_k^(1-p) a_k = alpha_k`, and dilating by `(F/n)^(1/(n-p))` then
//! turns the optimizer into a body whose L_p surface area measure is `alpha`.
//!
//! After every accepted step the iterate is rescaled to unit volume and
//! translated (so that `xi_p` sits at the origin in the sub-one regime, the
//! centroid for `p = 1`). `G` is invariant under both, so the descent
//! bookkeeping is unaffected.

use std::collections::VecDeque;

use thiserror::Error;

use crate::inner::{solve_xi_from, InnerError, InnerProblem, InnerSolution};
use crate::kernel::{intersect_halfspaces, DirectionSet, GeometryError, PolytopeMesh, SupportVector};
use crate::measure::{residual, DiscreteMeasure, MeasureError, MeasureResidual, DIMENSION_EXPONENT_GAP};
use crate::scalar::Scalar;
use crate::vector::Vector;

/// Facets must keep at least this fraction of `d(P)^(n-1)` at exit.
pub const EXIT_FACET_FLOOR: f64 = 1e-8;
/// Outer radius growth that aborts the solve.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `0 < p < 1`, inner maximizer recentered to the origin.
    SubOne,
    /// `p >= 1`, origin kept inside the body.
    PGeOne,
}

impl Regime {
    pub fn for_exponent<T: Scalar>(p: T) -> Self {
        if p < T::one() {
            Regime::SubOne
        } else {
            Regime::PGeOne
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::SubOne => "sub-one",
            Regime::PGeOne => "p-ge-one",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Limited-memory secant directions, falling back to `Gradient` when a
    /// direction fails to descend.
    Lbfgs,
    /// Diagonally preconditioned gradient descent.
    Gradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions<T> {
    /// Stop when the largest relative residual is at most this.
    pub tol: T,
    pub max_iterations: usize,
    pub method: Method,
    /// Secant pairs kept by L-BFGS.
    pub memory: usize,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: T,
    /// Step shrink factor during backtracking.
    pub backtrack: T,
    pub max_backtracks: usize,
    /// No support number moves by more than this fraction of its slack in
    /// one step.
    pub max_relative_step: T,
    pub inner_tol: T,
    /// Forces a scheme instead of choosing by `p`.
    pub regime: Option<Regime>,
    /// Record the per-iteration residual as well as the objective.
    pub trace: bool,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tol: T::lit(T::DEFAULT_TOL),
            max_iterations: 10_000,
            method: Method::Lbfgs,
            memory: 8,
            armijo: T::lit(1e-4),
            backtrack: T::lit(0.5),
            max_backtracks: 40,
            max_relative_step: T::lit(0.5),
            inner_tol: T::lit(T::INNER_TOL),
            regime: None,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    /// No step along the current or the fallback direction was accepted.
    Stalled,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max-iterations",
            Termination::Stalled => "stalled",
        }
    }
}

/// One unit-volume, recentered iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterState<T> {
    /// Realized support numbers of `mesh`.
    pub h: SupportVector<T>,
    pub mesh: PolytopeMesh<T>,
    /// Inner maximizer after recentering (sub-one regime only).
    pub xi: Option<InnerSolution<T>>,
    pub objective: T,
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    /// `P_0 = scale * normalized`.
    pub solution: PolytopeMesh<T>,
    /// Unit-volume optimizer.
    pub normalized: PolytopeMesh<T>,
    pub scale: T,
    pub residual: MeasureResidual<T>,
    pub objective_trace: Vec<T>,
    /// Largest relative residual per iteration, when tracing.
    pub residual_trace: Vec<T>,
    pub iterations: usize,
    pub regime: Regime,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError<T: Scalar> {
    #[error("regime {regime:?} cannot handle p = {p}")]
    RegimeMismatch { regime: Regime, p: T },
    #[error(transparent)]
    Geometry(#[from] GeometryError<T>),
    #[error("inner solve failed: {0}")]
    InnerSolveFailed(#[from] InnerError<T>),
    #[error(transparent)]
    Measure(#[from] MeasureError<T>),
    #[error("p = {p} is too close to the dimension {dim} to rescale")]
    ScaleSingular { p: T, dim: usize },
    #[error("p = 1 requires closed weights; relative defect {defect}")]
    ClosureViolated { defect: T },
    #[error("origin left the body (h_{index} = {support})")]
    OriginOutside { index: usize, support: T },
    #[error("facet {index} collapsed (area {area})")]
    FacetCollapse { index: usize, area: T },
    #[error("outer radius grew from {initial} to {radius}")]
    Diverged { initial: T, radius: T },
    #[error("no convergence after {} iterations (residual {})", report.iterations, report.residual.max_relative)]
    MaxIterations { report: Box<SolveReport<T>> },
    #[error("line search stalled after {} iterations (residual {})", report.iterations, report.residual.max_relative)]
    Stalled { report: Box<SolveReport<T>> },
}

/// Rescales `h` so that its polytope has unit volume.
pub fn normalize_volume<T: Scalar>(
    dirs: &DirectionSet<T>,
    h: &SupportVector<T>,
) -> Result<SupportVector<T>, GeometryError<T>> {
    let mesh = intersect_halfspaces(dirs, h)?;
    Ok(h.scaled(unit_volume_factor(&mesh)))
}

fn unit_volume_factor<T: Scalar>(mesh: &PolytopeMesh<T>) -> T {
    mesh.volume().powf(-T::one() / T::from_usize_lossy(mesh.dim()))
}

/// Value and gradient of `G(h) = V(h)^(-p/n) max_xi Phi_{Q(h)}(xi)`.
///
/// The gradient is taken at the tight representative of `h` (the mesh's
/// realized support values), so directions whose halfspace only touches the
/// body contribute the one-sided derivative for cutting it.
pub fn objective_sub_one<T: Scalar>(
    measure: &DiscreteMeasure<T>,
    h: &SupportVector<T>,
    inner_tol: T,
) -> Result<(T, Vec<T>), SolveError<T>> {
    check_regime(measure, Regime::SubOne)?;
    let mesh = intersect_halfspaces(measure.directions(), h)?;
    let parts = objective_parts(measure, &mesh, Regime::SubOne, inner_tol, None)?;
    Ok((parts.value, parts.gradient))
}

/// Value and gradient of `G(h) = V(h)^(-p/n) sum_k alpha_k h_k^p`.
pub fn objective_p_ge_one<T: Scalar>(
    measure: &DiscreteMeasure<T>,
    h: &SupportVector<T>,
) -> Result<(T, Vec<T>), SolveError<T>> {
    let mesh = intersect_halfspaces(measure.directions(), h)?;
    let parts = objective_parts(measure, &mesh, Regime::PGeOne, T::zero(), None)?;
    Ok((parts.value, parts.gradient))
}

struct Parts<T> {
    value: T,
    gradient: Vec<T>,
    slacks: Vec<T>,
    xi: Option<InnerSolution<T>>,
}

fn objective_parts<T: Scalar>(
    measure: &DiscreteMeasure<T>,
    mesh: &PolytopeMesh<T>,
    regime: Regime,
    inner_tol: T,
    xi_start: Option<Vector<T>>,
) -> Result<Parts<T>, SolveError<T>> {
    let p = measure.p();
    let n = T::from_usize_lossy(measure.dim());
    let (raw, slacks, xi) = match regime {
        Regime::SubOne => {
            let prob = InnerProblem::new(measure, mesh.support())?;
            let start = xi_start
                .filter(|x| prob.slacks(x).is_ok())
                .unwrap_or_else(|| mesh.interior_point());
            let sol = solve_xi_from(&prob, start, inner_tol)?;
            (sol.value, sol.slacks.clone(), Some(sol))
        }
        Regime::PGeOne => {
            if let Some((index, &support)) =
                mesh.support().iter().enumerate().find(|(_, s)| !(**s > T::zero()))
            {
                return Err(SolveError::OriginOutside { index, support });
            }
            let value = mesh
                .support()
                .iter()
                .zip(measure.alpha())
                .map(|(&s, &a)| a * s.powf(p))
                .sum();
            (value, mesh.support().to_vec(), None)
        }
    };
    let volume = mesh.volume();
    let factor = volume.powf(-p / n);
    let gradient = slacks
        .iter()
        .zip(measure.alpha())
        .zip(mesh.facet_areas())
        .map(|((&s, &a), area)| factor * (p * a * s.powf(p - T::one()) - p / n * raw * area / volume))
        .collect();
    Ok(Parts { value: factor * raw, gradient, slacks, xi })
}

fn check_regime<T: Scalar>(measure: &DiscreteMeasure<T>, regime: Regime) -> Result<(), SolveError<T>> {
    let p = measure.p();
    if regime == Regime::SubOne && !(p > T::zero() && p < T::one()) {
        return Err(SolveError::RegimeMismatch { regime, p });
    }
    Ok(())
}

/// Dilates a converged unit-volume state by `(sum_j alpha_j h_j^p / n)^(1/(n-p))`.
pub fn rescale_solution<T: Scalar>(
    state: &OuterState<T>,
    measure: &DiscreteMeasure<T>,
) -> Result<PolytopeMesh<T>, SolveError<T>> {
    Ok(state.mesh.scaled(scale_factor(&state.mesh, measure)?))
}

fn scale_factor<T: Scalar>(mesh: &PolytopeMesh<T>, measure: &DiscreteMeasure<T>) -> Result<T, SolveError<T>> {
    let p = measure.p();
    let dim = measure.dim();
    let n = T::from_usize_lossy(dim);
    if (n - p).abs() < T::lit(DIMENSION_EXPONENT_GAP) {
        return Err(SolveError::ScaleSingular { p, dim });
    }
    let psi: T = mesh
        .support()
        .iter()
        .zip(measure.alpha())
        .map(|(&s, &a)| a * s.powf(p))
        .sum();
    Ok((psi / n).powf(T::one() / (n - p)))
}

/// Solves with the scheme matching `p` (or `opts.regime`).
pub fn solve<T: Scalar>(
    measure: &DiscreteMeasure<T>,
    opts: &SolverOptions<T>,
) -> Result<SolveReport<T>, SolveError<T>> {
    let regime = opts.regime.unwrap_or_else(|| Regime::for_exponent(measure.p()));
    run(measure, opts, regime, None)
}

/// Like [`solve`], starting from `start` instead of `h = 1`.
pub fn solve_from<T: Scalar>(
    measure: &DiscreteMeasure<T>,
    start: &SupportVector<T>,
    opts: &SolverOptions<T>,
) -> Result<SolveReport<T>, SolveError<T>> {
    let regime = opts.regime.unwrap_or_else(|| Regime::for_exponent(measure.p()));
    run(measure, opts, regime, Some(start))
}

/// Sub-one scheme: minimizes the inner maximum over unit-volume polytopes.
pub fn solve_sub_one<T: Scalar>(
    measure: &DiscreteMeasure<T>,
    opts: &SolverOptions<T>,
) -> Result<SolveReport<T>, SolveError<T>> {
    run(measure, opts, Regime::SubOne, None)
}

/// `p >= 1` scheme: minimizes `sum alpha_k h_k^p` over unit-volume polytopes
/// containing the origin.
pub fn solve_p_ge_one<T: Scalar>(
    measure: &DiscreteMeasure<T>,
    opts: &SolverOptions<T>,
) -> Result<SolveReport<T>, SolveError<T>> {
    let p = measure.p();
    if p < T::one() {
        return Err(SolveError::RegimeMismatch { regime: Regime::PGeOne, p });
    }
    run(measure, opts, Regime::PGeOne, None)
}

/// A canonical iterate with everything the step logic needs.
struct Point<T> {
    state: OuterState<T>,
    gradient: Vec<T>,
    slacks: Vec<T>,
    /// Largest relative stationarity residual.
    residual: T,
}

struct Solver<'a, T> {
    measure: &'a DiscreteMeasure<T>,
    opts: &'a SolverOptions<T>,
    regime: Regime,
}

impl<T: Scalar> Solver<'_, T> {
    /// Builds the canonical state for `h`: unit volume, then translated to
    /// the gauge of the regime.
    fn evaluate(&self, h: &SupportVector<T>, iteration: usize) -> Result<Point<T>, SolveError<T>> {
        let measure = self.measure;
        let raw = intersect_halfspaces(measure.directions(), h)?;
        let unit = raw.scaled(unit_volume_factor(&raw));
        let mesh = match self.regime {
            Regime::SubOne => {
                let prob = InnerProblem::new(measure, unit.support())?;
                let start = Some(Vector::zero())
                    .filter(|x| prob.slacks(x).is_ok())
                    .unwrap_or_else(|| unit.interior_point());
                let sol = solve_xi_from(&prob, start, self.opts.inner_tol)?;
                unit.translated(&-sol.xi)
            }
            Regime::PGeOne if measure.p() == T::one() => {
                let c = unit.centroid();
                unit.translated(&-c)
            }
            Regime::PGeOne => unit,
        };
        let parts = objective_parts(measure, &mesh, self.regime, self.opts.inner_tol, Some(Vector::zero()))?;
        let residual = self.stationarity_residual(&mesh, &parts);
        Ok(Point {
            state: OuterState {
                h: mesh.support_vector(),
                mesh,
                xi: parts.xi,
                objective: parts.value,
                iteration,
            },
            gradient: parts.gradient,
            slacks: parts.slacks,
            residual,
        })
    }

    fn stationarity_residual(&self, mesh: &PolytopeMesh<T>, parts: &Parts<T>) -> T {
        let p = self.measure.p();
        let n = T::from_usize_lossy(self.measure.dim());
        let volume = mesh.volume();
        let raw = parts.value * volume.powf(p / n);
        // At unit volume: (raw / n) slack^(1-p) a_k vs alpha_k; the volume
        // factor keeps the expression exactly scale invariant.
        let c = raw / n * volume.powf((p - n) / n);
        parts
            .slacks
            .iter()
            .zip(mesh.facet_areas())
            .zip(self.measure.alpha())
            .map(|((&s, a), &alpha)| (c * s.powf(T::one() - p) * a - alpha).abs() / alpha)
            .fold(T::zero(), T::max)
    }

    /// Diagonal scaling `slack_k / (p alpha_k slack_k^(p-1))`: with it the
    /// preconditioned gradient step is `slack_k (ratio_k - 1)`.
    fn preconditioner(&self, point: &Point<T>) -> Vec<T> {
        let p = self.measure.p();
        point
            .slacks
            .iter()
            .zip(self.measure.alpha())
            .map(|(&s, &a)| s.powf(T::lit(2.0) - p) / (p * a))
            .collect()
    }

    fn finish(&self, point: Point<T>, trace: Vec<T>, residual_trace: Vec<T>, termination: Termination) -> Result<SolveReport<T>, SolveError<T>> {
        let scale = scale_factor(&point.state.mesh, self.measure)?;
        let solution = point.state.mesh.scaled(scale);
        let residual = residual(&solution, self.measure)?;
        Ok(SolveReport {
            solution,
            normalized: point.state.mesh,
            scale,
            residual,
            objective_trace: trace,
            residual_trace,
            iterations: point.state.iteration,
            regime: self.regime,
            termination,
        })
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// L-BFGS two-loop recursion with diagonal initial inverse Hessian.
fn lbfgs_direction<T: Scalar>(grad: &[T], diag: &[T], pairs: &VecDeque<(Vec<T>, Vec<T>)>) -> Vec<T> {
    let mut q = grad.to_vec();
    let mut coeffs = Vec::with_capacity(pairs.len());
    for (s, y) in pairs.iter().rev() {
        let rho = T::one() / dot(y, s);
        let a = rho * dot(s, &q);
        for (qi, &yi) in q.iter_mut().zip(y) {
            *qi = *qi - a * yi;
        }
        coeffs.push((rho, a));
    }
    let gamma = pairs.back().map_or(T::one(), |(s, y)| {
        let ydy: T = y.iter().zip(diag).map(|(&yi, &d)| yi * d * yi).sum();
        dot(s, y) / ydy
    });
    let mut r: Vec<T> = q.iter().zip(diag).map(|(&qi, &d)| gamma * d * qi).collect();
    for ((s, y), (rho, a)) in pairs.iter().zip(coeffs.into_iter().rev()) {
        let b = rho * dot(y, &r);
        for (ri, &si) in r.iter_mut().zip(s) {
            *ri = *ri + (a - b) * si;
        }
    }
    r.iter().map(|&v| -v).collect()
}

fn run<T: Scalar>(
    measure: &DiscreteMeasure<T>,
    opts: &SolverOptions<T>,
    regime: Regime,
    start: Option<&SupportVector<T>>,
) -> Result<SolveReport<T>, SolveError<T>> {
    check_regime(measure, regime)?;
    if measure.p() == T::one() {
        let defect = measure.closure_defect();
        if defect > T::lit(crate::measure::CLOSURE_TOL) {
            return Err(SolveError::ClosureViolated { defect });
        }
    }
    // Fail early on p = n rather than after the whole descent.
    let dim = measure.dim();
    if (T::from_usize_lossy(dim) - measure.p()).abs() < T::lit(DIMENSION_EXPONENT_GAP) {
        return Err(SolveError::ScaleSingular { p: measure.p(), dim });
    }

    let solver = Solver { measure, opts, regime };
    let n_dirs = measure.len();
    let start = match start {
        Some(h) if h.len() != n_dirs => {
            return Err(GeometryError::LengthMismatch { expected: n_dirs, got: h.len() }.into())
        }
        Some(h) => h.clone(),
        None => SupportVector::constant(n_dirs, T::one()),
    };
    let mut current = solver.evaluate(&start, 0)?;
    let initial_radius = current.state.mesh.outer_radius();
    let mut trace = vec![current.state.objective];
    let mut residual_trace = Vec::new();
    if opts.trace {
        residual_trace.push(current.residual);
    }
    let mut pairs: VecDeque<(Vec<T>, Vec<T>)> = VecDeque::new();
    let noise = T::lit(1e-13);

    let mut termination = Termination::MaxIterations;
    for iteration in 1..=opts.max_iterations {
        if current.residual <= opts.tol {
            termination = Termination::Converged;
            break;
        }
        let diag = solver.preconditioner(&current);
        let grad = &current.gradient;
        let fallback: Vec<T> = grad.iter().zip(&diag).map(|(&g, &d)| -g * d).collect();
        let mut candidates = Vec::with_capacity(2);
        if opts.method == Method::Lbfgs && !pairs.is_empty() {
            let d = lbfgs_direction(grad, &diag, &pairs);
            if dot(&d, grad) < T::zero() && d.iter().all(|v| v.is_finite()) {
                candidates.push(d);
            }
        }
        candidates.push(fallback);

        let mut accepted: Option<Point<T>> = None;
        for direction in &candidates {
            let slope = dot(grad, direction);
            let mut step = T::one();
            for (&d, &s) in direction.iter().zip(&current.slacks) {
                if d.abs() * step > opts.max_relative_step * s {
                    step = opts.max_relative_step * s / d.abs();
                }
            }
            for _ in 0..opts.max_backtracks {
                let trial_h = SupportVector(
                    current.state.h.iter().zip(direction).map(|(&h, &d)| h + step * d).collect(),
                );
                if let Ok(trial) = solver.evaluate(&trial_h, iteration) {
                    let keeps_facets =
                        trial.state.mesh.present_facet_count() >= current.state.mesh.present_facet_count();
                    let f0 = current.state.objective;
                    let f1 = trial.state.objective;
                    let armijo = f1 <= f0 + opts.armijo * step * slope;
                    let within_noise = f1 <= f0 + noise * f0.abs() && trial.residual < current.residual;
                    if keeps_facets && (armijo || within_noise) {
                        accepted = Some(trial);
                        break;
                    }
                }
                step = step * opts.backtrack;
            }
            if accepted.is_some() {
                break;
            }
            pairs.clear();
        }

        let Some(next) = accepted else {
            termination = Termination::Stalled;
            break;
        };
        let s: Vec<T> = next.state.h.iter().zip(current.state.h.iter()).map(|(&a, &b)| a - b).collect();
        let y: Vec<T> = next.gradient.iter().zip(grad).map(|(&a, &b)| a - b).collect();
        if dot(&s, &y) > T::epsilon() * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            pairs.push_back((s, y));
            if pairs.len() > opts.memory {
                pairs.pop_front();
            }
        }
        let radius = next.state.mesh.outer_radius();
        if radius > T::lit(DIVERGENCE_FACTOR) * initial_radius {
            return Err(SolveError::Diverged { initial: initial_radius, radius });
        }
        current = next;
        trace.push(current.state.objective);
        if opts.trace {
            residual_trace.push(current.residual);
        }
    }
    if termination == Termination::MaxIterations && current.residual <= opts.tol {
        termination = Termination::Converged;
    }

    match termination {
        Termination::Converged => {
            let mesh = &current.state.mesh;
            let floor = T::lit(EXIT_FACET_FLOOR) * mesh.diameter().powi(dim as i32 - 1);
            if let Some(index) = (0..n_dirs).find(|&k| !(mesh.facet_area(k) >= floor)) {
                return Err(SolveError::FacetCollapse { index, area: mesh.facet_area(index) });
            }
            if let Some((index, &support)) = mesh.support().iter().enumerate().find(|(_, s)| !(**s > T::zero())) {
                return Err(SolveError::OriginOutside { index, support });
            }
            solver.finish(current, trace, residual_trace, termination)
        }
        Termination::MaxIterations => {
            let report = solver.finish(current, trace, residual_trace, termination)?;
            Err(SolveError::MaxIterations { report: Box::new(report) })
        }
        Termination::Stalled => {
            let report = solver.finish(current, trace, residual_trace, termination)?;
            Err(SolveError::Stalled { report: Box::new(report) })
        }
    }
}
