//! The inner maximization `xi_p(P) = argmax_{xi in P} Phi_P(xi)` with
//!
//! ```text
//!     Phi_P(xi) = sum_k alpha_k (h(P, u_k) - xi . u_k)^p,     0 < p < 1.
//! ```
//!
//! `Phi_P` is strictly concave on the interior and its gradient grows like
//! `slack^(p-1)` at the boundary, so a damped Newton iteration that never
//! lets a slack drop below a fixed fraction of its current value stays
//! interior without an explicit barrier.

use thiserror::Error;

use crate::kernel::{chebyshev_center, GeometryError, SupportVector};
use crate::measure::DiscreteMeasure;
use crate::scalar::Scalar;
use crate::vector::{add_outer, cholesky_solve, zero_matrix, Matrix3, Vector};

pub const MAX_ITERATIONS: usize = 200;
/// Every slack keeps at least this fraction of its value in one step.
const BOUNDARY_FRACTION: f64 = 0.1;
const ARMIJO: f64 = 1e-4;
/// Below this `1 - p` the Hessian is too flat to trust; use gradient ascent.
const FLAT_HESSIAN: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InnerError<T: Scalar> {
    #[error("inner problem needs 0 < p < 1, got p = {0}")]
    ExponentNotSubOne(T),
    #[error("{got} support values for {expected} directions")]
    LengthMismatch { expected: usize, got: usize },
    #[error("point is outside the polytope: slack {slack} for direction {index}")]
    OutsideDomain { index: usize, slack: T },
    #[error("no interior starting point: {0}")]
    Geometry(#[from] GeometryError<T>),
    #[error("inner Newton iteration did not converge (gradient norm {})", best.gradient_norm)]
    MaxIterations { best: Box<InnerSolution<T>> },
}

/// `Phi_P` for a polytope given by its realized support values.
#[derive(Debug, Clone, Copy)]
pub struct InnerProblem<'a, T> {
    measure: &'a DiscreteMeasure<T>,
    support: &'a [T],
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution<T> {
    pub xi: Vector<T>,
    pub value: T,
    pub slacks: Vec<T>,
    pub iterations: usize,
    pub gradient_norm: T,
}

impl<'a, T: Scalar> InnerProblem<'a, T> {
    pub fn new(measure: &'a DiscreteMeasure<T>, support: &'a [T]) -> Result<Self, InnerError<T>> {
        let p = measure.p();
        if !(p > T::zero() && p < T::one()) {
            return Err(InnerError::ExponentNotSubOne(p));
        }
        if support.len() != measure.len() {
            return Err(InnerError::LengthMismatch { expected: measure.len(), got: support.len() });
        }
        Ok(InnerProblem { measure, support })
    }

    pub fn measure(&self) -> &DiscreteMeasure<T> {
        self.measure
    }

    pub fn support(&self) -> &[T] {
        self.support
    }

    /// `h_k - xi . u_k`, all of which must be positive.
    pub fn slacks(&self, xi: &Vector<T>) -> Result<Vec<T>, InnerError<T>> {
        let mut out = Vec::with_capacity(self.support.len());
        for (index, (u, &h)) in self.measure.directions().iter().zip(self.support).enumerate() {
            let slack = h - xi.dot(u);
            if !(slack > T::zero()) {
                return Err(InnerError::OutsideDomain { index, slack });
            }
            out.push(slack);
        }
        Ok(out)
    }

    pub fn value(&self, xi: &Vector<T>) -> Result<T, InnerError<T>> {
        let slacks = self.slacks(xi)?;
        Ok(self.value_from_slacks(&slacks))
    }

    fn value_from_slacks(&self, slacks: &[T]) -> T {
        let p = self.measure.p();
        slacks.iter().zip(self.measure.alpha()).map(|(&s, &a)| a * s.powf(p)).sum()
    }

    /// Gradient `-p sum alpha_k u_k slack_k^(p-1)` and Hessian
    /// `-p (1-p) sum alpha_k u_k u_k^T slack_k^(p-2)` (negative definite).
    pub fn gradient_hessian(&self, xi: &Vector<T>) -> Result<(Vector<T>, Matrix3<T>), InnerError<T>> {
        let slacks = self.slacks(xi)?;
        Ok(self.derivatives(&slacks))
    }

    fn derivatives(&self, slacks: &[T]) -> (Vector<T>, Matrix3<T>) {
        let p = self.measure.p();
        let mut grad = Vector::zero();
        let mut hess = zero_matrix();
        for ((u, &a), &s) in self.measure.directions().iter().zip(self.measure.alpha()).zip(slacks) {
            let w = a * s.powf(p - T::one());
            grad -= *u * (p * w);
            add_outer(&mut hess, u, -p * (T::one() - p) * w / s);
        }
        (grad, hess)
    }
}

/// Maximizes `Phi_P` starting from the Chebyshev center of `P`.
pub fn solve_xi<T: Scalar>(prob: &InnerProblem<'_, T>, tol: T) -> Result<InnerSolution<T>, InnerError<T>> {
    let dirs = prob.measure.directions();
    let (center, _) = chebyshev_center(dirs, &SupportVector(prob.support.to_vec()))?;
    solve_xi_from(prob, center, tol)
}

/// Damped Newton ascent from an interior `start`. Stops once the gradient
/// norm is at most `tol * (1 + sum alpha_k)` or the Newton decrement falls
/// below the rounding level of `Phi`, then polishes with up to two
/// further Newton steps while they keep reducing the gradient.
pub fn solve_xi_from<T: Scalar>(
    prob: &InnerProblem<'_, T>,
    start: Vector<T>,
    tol: T,
) -> Result<InnerSolution<T>, InnerError<T>> {
    let dim = prob.measure.dim();
    let dirs = prob.measure.directions();
    let threshold = tol * (T::one() + prob.measure.total_mass());
    let flat = T::one() - prob.measure.p() < T::lit(FLAT_HESSIAN);

    let mut xi = start;
    let mut slacks = prob.slacks(&xi)?;
    let mut value = prob.value_from_slacks(&slacks);
    let mut polish = 0;
    for iteration in 0..MAX_ITERATIONS {
        let (grad, hess) = prob.derivatives(&slacks);
        let gnorm = grad.norm();
        let mut neg_hess = hess;
        for row in neg_hess.iter_mut() {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        let newton = if flat { None } else { cholesky_solve(dim, &neg_hess, &grad) };
        // The Newton decrement bounds the remaining gain; once it is below
        // the rounding level of Phi no step can be resolved.
        let noise = T::lit(64.0) * T::epsilon() * value.abs();
        let resolved = newton.is_some_and(|d| d.dot(&grad) <= noise);
        let converged = gnorm <= threshold || resolved;
        if converged {
            polish += 1;
            if polish > 2 {
                return Ok(InnerSolution { xi, value, slacks, iterations: iteration, gradient_norm: gnorm });
            }
        }

        let (direction, unit_step) = match newton {
            Some(d) if d.dot(&grad) > T::zero() => (d, T::one()),
            _ => {
                // Gradient ascent scaled to a slack-sized first trial step.
                let smallest = slacks.iter().copied().fold(T::infinity(), T::min);
                (grad, smallest / gnorm.max(T::min_positive_value()))
            }
        };

        let mut step = unit_step;
        for (u, &s) in dirs.iter().zip(&slacks) {
            let rate = u.dot(&direction);
            if rate > T::zero() {
                step = step.min((T::one() - T::lit(BOUNDARY_FRACTION)) * s / rate);
            }
        }
        let slope = grad.dot(&direction);
        let mut accepted = None;
        for _ in 0..60 {
            let trial = xi + direction * step;
            if let Ok(trial_slacks) = prob.slacks(&trial) {
                let trial_value = prob.value_from_slacks(&trial_slacks);
                let armijo = trial_value >= value + T::lit(ARMIJO) * step * slope;
                // Near the optimum the increase drowns in rounding; accept a
                // step that does not lose value and shrinks the gradient.
                let flat_but_better = trial_value >= value - noise
                    && prob.derivatives(&trial_slacks).0.norm() < gnorm;
                if armijo || flat_but_better {
                    accepted = Some((trial, trial_slacks, trial_value));
                    break;
                }
            }
            step = step / T::lit(2.0);
        }
        match accepted {
            Some((x, s, v)) => {
                xi = x;
                slacks = s;
                value = v;
            }
            None if converged => {
                return Ok(InnerSolution { xi, value, slacks, iterations: iteration, gradient_norm: gnorm });
            }
            None => break,
        }
    }
    let gradient_norm = prob.derivatives(&slacks).0.norm();
    let best = InnerSolution { xi, value, slacks, iterations: MAX_ITERATIONS, gradient_norm };
    if gradient_norm <= threshold {
        return Ok(best);
    }
    Err(InnerError::MaxIterations { best: Box::new(best) })
}
