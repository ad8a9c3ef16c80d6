//! Largest inscribed ball of `{x : u_k . x <= h_k}`.
//!
//! The ball LP `max r s.t. u_k . x + r <= h_k` has `dim + 1` free variables.
//! It is solved through its dual
//!
//! ```text
//!     min  sum_k h_k y_k   s.t.  sum_k y_k u_k = 0,  sum_k y_k = 1,  y >= 0
//! ```
//!
//! with a dense two-phase tableau simplex under Bland's rule. The dual has only
//! `dim + 1` rows, so the tableau stays tiny and the primal optimum is read off
//! the reduced costs of the artificial columns. Phase-one infeasibility yields
//! a Farkas certificate: a direction `v` with `u_k . v > 0` for every `k`.

use crate::scalar::Scalar;
use crate::vector::Vector;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum BallLp<T> {
    Optimal { center: Vector<T>, radius: T },
    /// The directions lie in an open hemisphere around `pole`; the ball LP is
    /// unbounded.
    Unbounded { pole: Vector<T> },
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    cost: Vec<T>,
    basis: Vec<usize>,
    n_struct: usize,
}

impl<T: Scalar> Tableau<T> {
    fn width(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v = *v / p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != T::zero() {
                for j in 0..=w {
                    row[j] = row[j] - f * pivot_row[j];
                }
            }
        }
        let f = self.cost[c];
        if f != T::zero() {
            for j in 0..=w {
                self.cost[j] = self.cost[j] - f * pivot_row[j];
            }
        }
        self.basis[r] = c;
    }

    /// Runs primal simplex iterations over the structural columns.
    /// Returns `false` if the iteration cap was hit or the LP is unbounded.
    fn optimize(&mut self, cost_eps: T, piv_eps: T, max_iter: usize) -> bool {
        let w = self.width();
        for _ in 0..max_iter {
            let entering = (0..self.n_struct).find(|&j| self.cost[j] < -cost_eps);
            let Some(c) = entering else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > piv_eps {
                    let ratio = row[w] / row[c];
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
        false
    }
}

/// Solves the inscribed-ball LP. `None` signals a numerical breakdown
/// (iteration cap), which does not occur for well-scaled inputs.
pub(crate) fn inscribed_ball<T: Scalar>(dim: usize, dirs: &[Vector<T>], h: &[T]) -> Option<BallLp<T>> {
    let n = dirs.len();
    let m = dim + 1;
    let width = n + m;
    let mut rows = vec![vec![T::zero(); width + 1]; m];
    for (k, u) in dirs.iter().enumerate() {
        for i in 0..dim {
            rows[i][k] = u[i];
        }
        rows[dim][k] = T::one();
    }
    for (i, row) in rows.iter_mut().enumerate() {
        row[n + i] = T::one();
    }
    rows[dim][width] = T::one();

    // Phase one: minimize the sum of artificials.
    let mut cost = vec![T::zero(); width + 1];
    for j in n..n + m {
        cost[j] = T::one();
    }
    let basis = (n..n + m).collect();
    let mut tab = Tableau { rows, cost, basis, n_struct: n };
    for i in 0..m {
        let row = tab.rows[i].clone();
        for j in 0..=width {
            tab.cost[j] = tab.cost[j] - row[j];
        }
    }
    let piv_eps = T::lit(1e-11).max(T::epsilon() * T::lit(64.0));
    let max_iter = 50 * (width + 1) * (width + 1);
    if !tab.optimize(piv_eps, piv_eps, max_iter) {
        return None;
    }
    let infeasibility = -tab.cost[width];
    if infeasibility > T::lit(1e-9).max(T::epsilon().sqrt()) {
        // pi = 1 - reduced cost of the artificial columns.
        let x: Vector<T> = {
            let mut v = Vector::zero();
            for i in 0..dim {
                v.0[i] = T::one() - tab.cost[n + i];
            }
            v
        };
        let pole = (-x).normalized()?;
        return Some(BallLp::Unbounded { pole });
    }

    // Drive zero-level artificials out of the basis where possible.
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| tab.rows[r][j].abs() > piv_eps) {
                tab.pivot(r, c);
            }
        }
    }

    // Phase two: minimize h . y.
    let hscale = h.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let mut cost = vec![T::zero(); width + 1];
    cost[..n].copy_from_slice(h);
    for r in 0..m {
        let b = tab.basis[r];
        let cb = cost[b];
        if cb != T::zero() {
            let row = tab.rows[r].clone();
            for j in 0..=width {
                cost[j] = cost[j] - cb * row[j];
            }
        }
    }
    tab.cost = cost;
    let cost_eps = piv_eps * (T::one() + hscale);
    if !tab.optimize(cost_eps, piv_eps, max_iter) {
        return None;
    }
    let mut center = Vector::zero();
    for i in 0..dim {
        center.0[i] = -tab.cost[n + i];
    }
    let radius = -tab.cost[n + dim];
    Some(BallLp::Optimal { center, radius })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vector<f64>> {
        vec![
            Vector::new2(1.0, 0.0),
            Vector::new2(0.0, 1.0),
            Vector::new2(-1.0, 0.0),
            Vector::new2(0.0, -1.0),
        ]
    }

    #[test]
    fn unit_square_ball() {
        match inscribed_ball(2, &square(), &[1.0; 4]).unwrap() {
            BallLp::Optimal { center, radius } => {
                assert!(center.norm() < 1e-14);
                assert!((radius - 1.0).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn translated_square_ball() {
        match inscribed_ball(2, &square(), &[6.0, 1.0, -4.0, 1.0]).unwrap() {
            BallLp::Optimal { center, radius } => {
                assert!((center - Vector::new2(5.0, 0.0)).norm() < 1e-13);
                assert!((radius - 1.0).abs() < 1e-13);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn open_half_plane_is_unbounded() {
        let dirs = vec![
            Vector::new2(1.0, 0.0),
            Vector::new2(0.0, 1.0),
            Vector::new2(-1.0, 0.2).normalized().unwrap(),
        ];
        match inscribed_ball(2, &dirs, &[1.0; 3]).unwrap() {
            BallLp::Unbounded { pole } => {
                for u in &dirs {
                    assert!(u.dot(&pole) > 0.0);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_interior_gives_nonpositive_radius() {
        match inscribed_ball(2, &square(), &[-1.0, 1.0, -1.0, 1.0]).unwrap() {
            BallLp::Optimal { radius, .. } => assert!(radius <= 1e-12),
            other => panic!("{other:?}"),
        }
    }
}
