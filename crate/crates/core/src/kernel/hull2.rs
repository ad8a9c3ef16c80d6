//! Planar convex hull by Andrew's monotone chain.

use std::cmp::Ordering;

use crate::scalar::Scalar;
use crate::vector::Vector;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Hull2<T> {
    /// Hull vertices in counter-clockwise order, collinear points dropped.
    Polygon(Vec<usize>),
    /// All points lie on a line `normal . x = offset` (or coincide).
    Flat { normal: Vector<T>, offset: T },
}

/// Convex hull of `points` with relative tolerance `eps` on orientation tests.
pub(crate) fn convex_hull_2d<T: Scalar>(points: &[Vector<T>], eps: T) -> Hull2<T> {
    let scale = points.iter().fold(T::zero(), |m, p| m.max(p.max_abs()));
    let tol = eps * scale * scale;
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        let (pa, pb) = (points[a], points[b]);
        pa[0]
            .partial_cmp(&pb[0])
            .unwrap_or(Ordering::Equal)
            .then(pa[1].partial_cmp(&pb[1]).unwrap_or(Ordering::Equal))
    });

    let turn = |o: usize, a: usize, b: usize| (points[a] - points[o]).cross2(&(points[b] - points[o]));
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], i) <= tol {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], i) <= tol {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);

    if lower.len() >= 3 {
        return Hull2::Polygon(lower);
    }
    // Degenerate: fit the line through the two extreme points.
    let a = points[idx[0]];
    let b = points[*idx.last().unwrap_or(&idx[0])];
    let along = b - a;
    let normal = match Vector::new2(-along[1], along[0]).normalized() {
        Some(n) => n,
        None => a.normalized().map(|n| -n).unwrap_or(Vector::axis(0)),
    };
    Hull2::Flat { normal, offset: normal.dot(&a) }
}
