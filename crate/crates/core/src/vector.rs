//! Small fixed-size vectors and dense solves for dimensions two and three.
//!
//! Planar data is stored with a zero third component so that dot products,
//! norms and sums are dimension agnostic. Only `cross` is 3D specific.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use crate::scalar::Scalar;

/// A point or direction in R^2 or R^3.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vector<T>(pub [T; 3]);

impl<T: Scalar> Vector<T> {
    pub fn zero() -> Self {
        Vector([T::zero(); 3])
    }

    pub fn new2(x: T, y: T) -> Self {
        Vector([x, y, T::zero()])
    }

    pub fn new3(x: T, y: T, z: T) -> Self {
        Vector([x, y, z])
    }

    /// Unit coordinate vector `e_axis`.
    pub fn axis(axis: usize) -> Self {
        let mut v = Self::zero();
        v.0[axis] = T::one();
        v
    }

    /// Builds a vector from the first `dim` entries of `coords`.
    ///
    /// Returns `None` if `coords` has the wrong length or `dim` is not 2 or 3.
    pub fn from_slice(dim: usize, coords: &[T]) -> Option<Self> {
        if !(dim == 2 || dim == 3) || coords.len() != dim {
            return None;
        }
        let mut v = Self::zero();
        v.0[..dim].copy_from_slice(coords);
        Some(v)
    }

    /// The first `dim` coordinates.
    pub fn coords(&self, dim: usize) -> &[T] {
        &self.0[..dim]
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(&self, other: &Self) -> Self {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = other.0;
        Vector([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    }

    /// z-component of the planar cross product.
    pub fn cross2(&self, other: &Self) -> T {
        self.0[0] * other.0[1] - self.0[1] * other.0[0]
    }

    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(*self / n)
        } else {
            None
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn distance(&self, other: &Self) -> T {
        (*self - *other).norm()
    }

    /// Lossless conversion to `f64` coordinates.
    pub fn to_f64(&self) -> Vector<f64> {
        Vector(self.0.map(|c| c.to_f64_lossy()))
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Scalar> Add for Vector<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Vector([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl<T: Scalar> AddAssign for Vector<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Scalar> Sub for Vector<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Vector([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl<T: Scalar> SubAssign for Vector<T> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<T: Scalar> Neg for Vector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vector(self.0.map(|c| -c))
    }
}

impl<T: Scalar> Mul<T> for Vector<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Vector(self.0.map(|c| c * rhs))
    }
}

impl<T: Scalar> Div<T> for Vector<T> {
    type Output = Self;
    fn div(self, rhs: T) -> Self {
        Vector(self.0.map(|c| c / rhs))
    }
}

/// Symmetric matrix of size `dim` x `dim` (dim <= 3), stored densely.
pub type Matrix3<T> = [[T; 3]; 3];

pub fn zero_matrix<T: Scalar>() -> Matrix3<T> {
    [[T::zero(); 3]; 3]
}

/// Adds `w * v v^T` to `m`.
pub fn add_outer<T: Scalar>(m: &mut Matrix3<T>, v: &Vector<T>, w: T) {
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = m[i][j] + w * v.0[i] * v.0[j];
        }
    }
}

/// Solves `m x = b` for a symmetric positive definite `m` of size `dim`
/// by Cholesky factorization. `None` if `m` is not numerically SPD.
pub fn cholesky_solve<T: Scalar>(dim: usize, m: &Matrix3<T>, b: &Vector<T>) -> Option<Vector<T>> {
    let mut l = zero_matrix::<T>();
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = m[i][j];
            for k in 0..j {
                sum = sum - l[i][k] * l[j][k];
            }
            if i == j {
                if !(sum > T::zero()) {
                    return None;
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    let mut y = Vector::<T>::zero();
    for i in 0..dim {
        let mut sum = b.0[i];
        for k in 0..i {
            sum = sum - l[i][k] * y.0[k];
        }
        y.0[i] = sum / l[i][i];
    }
    let mut x = Vector::<T>::zero();
    for i in (0..dim).rev() {
        let mut sum = y.0[i];
        for k in i + 1..dim {
            sum = sum - l[k][i] * x.0[k];
        }
        x.0[i] = sum / l[i][i];
    }
    x.is_finite().then_some(x)
}

/// Gaussian elimination with partial pivoting on a small dense system.
/// `a` is row-major `n x n`. Returns `None` when a pivot vanishes.
pub fn solve_dense<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return None;
    }
    let tiny = scale * T::epsilon() * T::lit(16.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() <= tiny {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut sum = b[row];
        for k in row + 1..n {
            sum = sum - a[row][k] * x[k];
        }
        x[row] = sum / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Solves `rows[i] . x = rhs[i]` for the `dim` hyperplanes given.
pub fn intersect_planes<T: Scalar>(dim: usize, rows: &[Vector<T>], rhs: &[T]) -> Option<Vector<T>> {
    let a = rows.iter().map(|r| r.coords(dim).to_vec()).collect();
    let x = solve_dense(a, rhs.to_vec())?;
    Vector::from_slice(dim, &x)
}
