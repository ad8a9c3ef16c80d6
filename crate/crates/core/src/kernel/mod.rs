//! Polytopes given as intersections of halfspaces `{x : u_k . x <= h_k}`.
//!
//! [`intersect_halfspaces`] is the single entry point that turns a direction
//! set and a support vector into a [`PolytopeMesh`]. The construction
//! translates the Chebyshev center of the body to the origin, maps every
//! halfspace to the dual point `u_k / h'_k`, and reads vertices, facet
//! incidence and redundancy off the convex hull of those points. The body is
//! bounded exactly when the origin lies strictly inside that hull, which is
//! also how unboundedness is detected.

mod hull2;
mod hull3;
mod lp;

use std::ops::Deref;

use thiserror::Error;

use crate::scalar::Scalar;
use crate::vector::{intersect_planes, Vector};

use hull2::{convex_hull_2d, Hull2};
use hull3::{convex_hull_3d, Hull3};
use lp::{inscribed_ball, BallLp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError<T: Scalar> {
    #[error("dimension {0} is not supported (expected 2 or 3)")]
    DimUnsupported(usize),
    #[error("direction {index} has norm {norm}, expected a unit vector")]
    NotUnit { index: usize, norm: T },
    #[error("directions {first} and {second} coincide")]
    DuplicateDirection { first: usize, second: usize },
    #[error("{count} directions given, at least {required} needed in dimension {dim}")]
    TooFewDirections { count: usize, required: usize, dim: usize },
    #[error("support vector has {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("support value {index} is not finite")]
    NonFinite { index: usize },
    #[error("halfspace intersection is unbounded (every direction has u . {witness:?} >= 0)")]
    Unbounded { witness: Vector<T> },
    #[error("halfspace intersection has empty interior")]
    Empty,
    #[error("numerical breakdown: {0}")]
    Numerical(&'static str),
}

/// Unit outer normals `u_1, ..., u_N` in R^2 or R^3.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet<T> {
    dim: usize,
    dirs: Vec<Vector<T>>,
}

impl<T: Scalar> DirectionSet<T> {
    /// Validates unit length, count `N >= dim + 1` and pairwise distinctness.
    pub fn new(dim: usize, dirs: Vec<Vector<T>>) -> Result<Self, GeometryError<T>> {
        if !(dim == 2 || dim == 3) {
            return Err(GeometryError::DimUnsupported(dim));
        }
        let unit_tol = T::lit(T::UNIT_NORM_TOL);
        for (index, u) in dirs.iter().enumerate() {
            let norm = u.norm();
            let planar_ok = dim == 3 || u[2] == T::zero();
            if !u.is_finite() || !planar_ok || (norm - T::one()).abs() > unit_tol {
                return Err(GeometryError::NotUnit { index, norm });
            }
        }
        if dirs.len() < dim + 1 {
            return Err(GeometryError::TooFewDirections { count: dirs.len(), required: dim + 1, dim });
        }
        let angle_tol = T::lit(T::ANGLE_TOL);
        for i in 0..dirs.len() {
            for j in i + 1..dirs.len() {
                if dirs[i].distance(&dirs[j]) < angle_tol {
                    return Err(GeometryError::DuplicateDirection { first: i, second: j });
                }
            }
        }
        Ok(DirectionSet { dim, dirs })
    }

    /// Normalizes each vector first; zero vectors are rejected as non-unit.
    pub fn from_unnormalized(dim: usize, vectors: Vec<Vector<T>>) -> Result<Self, GeometryError<T>> {
        let mut dirs = Vec::with_capacity(vectors.len());
        for (index, v) in vectors.into_iter().enumerate() {
            match v.normalized() {
                Some(u) => dirs.push(u),
                None => return Err(GeometryError::NotUnit { index, norm: v.norm() }),
            }
        }
        Self::new(dim, dirs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn as_slice(&self) -> &[Vector<T>] {
        &self.dirs
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vector<T>> {
        self.dirs.iter()
    }

    /// A unit vector orthogonal to every direction, if they fail to span R^dim.
    fn orthogonal_complement(&self) -> Option<Vector<T>> {
        let eps = T::lit(1e3) * T::epsilon();
        if self.dim == 2 {
            let spans = self
                .dirs
                .iter()
                .any(|u| self.dirs[0].cross2(u).abs() > eps);
            return (!spans).then(|| Vector::new2(-self.dirs[0][1], self.dirs[0][0]));
        }
        let (mut best, mut normal) = (T::zero(), Vector::zero());
        for u in &self.dirs {
            let c = self.dirs[0].cross(u);
            if c.norm() > best {
                best = c.norm();
                normal = c;
            }
        }
        if best <= eps {
            let perp = self.dirs[0]
                .cross(&Vector::axis(0))
                .normalized()
                .or_else(|| self.dirs[0].cross(&Vector::axis(1)).normalized());
            return perp;
        }
        let normal = normal / best;
        let spans = self.dirs.iter().any(|u| normal.dot(u).abs() > eps);
        (!spans).then_some(normal)
    }
}

impl<T> Deref for DirectionSet<T> {
    type Target = [Vector<T>];
    fn deref(&self) -> &[Vector<T>] {
        &self.dirs
    }
}

/// Support numbers `h_k`, indexed like the direction set they belong to.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportVector<T>(pub Vec<T>);

impl<T: Scalar> SupportVector<T> {
    pub fn constant(n: usize, value: T) -> Self {
        SupportVector(vec![value; n])
    }

    pub fn scaled(&self, factor: T) -> Self {
        SupportVector(self.0.iter().map(|&h| h * factor).collect())
    }

    /// Support numbers of the body translated by `shift`.
    pub fn translated(&self, dirs: &DirectionSet<T>, shift: &Vector<T>) -> Self {
        SupportVector(self.0.iter().zip(dirs.iter()).map(|(&h, u)| h + u.dot(shift)).collect())
    }
}

impl<T> Deref for SupportVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> From<Vec<T>> for SupportVector<T> {
    fn from(v: Vec<T>) -> Self {
        SupportVector(v)
    }
}

/// A facet `F(P, u_k)` with positive area.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet<T> {
    /// Indices into [`PolytopeMesh::vertices`]. In 3D the ring is ordered
    /// counter-clockwise seen from outside; in 2D it is the edge's two ends.
    pub ring: Vec<usize>,
    pub area: T,
}

/// A bounded full-dimensional polytope with facets labelled by direction.
#[derive(Clone, Debug, PartialEq)]
pub struct PolytopeMesh<T> {
    dirs: DirectionSet<T>,
    vertices: Vec<Vector<T>>,
    facets: Vec<Option<Facet<T>>>,
    support: Vec<T>,
    volume: T,
    diameter: T,
    interior_point: Vector<T>,
    inradius: T,
}

impl<T: Scalar> PolytopeMesh<T> {
    pub fn dim(&self) -> usize {
        self.dirs.dim()
    }

    pub fn directions(&self) -> &DirectionSet<T> {
        &self.dirs
    }

    pub fn vertices(&self) -> &[Vector<T>] {
        &self.vertices
    }

    /// Facet per input direction; `None` marks a direction whose halfspace
    /// is redundant or only touches the body in a lower-dimensional face.
    pub fn facets(&self) -> &[Option<Facet<T>>] {
        &self.facets
    }

    pub fn volume(&self) -> T {
        self.volume
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    /// Center of the largest inscribed ball.
    pub fn interior_point(&self) -> Vector<T> {
        self.interior_point
    }

    pub fn inradius(&self) -> T {
        self.inradius
    }

    /// Realized support values `h(P, u_k)`.
    pub fn support(&self) -> &[T] {
        &self.support
    }

    pub fn support_vector(&self) -> SupportVector<T> {
        SupportVector(self.support.clone())
    }

    /// Facet areas `a_k`, zero for absent facets.
    pub fn facet_areas(&self) -> Vec<T> {
        self.facets
            .iter()
            .map(|f| f.as_ref().map_or(T::zero(), |f| f.area))
            .collect()
    }

    pub fn facet_area(&self, k: usize) -> T {
        self.facets[k].as_ref().map_or(T::zero(), |f| f.area)
    }

    pub fn present_facet_count(&self) -> usize {
        self.facets.iter().filter(|f| f.is_some()).count()
    }

    /// Support function `h(P, u) = max_{x in P} x . u` over the vertices.
    pub fn support_value(&self, u: &Vector<T>) -> T {
        self.vertices
            .iter()
            .map(|x| x.dot(u))
            .fold(T::neg_infinity(), T::max)
    }

    /// Largest distance of a point of the body from the origin.
    pub fn outer_radius(&self) -> T {
        self.vertices.iter().map(|x| x.norm()).fold(T::zero(), T::max)
    }

    /// `factor * P` for `factor > 0`.
    pub fn scaled(&self, factor: T) -> Self {
        let area_factor = factor.powi(self.dim() as i32 - 1);
        PolytopeMesh {
            dirs: self.dirs.clone(),
            vertices: self.vertices.iter().map(|&x| x * factor).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| {
                    f.as_ref().map(|f| Facet { ring: f.ring.clone(), area: f.area * area_factor })
                })
                .collect(),
            support: self.support.iter().map(|&s| s * factor).collect(),
            volume: self.volume * area_factor * factor,
            diameter: self.diameter * factor,
            interior_point: self.interior_point * factor,
            inradius: self.inradius * factor,
        }
    }

    /// `P + shift`.
    pub fn translated(&self, shift: &Vector<T>) -> Self {
        let mut out = self.clone();
        for x in &mut out.vertices {
            *x += *shift;
        }
        for (s, u) in out.support.iter_mut().zip(self.dirs.iter()) {
            *s = *s + u.dot(shift);
        }
        out.interior_point += *shift;
        out
    }

    /// Center of mass, from the cone decomposition over the inscribed-ball
    /// center.
    pub fn centroid(&self) -> Vector<T> {
        let apex = self.interior_point;
        let mut moment = Vector::zero();
        let mut total = T::zero();
        for facet in self.facets.iter().flatten() {
            let ring: Vec<Vector<T>> = facet.ring.iter().map(|&i| self.vertices[i]).collect();
            if self.dim() == 2 {
                let w = (ring[0] - apex).cross2(&(ring[1] - apex)).abs() / T::lit(2.0);
                moment += (apex + ring[0] + ring[1]) * (w / T::lit(3.0));
                total = total + w;
            } else {
                for i in 1..ring.len() - 1 {
                    let (a, b, c) = (ring[0] - apex, ring[i] - apex, ring[i + 1] - apex);
                    let w = a.dot(&b.cross(&c)).abs() / T::lit(6.0);
                    moment += (apex + ring[0] + ring[i] + ring[i + 1]) * (w / T::lit(4.0));
                    total = total + w;
                }
            }
        }
        moment / total
    }
}

/// Center and radius of the largest ball inside `{x : u_k . x <= h_k}`.
///
/// Fails with `Empty` if the radius is not positive and with `Unbounded` when
/// the directions sit in an open hemisphere, so that balls of any size fit.
pub fn chebyshev_center<T: Scalar>(
    dirs: &DirectionSet<T>,
    h: &SupportVector<T>,
) -> Result<(Vector<T>, T), GeometryError<T>> {
    check_support(dirs, h)?;
    match inscribed_ball(dirs.dim(), dirs, h) {
        None => Err(GeometryError::Numerical("inscribed ball LP did not terminate")),
        Some(BallLp::Unbounded { pole }) => Err(GeometryError::Unbounded { witness: pole }),
        Some(BallLp::Optimal { center, radius }) => {
            let magnitude = h.iter().fold(center.max_abs(), |m, v| m.max(v.abs()));
            if radius <= T::geom_eps() * magnitude {
                Err(GeometryError::Empty)
            } else {
                Ok((center, radius))
            }
        }
    }
}

fn check_support<T: Scalar>(dirs: &DirectionSet<T>, h: &[T]) -> Result<(), GeometryError<T>> {
    if h.len() != dirs.len() {
        return Err(GeometryError::LengthMismatch { expected: dirs.len(), got: h.len() });
    }
    if let Some(index) = h.iter().position(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite { index });
    }
    Ok(())
}

/// Builds `P = { x : u_k . x <= h_k for all k }`.
pub fn intersect_halfspaces<T: Scalar>(
    dirs: &DirectionSet<T>,
    h: &SupportVector<T>,
) -> Result<PolytopeMesh<T>, GeometryError<T>> {
    check_support(dirs, h)?;
    if let Some(normal) = dirs.orthogonal_complement() {
        return Err(GeometryError::Unbounded { witness: normal });
    }
    let (center, radius) = chebyshev_center(dirs, h)?;
    let dim = dirs.dim();
    let eps = T::geom_eps();

    let offsets: Vec<T> = h.iter().zip(dirs.iter()).map(|(&hk, u)| hk - u.dot(&center)).collect();
    let dual: Vec<Vector<T>> = dirs.iter().zip(&offsets).map(|(u, &o)| *u / o).collect();
    let dual_scale = dual.iter().fold(T::zero(), |m, q| m.max(q.norm()));
    let inside_tol = eps * dual_scale;

    // Corners of P (translated frame) and, per direction, the cyclic list of
    // corners on its supporting hyperplane.
    let mut corners: Vec<Vector<T>> = Vec::new();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); dirs.len()];

    if dim == 2 {
        let ring = match convex_hull_2d(&dual, eps) {
            Hull2::Flat { normal, offset } => return Err(flat_witness(normal, offset)),
            Hull2::Polygon(ring) => ring,
        };
        let m = ring.len();
        for i in 0..m {
            let (a, b) = (ring[i], ring[(i + 1) % m]);
            let edge = dual[b] - dual[a];
            let len = edge.norm();
            // Origin must be strictly left of every counter-clockwise edge.
            if dual[a].cross2(&dual[b]) <= inside_tol * len {
                let outward = Vector::new2(edge[1], -edge[0]) / len;
                return Err(GeometryError::Unbounded { witness: -outward });
            }
            let point = intersect_planes(2, &[dirs[a], dirs[b]], &[offsets[a], offsets[b]])
                .ok_or(GeometryError::Numerical("parallel adjacent edges"))?;
            corners.push(point);
        }
        for i in 0..m {
            incident[ring[(i + 1) % m]] = vec![i, (i + 1) % m];
        }
    } else {
        let tris = match convex_hull_3d(&dual, eps) {
            Hull3::Flat { normal, offset } => return Err(flat_witness(normal, offset)),
            Hull3::Triangles(tris) => tris,
        };
        for t in &tris {
            let [a, b, c] = *t;
            let qa = dual[a];
            let normal = (dual[b] - qa).cross(&(dual[c] - qa));
            let nlen = normal.norm();
            if normal.dot(&qa) <= inside_tol * nlen {
                return Err(GeometryError::Unbounded { witness: -(normal / nlen) });
            }
            let point = intersect_planes(3, &[dirs[a], dirs[b], dirs[c]], &[offsets[a], offsets[b], offsets[c]])
                .unwrap_or_else(|| normal / normal.dot(&qa));
            corners.push(point);
        }
        // Walk the triangles around every hull vertex.
        let mut around: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); dirs.len()];
        for (f, t) in tris.iter().enumerate() {
            for r in 0..3 {
                around[t[r]].push((t[(r + 1) % 3], t[(r + 2) % 3], f));
            }
        }
        for (k, fan) in around.iter().enumerate() {
            if fan.is_empty() {
                continue;
            }
            // Entry (a, b, f): triangle f is (k, a, b) counter-clockwise, so the
            // next triangle around k starts with b.
            let mut order = vec![fan[0].2];
            let mut cur = fan[0].1;
            while order.len() < fan.len() {
                let Some(&(_, b, f)) = fan.iter().find(|e| e.0 == cur) else { break };
                if f == fan[0].2 {
                    break;
                }
                order.push(f);
                cur = b;
            }
            incident[k] = order;
        }
    }

    // Merge coincident corners (coplanar dual faces, tiny edges).
    let outer = corners.iter().fold(T::zero(), |m, c| m.max(c.norm()));
    let merge_tol = T::lit(10.0) * eps * outer;
    let mut label: Vec<usize> = (0..corners.len()).collect();
    let mut vertices: Vec<Vector<T>> = Vec::new();
    for i in 0..corners.len() {
        if let Some(j) = (0..vertices.len()).find(|&j| vertices[j].distance(&corners[i]) <= merge_tol) {
            label[i] = j;
        } else {
            label[i] = vertices.len();
            vertices.push(corners[i]);
        }
    }

    let diameter = pairwise_diameter(&vertices);
    let area_floor = eps * diameter.powi(dim as i32 - 1);
    let mut facets: Vec<Option<Facet<T>>> = Vec::with_capacity(dirs.len());
    for (k, inc) in incident.iter().enumerate() {
        let mut ring: Vec<usize> = Vec::with_capacity(inc.len());
        for &c in inc {
            let v = label[c];
            if ring.last() != Some(&v) {
                ring.push(v);
            }
        }
        while ring.len() > 1 && ring.first() == ring.last() {
            ring.pop();
        }
        let facet = if dim == 2 {
            (ring.len() == 2).then(|| {
                let area = vertices[ring[0]].distance(&vertices[ring[1]]);
                Facet { ring, area }
            })
        } else if ring.len() >= 3 {
            let base = vertices[ring[0]];
            let mut normal = Vector::zero();
            for i in 1..ring.len() - 1 {
                normal += (vertices[ring[i]] - base).cross(&(vertices[ring[i + 1]] - base));
            }
            let signed = normal.dot(&dirs[k]) / T::lit(2.0);
            if signed < T::zero() {
                ring.reverse();
            }
            Some(Facet { ring, area: signed.abs() })
        } else {
            None
        };
        facets.push(facet.filter(|f| f.area > area_floor));
    }

    let n = T::from_usize_lossy(dim);
    let volume = facets
        .iter()
        .zip(&offsets)
        .filter_map(|(f, &o)| f.as_ref().map(|f| o * f.area))
        .sum::<T>()
        / n;
    if !(volume > eps * diameter.powi(dim as i32)) {
        return Err(GeometryError::Empty);
    }

    for x in &mut vertices {
        *x += center;
    }
    let support = facets
        .iter()
        .zip(dirs.iter())
        .zip(h.iter())
        .map(|((f, u), &hk)| match f {
            Some(_) => hk,
            None => vertices.iter().map(|x| x.dot(u)).fold(T::neg_infinity(), T::max).min(hk),
        })
        .collect();

    Ok(PolytopeMesh {
        dirs: dirs.clone(),
        vertices,
        facets,
        support,
        volume,
        diameter,
        interior_point: center,
        inradius: radius,
    })
}

/// Witness for a dual point set that is not full-dimensional: every dual
/// point lies on `normal . q = offset`, so `u_k . v` has one sign.
fn flat_witness<T: Scalar>(normal: Vector<T>, offset: T) -> GeometryError<T> {
    let witness = if offset > T::zero() { normal } else { -normal };
    GeometryError::Unbounded { witness }
}

fn pairwise_diameter<T: Scalar>(points: &[Vector<T>]) -> T {
    let mut best = T::zero();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.max(points[i].distance(&points[j]));
        }
    }
    best
}

/// Convex hull of a point cloud as a labelled polytope.
///
/// The returned direction set holds the outer unit normals of the hull's
/// facets (coplanar triangles merged), and the mesh is rebuilt from them by
/// [`intersect_halfspaces`] so it carries the same structure as any other.
pub fn polytope_from_points<T: Scalar>(
    dim: usize,
    points: &[Vector<T>],
) -> Result<(DirectionSet<T>, PolytopeMesh<T>), GeometryError<T>> {
    if !(dim == 2 || dim == 3) {
        return Err(GeometryError::DimUnsupported(dim));
    }
    let eps = T::geom_eps();
    let mut normals: Vec<Vector<T>> = Vec::new();
    if dim == 2 {
        let Hull2::Polygon(ring) = convex_hull_2d(points, eps) else {
            return Err(GeometryError::Empty);
        };
        for i in 0..ring.len() {
            let e = points[ring[(i + 1) % ring.len()]] - points[ring[i]];
            if let Some(n) = Vector::new2(e[1], -e[0]).normalized() {
                normals.push(n);
            }
        }
    } else {
        let Hull3::Triangles(tris) = convex_hull_3d(points, eps) else {
            return Err(GeometryError::Empty);
        };
        let mut weighted: Vec<(Vector<T>, T)> = Vec::new();
        for t in tris {
            let n = (points[t[1]] - points[t[0]]).cross(&(points[t[2]] - points[t[0]]));
            let (Some(unit), area) = (n.normalized(), n.norm()) else { continue };
            match weighted
                .iter_mut()
                .find(|(m, _)| m.distance(&unit) < T::lit(1e3) * eps)
            {
                Some((_, w)) if area > *w => {
                    *w = area;
                }
                Some(_) => {}
                None => weighted.push((unit, area)),
            }
        }
        normals = weighted.into_iter().map(|(n, _)| n).collect();
    }
    let dirs = DirectionSet::new(dim, normals)?;
    let h: Vec<T> = dirs
        .iter()
        .map(|u| points.iter().map(|x| x.dot(u)).fold(T::neg_infinity(), T::max))
        .collect();
    let mesh = intersect_halfspaces(&dirs, &SupportVector(h))?;
    Ok((dirs, mesh))
}
