//! Incremental 3D convex hull with conflict lists (quickhull ordering).
//!
//! Faces are triangles with outward normals; coplanar neighbours are not
//! merged here; callers that need polygonal facets group them afterwards.

use std::collections::HashMap;

use crate::scalar::Scalar;
use crate::vector::Vector;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Hull3<T> {
    /// Outward-oriented triangles (counter-clockwise seen from outside).
    Triangles(Vec<[usize; 3]>),
    /// The points do not span R^3; they lie in the plane `normal . x = offset`.
    Flat { normal: Vector<T>, offset: T },
}

struct Face<T> {
    v: [usize; 3],
    normal: Vector<T>,
    offset: T,
    outside: Vec<usize>,
    alive: bool,
}

impl<T: Scalar> Face<T> {
    fn new(points: &[Vector<T>], v: [usize; 3]) -> Self {
        let [a, b, c] = v.map(|i| points[i]);
        let n = (b - a).cross(&(c - a));
        let normal = n.normalized().unwrap_or(n);
        Face { v, normal, offset: normal.dot(&a), outside: Vec::new(), alive: true }
    }

    fn distance(&self, p: &Vector<T>) -> T {
        self.normal.dot(p) - self.offset
    }

    fn edges(&self) -> [(usize, usize); 3] {
        let [a, b, c] = self.v;
        [(a, b), (b, c), (c, a)]
    }
}

fn flat_plane<T: Scalar>(normal: Vector<T>, anchor: Vector<T>) -> Hull3<T> {
    Hull3::Flat { normal, offset: normal.dot(&anchor) }
}

/// Convex hull of `points` with relative tolerance `eps` on plane distances.
pub(crate) fn convex_hull_3d<T: Scalar>(points: &[Vector<T>], eps: T) -> Hull3<T> {
    let scale = points.iter().fold(T::zero(), |m, p| m.max(p.max_abs()));
    let tol = eps * scale;
    let n = points.len();
    if n < 4 {
        let normal = if n >= 3 {
            (points[1] - points[0]).cross(&(points[2] - points[0])).normalized()
        } else {
            None
        }
        .unwrap_or(Vector::axis(2));
        return flat_plane(normal, points.first().copied().unwrap_or_default());
    }

    // Initial simplex from axis-extreme points.
    let mut extremes = Vec::with_capacity(6);
    for axis in 0..3 {
        let cmp = |a: &&usize, b: &&usize| {
            points[**a][axis]
                .partial_cmp(&points[**b][axis])
                .unwrap_or(std::cmp::Ordering::Equal)
        };
        let all: Vec<usize> = (0..n).collect();
        extremes.push(*all.iter().min_by(cmp).unwrap());
        extremes.push(*all.iter().max_by(cmp).unwrap());
    }
    let mut i0 = extremes[0];
    let mut i1 = extremes[1];
    let mut best = T::zero();
    for &a in &extremes {
        for &b in &extremes {
            let d = points[a].distance(&points[b]);
            if d > best {
                best = d;
                i0 = a;
                i1 = b;
            }
        }
    }
    if best <= tol {
        return flat_plane(Vector::axis(2), points[0]);
    }
    let line = (points[i1] - points[i0]) / best;
    let (i2, d2) = (0..n)
        .map(|i| {
            let w = points[i] - points[i0];
            (i, (w - line * w.dot(&line)).norm())
        })
        .fold((i0, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
    if d2 <= tol {
        // Collinear: pick a plane through the line with the origin on its
        // non-positive side.
        let a = points[i0];
        let perp = a - line * a.dot(&line);
        let normal = perp
            .normalized()
            .map(|v| -v)
            .or_else(|| line.cross(&Vector::axis(0)).normalized())
            .or_else(|| line.cross(&Vector::axis(1)).normalized())
            .unwrap_or(Vector::axis(2));
        return flat_plane(normal, a);
    }
    let plane_n = (points[i1] - points[i0])
        .cross(&(points[i2] - points[i0]))
        .normalized()
        .unwrap_or(Vector::axis(2));
    let (i3, d3) = (0..n)
        .map(|i| (i, plane_n.dot(&(points[i] - points[i0]))))
        .fold((i0, T::zero()), |acc, x| if x.1.abs() > acc.1.abs() { x } else { acc });
    if d3.abs() <= tol {
        return flat_plane(plane_n, points[i0]);
    }

    let mut faces: Vec<Face<T>> = Vec::new();
    let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();
    let simplex = [i0, i1, i2, i3];
    let centroid = simplex.iter().fold(Vector::zero(), |s, &i| s + points[i]) / T::lit(4.0);
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut f = Face::new(points, tri);
        if f.distance(&centroid) > T::zero() {
            f = Face::new(points, [tri[0], tri[2], tri[1]]);
        }
        let id = faces.len();
        for e in f.edges() {
            edge_face.insert(e, id);
        }
        faces.push(f);
    }
    for i in 0..n {
        if simplex.contains(&i) {
            continue;
        }
        assign(points, &mut faces, &[0, 1, 2, 3], i, tol);
    }

    let mut visible: Vec<usize> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    while let Some(seed) = (0..faces.len()).find(|&f| faces[f].alive && !faces[f].outside.is_empty()) {
        let apex = *faces[seed]
            .outside
            .iter()
            .max_by(|&&a, &&b| {
                faces[seed]
                    .distance(&points[a])
                    .partial_cmp(&faces[seed].distance(&points[b]))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        let p = points[apex];

        // Flood the connected set of faces that see the apex.
        visible.clear();
        stack.clear();
        stack.push(seed);
        let mut is_visible = HashMap::new();
        is_visible.insert(seed, true);
        while let Some(f) = stack.pop() {
            visible.push(f);
            for (a, b) in faces[f].edges() {
                let Some(&g) = edge_face.get(&(b, a)) else { continue };
                if is_visible.contains_key(&g) {
                    continue;
                }
                let sees = faces[g].distance(&p) > tol;
                is_visible.insert(g, sees);
                if sees {
                    stack.push(g);
                }
            }
        }

        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &f in &visible {
            for (a, b) in faces[f].edges() {
                let twin = edge_face.get(&(b, a)).copied();
                if !twin.is_some_and(|g| is_visible.get(&g).copied().unwrap_or(false)) {
                    horizon.push((a, b));
                }
            }
        }

        let mut orphans: Vec<usize> = Vec::new();
        for &f in &visible {
            faces[f].alive = false;
            for e in faces[f].edges() {
                edge_face.remove(&e);
            }
            orphans.extend(faces[f].outside.drain(..).filter(|&i| i != apex));
        }
        let mut created = Vec::with_capacity(horizon.len());
        for (a, b) in horizon {
            let f = Face::new(points, [a, b, apex]);
            let id = faces.len();
            for e in f.edges() {
                edge_face.insert(e, id);
            }
            faces.push(f);
            created.push(id);
        }
        for i in orphans {
            assign(points, &mut faces, &created, i, tol);
        }
    }

    Hull3::Triangles(faces.into_iter().filter(|f| f.alive).map(|f| f.v).collect())
}

fn assign<T: Scalar>(points: &[Vector<T>], faces: &mut [Face<T>], candidates: &[usize], i: usize, tol: T) {
    let mut best: Option<(usize, T)> = None;
    for &f in candidates {
        let d = faces[f].distance(&points[i]);
        if d > tol && best.is_none_or(|(_, bd)| d > bd) {
            best = Some((f, d));
        }
    }
    if let Some((f, _)) = best {
        faces[f].outside.push(i);
    }
}
