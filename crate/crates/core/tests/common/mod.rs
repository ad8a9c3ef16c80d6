#![allow(dead_code)]

use lp_minkowski::{
    check_hemisphere, polytope_from_points, DirectionSet, DiscreteMeasure, PolytopeMesh, Vector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vector<f64> {
    loop {
        let mut v = Vector::zero();
        for i in 0..dim {
            v.0[i] = rng.sample(StandardNormal);
        }
        if let Some(u) = v.normalized() {
            return u;
        }
    }
}

pub fn random_directions(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> DirectionSet<f64> {
    loop {
        let dirs = (0..n).map(|_| random_unit(rng, dim)).collect();
        if let Ok(d) = DirectionSet::new(dim, dirs) {
            if check_hemisphere(&d).passed() {
                return d;
            }
        }
    }
}

/// Hull of jittered points on the sphere with the origin well inside, at
/// most `max_facets` facets and no sliver facets.
pub fn random_polytope(rng: &mut ChaCha8Rng, dim: usize, max_facets: usize) -> (DirectionSet<f64>, PolytopeMesh<f64>) {
    loop {
        let count = if dim == 2 { rng.random_range(3..=max_facets) } else { rng.random_range(4..=(max_facets + 4) / 2) };
        let points: Vec<Vector<f64>> =
            (0..count).map(|_| random_unit(rng, dim) * rng.random_range(0.6..1.4)).collect();
        let Ok((dirs, mesh)) = polytope_from_points(dim, &points) else { continue };
        if dirs.len() > max_facets || mesh.present_facet_count() != dirs.len() {
            continue;
        }
        let scale = mesh.diameter();
        let areas = mesh.facet_areas();
        let largest = areas.iter().copied().fold(0.0, f64::max);
        let thin = areas.iter().any(|&a| a < 0.02 * largest);
        let inner = mesh.support().iter().copied().fold(f64::INFINITY, f64::min);
        if !thin && inner > 0.05 * scale {
            return (dirs, mesh);
        }
    }
}

pub fn measure_of(mesh: &PolytopeMesh<f64>, p: f64) -> DiscreteMeasure<f64> {
    let alpha = lp_minkowski::sp_measure(mesh, p).unwrap();
    DiscreteMeasure::new(mesh.directions().clone(), alpha, p).unwrap()
}

/// Closed-hemisphere test by enumerating candidate extreme normals: in the
/// plane the directions miss an open half-circle iff two consecutive angles
/// are at least pi apart; in space the cone `{v : u_k . v >= 0}` is nontrivial
/// iff it has an extreme ray, which lies along some `u_i x u_j`.
pub fn in_closed_hemisphere_oracle(dim: usize, dirs: &[Vector<f64>]) -> bool {
    let eps = 1e-12;
    if dim == 2 {
        let mut angles: Vec<f64> = dirs.iter().map(|u| u[1].atan2(u[0])).collect();
        angles.sort_by(f64::total_cmp);
        let n = angles.len();
        return (0..n).any(|i| {
            let next = if i + 1 < n { angles[i + 1] } else { angles[0] + std::f64::consts::TAU };
            next - angles[i] >= std::f64::consts::PI - eps
        });
    }
    let covers = |v: Vector<f64>| dirs.iter().all(|u| u.dot(&v) >= -eps);
    let mut candidates = Vec::new();
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            if let Some(c) = dirs[i].cross(&dirs[j]).normalized() {
                candidates.push(c);
                candidates.push(-c);
            }
        }
    }
    candidates.into_iter().any(covers)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
