use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{IoError, ProblemFile};
use crate::kernel::{DirectionSet, GeometryError};
use crate::measure::{check_hemisphere, DiscreteMeasure};
use crate::vector::{solve_dense, Vector};

const MAX_ATTEMPTS: usize = 1000;
const ALPHA_MIN: f64 = 0.1;
const ALPHA_MAX: f64 = 10.0;
const REFIT_SWEEPS: usize = 500;

/// A reproducible admissible instance: directions uniform on the sphere
/// (resampled until no closed hemisphere holds them all), weights uniform in
/// `[0.1, 10]`. For `p = 1` the weights are then moved to the nearest
/// closed vector that stays at least `0.1`.
pub fn gen_random_instance(seed: u64, dim: usize, n: usize, p: f64) -> Result<ProblemFile, IoError> {
    if dim != 2 && dim != 3 {
        return Err(GeometryError::DimUnsupported(dim).into());
    }
    if n < dim + 1 {
        return Err(GeometryError::TooFewDirections { count: n, required: dim + 1, dim }.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let dirs: Vec<Vector<f64>> = (0..n).map(|_| random_unit(&mut rng, dim)).collect();
        let Ok(dirs) = DirectionSet::new(dim, dirs) else { continue };
        if !check_hemisphere(&dirs).passed() {
            continue;
        }
        let mut alpha: Vec<f64> = (0..n).map(|_| rng.random_range(ALPHA_MIN..=ALPHA_MAX)).collect();
        if p == 1.0 {
            match refit_closed(&dirs, &alpha) {
                Some(a) => alpha = a,
                None => continue,
            }
        }
        let measure = DiscreteMeasure::new(dirs, alpha, p)?;
        return Ok(ProblemFile::from_measure(&measure));
    }
    Err(IoError::Infeasible { attempts: MAX_ATTEMPTS })
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vector<f64> {
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

/// Projection onto `{ sum_k a_k u_k = 0 }`.
fn project_closed(dirs: &DirectionSet<f64>, a: &[f64]) -> Option<Vec<f64>> {
    let dim = dirs.dim();
    let mut gram = vec![vec![0.0; dim]; dim];
    let mut moment = vec![0.0; dim];
    for (u, &ak) in dirs.iter().zip(a) {
        for i in 0..dim {
            moment[i] += ak * u[i];
            for j in 0..dim {
                gram[i][j] += u[i] * u[j];
            }
        }
    }
    let lambda = solve_dense(gram, moment)?;
    Some(
        dirs.iter()
            .zip(a)
            .map(|(u, &ak)| ak - (0..dim).map(|i| lambda[i] * u[i]).sum::<f64>())
            .collect(),
    )
}

/// Dykstra's alternating projections onto the closed subspace and the box
/// `a >= ALPHA_MIN`, finished with an exact subspace projection.
fn refit_closed(dirs: &DirectionSet<f64>, alpha: &[f64]) -> Option<Vec<f64>> {
    let n = alpha.len();
    let mut x = alpha.to_vec();
    let mut q = vec![0.0; n];
    for _ in 0..REFIT_SWEEPS {
        let y = project_closed(dirs, &x)?;
        let prev = x.clone();
        for k in 0..n {
            let z = y[k] + q[k];
            x[k] = z.max(ALPHA_MIN);
            q[k] = z - x[k];
        }
        let moved = x.iter().zip(&prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if moved < 1e-14 {
            break;
        }
    }
    let closed = project_closed(dirs, &x)?;
    closed.iter().all(|&a| a > 0.5 * ALPHA_MIN).then_some(closed)
}

