//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{in_closed_hemisphere_oracle, measure_of, random_directions, random_polytope, random_unit, rel, rng};
use lp_minkowski::{
    check_hemisphere, intersect_halfspaces, sp_measure, solve, solve_xi, AdmissionError, DirectionSet,
    DiscreteMeasure, InnerError, InnerProblem, PolytopeMesh, Regime, SolveReport, SolverOptions, SupportVector, Vector,
};
use rand::Rng;

const TOL: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Successful exits collected for the structural checks.
type Exits = Vec<(DiscreteMeasure<f64>, SolveReport<f64>)>;

fn box_dirs(dim: usize) -> DirectionSet<f64> {
    let mut dirs = Vec::new();
    for axis in 0..dim {
        dirs.push(Vector::axis(axis));
        dirs.push(-Vector::axis(axis));
    }
    DirectionSet::new(dim, dirs).unwrap()
}

fn criterion_closed_forms(exits: &mut Exits) -> Outcome {
    let tri_dirs: Vec<Vector<f64>> = (0..3)
        .map(|k| {
            let t = std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * k as f64 / 3.0;
            Vector::new2(t.cos(), t.sin())
        })
        .collect();
    let cases = [
        ("square p=1/2", box_dirs(2), 0.5, 2f64.powf(-2.0 / 3.0)),
        ("cube p=1/2", box_dirs(3), 0.5, 4f64.powf(-0.4)),
        ("cube p=2", box_dirs(3), 2.0, 0.25),
        ("triangle p=1", DirectionSet::new(2, tri_dirs).unwrap(), 1.0, f64::NAN),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, dirs, p, h) in cases {
        let n = dirs.len();
        let measure = DiscreteMeasure::new(dirs, vec![1.0; n], p).unwrap();
        let start = Instant::now();
        let result = solve(&measure, &SolverOptions::default());
        let elapsed = start.elapsed();
        let Ok(report) = result else {
            pass = false;
            notes.push(format!("{name}: {}", result.unwrap_err()));
            continue;
        };
        let err = if h.is_nan() {
            // Edge lengths straight from the vertex ring.
            let v = report.solution.vertices();
            (0..v.len()).map(|i| (v[i].distance(&v[(i + 1) % v.len()]) - 1.0).abs()).fold(0.0, f64::max)
        } else {
            report.solution.support().iter().map(|s| (s - h).abs()).fold(0.0, f64::max)
        };
        let ok = err <= 1e-8 && elapsed < Duration::from_secs(1);
        pass &= ok;
        notes.push(format!("{name}: err {err:.1e} in {:.0} ms", elapsed.as_secs_f64() * 1e3));
        exits.push((measure, report));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_round_trip(exits: &mut Exits) -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    for (regime, exponents) in [("sub-one", [0.3, 0.5, 0.9]), ("p>=1", [1.0, 1.5, 3.5])] {
        let mut worst = 0.0f64;
        let mut failures = 0;
        let mut iterations = 0;
        for i in 0..50u64 {
            let mut r = rng(1000 + i + if regime == "p>=1" { 500 } else { 0 });
            let dim = if i % 2 == 0 { 2 } else { 3 };
            let p = exponents[(i / 2) as usize % 3];
            let (_, mesh) = random_polytope(&mut r, dim, if dim == 2 { 12 } else { 10 });
            let measure = measure_of(&mesh, p);
            match solve(&measure, &SolverOptions::default()) {
                Ok(report) if report.residual.max_relative <= 1e-6 => {
                    worst = worst.max(report.residual.max_relative);
                    iterations += report.iterations;
                    exits.push((measure, report));
                }
                Ok(report) => {
                    failures += 1;
                    worst = worst.max(report.residual.max_relative);
                }
                Err(e) => {
                    failures += 1;
                    eprintln!("  round trip {regime} #{i} (n={dim}, p={p}): {e}");
                }
            }
        }
        pass &= failures == 0;
        notes.push(format!("{regime}: {failures}/50 failed, worst residual {worst:.1e}, {iterations} iterations"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(300);
    notes.push(format!("{:.1} s", elapsed.as_secs_f64()));
    outcome(pass, notes.join("; "))
}

fn random_polygon(r: &mut rand_chacha::ChaCha8Rng) -> (DirectionSet<f64>, PolytopeMesh<f64>) {
    random_polytope(r, 2, 8)
}

/// Brute-force maximum of `Phi` over a `cells x cells` grid on the bounding
/// box: (value, x, y, dx, dy).
fn grid_argmax(prob: &InnerProblem<'_, f64>, mesh: &PolytopeMesh<f64>, cells: usize) -> (f64, f64, f64, f64, f64) {
    let measure = prob.measure();
    let phi = |x: f64, y: f64| -> Option<f64> {
        let mut total = 0.0;
        for ((u, &h), &a) in measure.directions().iter().zip(mesh.support()).zip(measure.alpha()) {
            let slack = h - (u[0] * x + u[1] * y);
            if slack <= 0.0 {
                return None;
            }
            total += a * slack.powf(measure.p());
        }
        Some(total)
    };
    let (lo, hi) = bounding_box(mesh);
    let (dx, dy) = ((hi[0] - lo[0]) / cells as f64, (hi[1] - lo[1]) / cells as f64);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for a in 0..=cells {
        for b in 0..=cells {
            let (x, y) = (lo[0] + a as f64 * dx, lo[1] + b as f64 * dy);
            if let Some(v) = phi(x, y) {
                if v > best.0 {
                    best = (v, x, y);
                }
            }
        }
    }
    (best.0, best.1, best.2, dx, dy)
}

fn criterion_inner_oracle() -> Outcome {
    let mut worst_cells = 0.0f64;
    let mut worst_grad = 0.0f64;
    let mut worst_hess = 0.0f64;
    let mut dominated = 0;
    let mut unresolved = 0;
    let mut pass = true;
    for i in 0..20u64 {
        let mut r = rng(7000 + i);
        let (_, mesh) = random_polygon(&mut r);
        let p = [0.3, 0.5, 0.7][i as usize % 3];
        let n = mesh.directions().len();
        // Comparable weights and p away from 1 keep the maximizer resolvable
        // on the grid. Wide weights or p near 1 can pin it within 1e-10 of a
        // facet, where only domination over the grid is checkable.
        let alpha: Vec<f64> = (0..n).map(|_| r.random_range(0.5..2.0)).collect();
        let wide: Vec<f64> = (0..n).map(|_| r.random_range(0.1..10.0)).collect();
        let wide_p = [0.5, 0.9][i as usize % 2];

        let measure = DiscreteMeasure::new(mesh.directions().clone(), alpha.clone(), p).unwrap();
        let prob = InnerProblem::new(&measure, mesh.support()).unwrap();
        let sol = solve_xi(&prob, 1e-12).unwrap();
        let (_, gx, gy, dx, dy) = grid_argmax(&prob, &mesh, 400);
        let off = ((sol.xi[0] - gx).abs() / dx).max((sol.xi[1] - gy).abs() / dy);
        worst_cells = worst_cells.max(off);
        pass &= off <= 1.0;

        let wide_measure = DiscreteMeasure::new(mesh.directions().clone(), wide, wide_p).unwrap();
        let wide_prob = InnerProblem::new(&wide_measure, mesh.support()).unwrap();
        // The maximizer may sit closer to a facet than a double can resolve;
        // the solver then reports its best iterate.
        let wide_sol = match solve_xi(&wide_prob, 1e-12) {
            Ok(sol) => sol,
            Err(InnerError::MaxIterations { best }) => {
                unresolved += 1;
                *best
            }
            Err(e) => panic!("{e}"),
        };
        let (grid_best, ..) = grid_argmax(&wide_prob, &mesh, 400);
        if wide_sol.value >= grid_best * (1.0 - 1e-15) {
            dominated += 1;
        }

        // Finite differences at an interior point away from the optimum.
        let x0 = sol.xi * 0.6 + mesh.interior_point() * 0.4;
        let (g, hmat) = prob.gradient_hessian(&x0).unwrap();
        let step = 1e-5 * mesh.diameter();
        let value = |v: Vector<f64>| prob.value(&v).unwrap();
        let grad_at = |v: Vector<f64>| prob.gradient_hessian(&v).unwrap().0;
        let gscale = g.norm().max(1e-3 * alpha.iter().sum::<f64>());
        for axis in 0..2 {
            let e = Vector::<f64>::axis(axis) * step;
            let fd = (value(x0 + e) - value(x0 - e)) / (2.0 * step);
            let gerr = (fd - g[axis]).abs() / gscale;
            worst_grad = worst_grad.max(gerr);
            let col = (grad_at(x0 + e) - grad_at(x0 - e)) / (2.0 * step);
            let hscale = hmat[0][0].abs().max(hmat[1][1].abs());
            for row in 0..2 {
                worst_hess = worst_hess.max((col[row] - hmat[row][axis]).abs() / hscale);
            }
        }
    }
    pass &= dominated == 20 && worst_grad <= 1e-5 && worst_hess <= 1e-4;
    outcome(
        pass,
        format!(
            "20 polygons: argmax within {worst_cells:.2} cells; {dominated}/20 wide-weight solves beat the grid ({unresolved} at the precision floor); \
             gradient rel err {worst_grad:.1e}; Hessian rel err {worst_hess:.1e}"
        ),
    )
}

fn bounding_box(mesh: &PolytopeMesh<f64>) -> (Vector<f64>, Vector<f64>) {
    let mut lo = Vector::new3(f64::INFINITY, f64::INFINITY, 0.0);
    let mut hi = Vector::new3(f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0);
    for v in mesh.vertices() {
        for i in 0..2 {
            lo.0[i] = lo[i].min(v[i]);
            hi.0[i] = hi[i].max(v[i]);
        }
    }
    (lo, hi)
}

fn criterion_geometry() -> Outcome {
    let (mut worst_volume, mut worst_closure, mut worst_dv) = (0.0f64, 0.0f64, 0.0f64);
    let mut checked_facets = 0;
    for i in 0..1000u64 {
        let mut r = rng(20_000 + i);
        let dim = 2 + (i % 2) as usize;
        let n = r.random_range(dim + 1..=if dim == 2 { 12 } else { 16 });
        let dirs = random_directions(&mut r, dim, n);
        let h = SupportVector((0..n).map(|_| r.random_range(0.5..1.5)).collect());
        let mesh = intersect_halfspaces(&dirs, &h).unwrap();
        let areas = mesh.facet_areas();
        let total: f64 = areas.iter().sum();

        let from_areas: f64 =
            mesh.support().iter().zip(&areas).map(|(s, a)| s * a).sum::<f64>() / dim as f64;
        worst_volume = worst_volume.max(rel(from_areas, mesh.volume()));

        let moment = dirs.iter().zip(&areas).fold(Vector::zero(), |acc, (u, &a)| acc + *u * a);
        worst_closure = worst_closure.max(moment.norm() / total);

        let d = mesh.diameter();
        let step = 1e-6 * d;
        for (k, &area) in areas.iter().enumerate() {
            if area < 1e-3 * d.powi(dim as i32 - 1) {
                continue;
            }
            let probe = |t: f64| {
                let mut hk = mesh.support_vector();
                hk.0[k] += t;
                intersect_halfspaces(&dirs, &hk).unwrap()
            };
            let (plus, minus) = (probe(step), probe(-step));
            // Skip facets whose combinatorics change within the probe.
            let pattern = |m: &PolytopeMesh<f64>| {
                (m.vertices().len(), m.facets().iter().map(|f| f.as_ref().map(|f| f.ring.len())).collect::<Vec<_>>())
            };
            if pattern(&plus) != pattern(&mesh) || pattern(&minus) != pattern(&mesh) {
                continue;
            }
            let fd = (plus.volume() - minus.volume()) / (2.0 * step);
            worst_dv = worst_dv.max(rel(fd, areas[k]));
            checked_facets += 1;
        }
    }
    let pass = worst_volume <= 1e-9 && worst_closure <= 1e-9 && worst_dv <= 1e-5;
    outcome(
        pass,
        format!(
            "1000 instances: volume rel err {worst_volume:.1e}; closure {worst_closure:.1e}; dV/dh rel err {worst_dv:.1e} over {checked_facets} facets"
        ),
    )
}

fn criterion_structure(exits: &Exits) -> Outcome {
    let mut pass = true;
    let mut worst_44 = 0.0f64;
    let mut min_support = f64::INFINITY;
    for (measure, report) in exits {
        let mesh = &report.solution;
        let dim = mesh.dim();
        let floor = 1e-8 * mesh.diameter().powi(dim as i32 - 1);
        pass &= (0..mesh.directions().len()).all(|k| mesh.facet_area(k) >= floor);
        let smallest = mesh.support().iter().copied().fold(f64::INFINITY, f64::min);
        min_support = min_support.min(smallest / mesh.diameter());
        pass &= smallest > 0.0;
        if report.regime == Regime::SubOne {
            let p = measure.p();
            let body = &report.normalized;
            let mut moment = Vector::zero();
            let mut weight = 0.0;
            for ((u, &s), &a) in body.directions().iter().zip(body.support()).zip(measure.alpha()) {
                moment += *u * (a * s.powf(p - 1.0));
                weight += a * s.powf(p - 1.0);
            }
            worst_44 = worst_44.max(moment.norm() / weight);
        }
        pass &= report
            .objective_trace
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-12 * w[0].abs());
    }
    pass &= worst_44 <= 10.0 * TOL;
    outcome(
        pass,
        format!(
            "{} exits: all facets present, min h/d {min_support:.2e}, xi-stationarity {worst_44:.1e}, traces monotone",
            exits.len()
        ),
    )
}

fn criterion_admission() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();

    let half = DirectionSet::new(
        2,
        vec![Vector::new2(1.0, 0.0), Vector::new2(0.0, 1.0), Vector::new2(-1.0, 0.0)],
    )
    .unwrap();
    let ok = matches!(DiscreteMeasure::new(half, vec![1.0; 3], 0.5), Err(AdmissionError::Hemisphere { .. }));
    pass &= ok;
    notes.push(format!("hemisphere {}", if ok { "rejected" } else { "ACCEPTED" }));

    let ok = matches!(
        DiscreteMeasure::new(box_dirs(3), vec![1.0; 6], 3.0),
        Err(AdmissionError::ExponentEqualsDimension { .. })
    );
    pass &= ok;
    notes.push(format!("p=n {}", if ok { "rejected" } else { "ACCEPTED" }));

    let ok = matches!(
        DiscreteMeasure::new(box_dirs(2), vec![2.0, 1.0, 1.0, 1.0], 1.0),
        Err(AdmissionError::ClosureViolated { .. })
    );
    pass &= ok;
    notes.push(format!("open p=1 {}", if ok { "rejected" } else { "ACCEPTED" }));

    let mut disagreements = 0;
    let mut inside = 0;
    for i in 0..1000u64 {
        let mut r = rng(50_000 + i);
        let dim = 2 + (i % 2) as usize;
        let n = r.random_range(dim + 1..=10);
        // Half the sets are squeezed towards a random pole so both answers occur.
        let pole = random_unit(&mut r, dim);
        let squeeze = if i % 4 < 2 { r.random_range(0.0..1.5) } else { 0.0 };
        let raw: Vec<Vector<f64>> = (0..n)
            .map(|_| (random_unit(&mut r, dim) + pole * squeeze).normalized().unwrap())
            .collect();
        let Ok(dirs) = DirectionSet::new(dim, raw) else { continue };
        let oracle = in_closed_hemisphere_oracle(dim, dirs.as_slice());
        inside += oracle as usize;
        if check_hemisphere(&dirs).passed() == oracle {
            disagreements += 1;
        }
    }
    pass &= disagreements == 0;
    notes.push(format!("{disagreements} disagreements with the enumeration oracle on 1000 sets ({inside} in a hemisphere)"));
    outcome(pass, notes.join("; "))
}

fn criterion_homogeneity() -> Outcome {
    let mut worst_xi = 0.0f64;
    let mut worst_sp = 0.0f64;
    for i in 0..40u64 {
        let mut r = rng(90_000 + i);
        let dim = 2 + (i % 2) as usize;
        let (_, mesh) = random_polytope(&mut r, dim, 10);
        for p in [0.3, 0.5, 0.9, 1.5, 3.5] {
            let base = sp_measure(&mesh, p).unwrap();
            let measure = DiscreteMeasure::new(mesh.directions().clone(), base.clone(), p).unwrap();
            let xi = (p < 1.0).then(|| {
                let prob = InnerProblem::new(&measure, mesh.support()).unwrap();
                solve_xi(&prob, 1e-13).unwrap().xi
            });
            for lambda in [0.5, 2.0] {
                let scaled = mesh.scaled(lambda);
                let sp = sp_measure(&scaled, p).unwrap();
                let factor = lambda.powf(dim as f64 - p);
                for (a, b) in sp.iter().zip(&base) {
                    worst_sp = worst_sp.max(rel(*a, factor * b));
                }
                if let Some(xi) = xi {
                    let prob = InnerProblem::new(&measure, scaled.support()).unwrap();
                    let xi_scaled = solve_xi(&prob, 1e-13).unwrap().xi;
                    worst_xi = worst_xi.max((xi_scaled - xi * lambda).norm() / (lambda * mesh.diameter()));
                }
            }
        }
    }
    outcome(
        worst_xi <= 1e-8 && worst_sp <= 1e-8,
        format!("40 polytopes x 5 exponents: xi rel err {worst_xi:.1e}; S_p rel err {worst_sp:.1e}"),
    )
}

fn main() -> ExitCode {
    let mut exits = Exits::new();
    let results = [
        ("1 closed-form symmetric solves", criterion_closed_forms(&mut exits)),
        ("2 round-trip reconstruction", criterion_round_trip(&mut exits)),
        ("3 inner-solver oracle", criterion_inner_oracle()),
        ("4 geometry identities", criterion_geometry()),
        ("5 structural invariants", criterion_structure(&exits)),
        ("6 admission behavior", criterion_admission()),
        ("7 homogeneity laws", criterion_homogeneity()),
    ];
    let mut all = true;
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        all &= o.pass;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
