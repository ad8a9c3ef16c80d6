use super::*;
use crate::kernel::intersect_halfspaces;
use crate::measure::check_hemisphere;
use crate::outer::solve;

const SQUARE: &str = r#"
dim = 2
p = 0.5

[[items]]
u = [1.0, 0.0]
alpha = 1.0

[[items]]
u = [0.0, 1.0]
alpha = 1.0

[[items]]
u = [-1.0, 0.0]
alpha = 1.0

[[items]]
u = [0.0, -1.0]
alpha = 1.0
"#;

#[test]
fn square_problem_parses() {
    let file = ProblemFile::parse(SQUARE).unwrap();
    let m = file.to_measure().unwrap();
    assert_eq!(m.len(), 4);
    assert_eq!(file.solver_options().unwrap(), SolverOptions::default());
}

#[test]
fn p_equal_to_dimension_is_rejected() {
    let file = ProblemFile::parse(&SQUARE.replace("p = 0.5", "p = 2.0")).unwrap();
    assert!(matches!(
        file.to_measure(),
        Err(IoError::Admission(AdmissionError::ExponentEqualsDimension { .. }))
    ));
}

#[test]
fn hemisphere_violation_is_rejected_with_witness() {
    let text = SQUARE.replace("[[items]]\nu = [0.0, -1.0]\nalpha = 1.0\n", "");
    let file = ProblemFile::parse(&text).unwrap();
    assert_eq!(file.items.len(), 3);
    match file.to_measure() {
        Err(IoError::Admission(AdmissionError::Hemisphere { witness })) => {
            assert!(witness[1] > 0.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn nearly_unit_directions_are_renormalized() {
    let text = SQUARE.replace("u = [1.0, 0.0]", "u = [1.0000004, 0.0]");
    let m = ProblemFile::parse(&text).unwrap().to_measure().unwrap();
    assert_eq!(m.directions()[0][0], 1.0);
    let text = SQUARE.replace("u = [1.0, 0.0]", "u = [1.001, 0.0]");
    assert!(ProblemFile::parse(&text).unwrap().to_measure().is_err());
}

#[test]
fn options_block_is_read() {
    let text = format!("{SQUARE}\n[options]\ntol = 1e-6\nmethod = \"gradient\"\nregime = \"p-ge-one\"\n");
    let opts = ProblemFile::parse(&text).unwrap().solver_options().unwrap();
    assert_eq!(opts.tol, 1e-6);
    assert_eq!(opts.method, Method::Gradient);
    assert_eq!(opts.regime, Some(Regime::PGeOne));
    let bad = format!("{SQUARE}\n[options]\nmethod = \"newton\"\n");
    assert!(matches!(ProblemFile::parse(&bad).unwrap().solver_options(), Err(IoError::Parse(_))));
}

#[test]
fn malformed_file_is_a_parse_error() {
    assert!(matches!(ProblemFile::parse("dim = 2\np = "), Err(IoError::Parse(_))));
    assert!(matches!(ProblemFile::parse("dim = 2\np = 0.5\nitems = []\nbogus = 1"), Err(IoError::Parse(_))));
}

fn square_report() -> RunReport {
    let file = ProblemFile::parse(SQUARE).unwrap();
    let report = solve(&file.to_measure().unwrap(), &SolverOptions::default()).unwrap();
    RunReport::new(file, 1e-8, &report, 0.125)
}

#[test]
fn report_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.toml");
    let mut report = square_report();
    // Awkward values that a lossy encoder would perturb.
    report.objective_trace.push(0.1 + 0.2);
    report.objective_trace.push(f64::MIN_POSITIVE);
    report.objective_trace.push(-0.0);
    write_report(&report, &path).unwrap();
    let back = read_report(&path).unwrap();
    assert_eq!(back, report);
    for (a, b) in back.objective_trace.iter().zip(&report.objective_trace) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn nan_is_refused_at_write() {
    let dir = tempfile::tempdir().unwrap();
    let mut report = square_report();
    report.directions[2].residual = f64::NAN;
    let err = write_report(&report, &dir.path().join("r.toml")).unwrap_err();
    assert!(matches!(err, IoError::Invalid(ref m) if m.contains("directions[2].residual")), "{err}");
}

#[test]
fn obj_of_cube_and_dimension_check() {
    let cube = ProblemFile {
        dim: 3,
        p: 0.5,
        items: (0..6)
            .map(|k| {
                let mut u = vec![0.0; 3];
                u[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
                Item { u, alpha: 1.0 }
            })
            .collect(),
        options: None,
    };
    let dirs = cube.directions().unwrap();
    let mesh = intersect_halfspaces(&dirs, &crate::kernel::SupportVector::constant(6, 1.0)).unwrap();
    let text = write_obj(&mesh).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 8);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 12);

    let square = ProblemFile::parse(SQUARE).unwrap().directions().unwrap();
    let flat = intersect_halfspaces(&square, &crate::kernel::SupportVector::constant(4, 1.0)).unwrap();
    assert!(matches!(write_obj(&flat), Err(IoError::Geometry(GeometryError::DimUnsupported(2)))));
}

#[test]
fn generator_is_deterministic_and_admissible() {
    let a = gen_random_instance(1, 2, 6, 0.5).unwrap();
    let b = gen_random_instance(1, 2, 6, 0.5).unwrap();
    assert_eq!(a.to_toml_string().unwrap(), b.to_toml_string().unwrap());
    assert!(a.to_measure().is_ok());
    assert_ne!(a, gen_random_instance(2, 2, 6, 0.5).unwrap());
    for item in &a.items {
        assert!((0.1..=10.0).contains(&item.alpha));
    }
}

#[test]
fn generator_closes_weights_for_p_one() {
    for seed in 0..20 {
        let file = gen_random_instance(seed, 3, 8, 1.0).unwrap();
        let m = file.to_measure().unwrap();
        assert!(m.closure_defect() < 1e-12, "{}", m.closure_defect());
        assert!(check_hemisphere(m.directions()).passed());
    }
}

#[test]
fn forward_from_halfspaces_and_vertices_agree() {
    let hs = ForwardInput::parse_str(
        "dim = 2\nhalfspaces = [{u = [1.0, 0.0], h = 1.0}, {u = [0.0, 1.0], h = 1.0}, \
         {u = [-1.0, 0.0], h = 1.0}, {u = [0.0, -1.0], h = 1.0}]",
    );
    let vs = ForwardInput::parse_str("dim = 2\nvertices = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [0.0, 0.5]]");
    let a = forward(&hs, 0.5).unwrap();
    let b = forward(&vs, 0.5).unwrap();
    assert_eq!(a.directions.len(), 4);
    assert_eq!(b.directions.len(), 4);
    for r in a.directions.iter().chain(&b.directions) {
        assert!((r.sp - 2.0).abs() < 1e-14);
    }
    assert!(forward(&ForwardInput { dim: 2, halfspaces: vec![], vertices: vec![] }, 0.5).is_err());
}

impl ForwardInput {
    fn parse_str(text: &str) -> Self {
        from_toml(text).unwrap()
    }
}
