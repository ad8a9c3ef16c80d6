//! `lpmink`: solve, check and generate discrete L_p Minkowski problems.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lp_minkowski::io::{
    export_obj, forward, gen_random_instance, read_report, write_report, ForwardInput, IoError, ProblemFile,
    RunReport,
};
use lp_minkowski::{solve, SolveError};

const EXIT_ADMISSION: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "lpmink", version, about = "Discrete L_p Minkowski problem solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and write a run report.
    Solve(SolveArgs),
    /// Compute the L_p surface area measure of a polytope.
    Forward(ForwardArgs),
    /// Run the admission checks on a problem file.
    Check(CheckArgs),
    /// Generate a random admissible problem file.
    Gen(GenArgs),
    /// Export the solution of a run report as an OBJ mesh (3D only).
    Export(ExportArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Problem file; repeat with --batch to solve several.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Report path (a directory with --batch). Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the exponent from the file.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Record the per-iteration residual and print progress to stderr.
    #[arg(long)]
    trace: bool,
    /// Solve all inputs concurrently, one report per input.
    #[arg(long)]
    batch: bool,
}

#[derive(Args)]
struct ForwardArgs {
    /// Support-number file (`halfspaces`) or vertex list (`vertices`).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    dim: usize,
    #[arg(long = "n-dirs")]
    n_dirs: usize,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Run report.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let code = match e {
            IoError::Admission(_) | IoError::Geometry(_) | IoError::Measure(_) | IoError::Infeasible { .. } => {
                EXIT_ADMISSION
            }
            IoError::Io { .. } | IoError::Parse(_) | IoError::Invalid(_) => EXIT_IO,
        };
        Failure { code, message: e.to_string() }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_problem(path: &Path, p: Option<f64>) -> Result<ProblemFile, Failure> {
    let mut file = ProblemFile::read(path)?;
    if let Some(p) = p {
        file.p = p;
    }
    Ok(file)
}

/// Solves one problem; `Ok(true)` when the residual meets the tolerance.
fn solve_one(path: &Path, args: &SolveArgs, out: Option<&Path>) -> Result<bool, Failure> {
    let file = load_problem(path, args.p)?;
    let measure = file.to_measure()?;
    let mut opts = file.solver_options()?;
    if let Some(tol) = args.tol {
        opts.tol = tol;
    }
    if let Some(n) = args.max_iters {
        opts.max_iterations = n;
    }
    opts.trace |= args.trace;

    let start = Instant::now();
    let report = match solve(&measure, &opts) {
        Ok(report) => report,
        Err(SolveError::MaxIterations { report } | SolveError::Stalled { report }) => *report,
        Err(e) => return Err(Failure { code: EXIT_CONVERGENCE, message: e.to_string() }),
    };
    let run = RunReport::new(file, opts.tol, &report, start.elapsed().as_secs_f64());
    if opts.trace {
        for (k, (f, r)) in run.objective_trace.iter().zip(&run.residual_trace).enumerate() {
            eprintln!("{k:6} objective {f:.16e} residual {r:.3e}");
        }
    }
    eprintln!(
        "{}: {} after {} iterations, residual {:.3e}",
        path.display(),
        run.termination,
        run.iterations,
        run.max_relative_residual
    );
    match out {
        Some(path) => write_report(&run, path)?,
        None => emit(&run.to_toml_string()?, None)?,
    }
    Ok(run.converged)
}

fn run_solve(args: &SolveArgs) -> Result<(), Failure> {
    if !args.batch {
        if args.input.len() != 1 {
            return Err(Failure { code: EXIT_IO, message: "several inputs need --batch".into() });
        }
        return match solve_one(&args.input[0], args, args.out.as_deref())? {
            true => Ok(()),
            false => Err(Failure { code: EXIT_CONVERGENCE, message: "residual above tolerance".into() }),
        };
    }

    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| Failure { code: EXIT_IO, message: format!("{}: {e}", dir.display()) })?;
    let results: Vec<Result<bool, Failure>> = std::thread::scope(|scope| {
        let handles: Vec<_> = args
            .input
            .iter()
            .map(|input| {
                let stem = input.file_stem().map_or("problem".into(), |s| s.to_string_lossy().into_owned());
                let out = dir.join(format!("{stem}.report.toml"));
                scope.spawn(move || solve_one(input, args, Some(&out)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });
    // The most severe failure decides the exit code.
    let mut worst: Option<Failure> = None;
    for (input, result) in args.input.iter().zip(results) {
        let failure = match result {
            Ok(true) => continue,
            Ok(false) => Failure { code: EXIT_CONVERGENCE, message: "residual above tolerance".into() },
            Err(f) => f,
        };
        eprintln!("{}: {}", input.display(), failure.message);
        if worst.as_ref().is_none_or(|w| failure.code > w.code) {
            worst = Some(failure);
        }
    }
    worst.map_or(Ok(()), Err)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve(args) => run_solve(&args),
        Command::Forward(args) => {
            let input = ForwardInput::read(&args.input)?;
            let report = forward(&input, args.p)?;
            emit(&report.to_toml_string()?, args.out.as_deref())
        }
        Command::Check(args) => {
            let file = load_problem(&args.input, args.p)?;
            let measure = file.to_measure()?;
            file.solver_options()?;
            println!("admissible: dim {}, {} directions, p = {}", measure.dim(), measure.len(), measure.p());
            Ok(())
        }
        Command::Gen(args) => {
            let file = gen_random_instance(args.seed, args.dim, args.n_dirs, args.p)?;
            emit(&file.to_toml_string()?, args.out.as_deref())
        }
        Command::Export(args) => {
            let report = read_report(&args.input)?;
            export_obj(&report.mesh()?, &args.out)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
