//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 refusal (unsupported
//! input, not unimodular, or a certification the algorithm could not
//! obtain), 3 malformed input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use crate::batch::{run_roundtrip, RoundtripCase};
use crate::error::Error;
use crate::json::{factorization_from_json, factorization_to_json, matrix_from_json, matrix_to_json};
use crate::pipeline::{cohn_matrix, factor, verify, FactorRequest, Mode};
use crate::random::{ProductSpec, GENERATOR_NAME};
use crate::series::{AlgebraConfig, TruncatedSeries, DEFAULT_DEGREE_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_REFUSED: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "elemfactor", version, about = "Factor SL_n matrices over function algebras into elementary matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Factor a matrix file and write the factorization.
    Factor {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value = "auto", value_parser = parse_mode)]
        mode: Mode,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        degree_cap: u32,
        /// Skip the det F = 1 check.
        #[arg(long)]
        promise_unimodular: bool,
    },
    /// Check a factorization against a matrix.
    Verify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        factors: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        degree_cap: u32,
    },
    /// Print the summed l1 norm of a matrix and of its distance to I.
    Norm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        degree_cap: u32,
    },
    /// Built-in fixtures.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Generate a random elementary product, factor it back and verify.
    Roundtrip {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        factors: usize,
        /// Norm of each generated coefficient; raw [-1, 1] coefficients if omitted.
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        degree: u32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value = "auto", value_parser = parse_mode)]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
        degree_cap: u32,
        /// Complex coefficients instead of real ones.
        #[arg(long)]
        complex: bool,
        /// Write the generated matrix here.
        #[arg(long)]
        matrix_output: Option<PathBuf>,
        /// Write the factorization here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum Demo {
    /// The 2x2 Cohn matrix over C[z1, z2].
    Cohn {
        /// Evaluate at the point (u, v) of the closed bidisc.
        #[arg(long, num_args = 2, value_names = ["U", "V"], allow_negative_numbers = true)]
        eval: Option<Vec<f64>>,
        /// Write the matrix as JSON.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema(_)
        | Error::Io(_)
        | Error::DegreeExceedsCap { .. }
        | Error::InvalidConfig(_)
        | Error::ConfigMismatch
        | Error::DimensionMismatch { .. }
        | Error::IndexOutOfRange { .. }
        | Error::RadiusOutOfRange(_)
        | Error::PointOutsidePolydisc(_) => EXIT_MALFORMED,
        _ => EXIT_REFUSED,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Runs the CLI with `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    match cmd {
        Command::Factor { input, tol, mode, radius, output, degree_cap, promise_unimodular } => {
            let matrix = matrix_from_json(&read(&input)?, degree_cap)?;
            let mut req = FactorRequest::new(matrix.clone(), mode, tol);
            req.radius = radius;
            req.promise_unimodular = promise_unimodular;
            let fac = factor(&req)?;
            write_file(&output, &factorization_to_json(&fac)?)?;
            let report = verify(&matrix, &fac, tol)?;
            writeln!(
                out,
                "method={} factors={} blocks={} residual={:e} tol={:e} {}",
                fac.method.as_str(),
                report.factor_count,
                report.normal_form_blocks,
                report.residual,
                tol,
                if report.passed { "PASS" } else { "FAIL" }
            )?;
            if !report.passed {
                writeln!(err, "residual {:e} exceeds tolerance {:e}", report.residual, tol)?;
            }
            Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Verify { matrix, factors, tol, degree_cap } => {
            let m = matrix_from_json(&read(&matrix)?, degree_cap)?;
            let fac = factorization_from_json(&read(&factors)?, *m.config())?;
            let report = verify(&m, &fac, tol)?;
            writeln!(
                out,
                "factors={} blocks={} residual={:e} tol={:e} {}",
                report.factor_count,
                report.normal_form_blocks,
                report.residual,
                tol,
                if report.passed { "PASS" } else { "FAIL" }
            )?;
            Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Norm { input, degree_cap } => {
            let m = matrix_from_json(&read(&input)?, degree_cap)?;
            writeln!(out, "norm={:e}", m.norm())?;
            writeln!(out, "distance_to_identity={:e}", m.distance_to_identity())?;
            writeln!(out, "total_tail={:e}", m.total_tail())?;
            Ok(EXIT_OK)
        }
        Command::Demo { which: Demo::Cohn { eval, write } } => demo_cohn(eval, write, out, err),
        Command::Roundtrip {
            n,
            d,
            factors,
            scale,
            seed,
            degree,
            tol,
            mode,
            degree_cap,
            complex,
            matrix_output,
            output,
        } => {
            if n < 2 {
                return Err(Error::Schema("roundtrip needs n >= 2".into()));
            }
            let config = AlgebraConfig::new(d, degree_cap)?;
            let case = RoundtripCase {
                seed,
                spec: ProductSpec { n, config, factors, degree, scale, complex },
                near_identity_target: None,
                mode,
                tol,
            };
            writeln!(out, "# generator: {GENERATOR_NAME} seed={seed}")?;
            writeln!(
                out,
                "# n={n} d={d} factors={factors} degree={degree} scale={} degree_cap={degree_cap}",
                scale.map_or("raw".to_string(), |s| format!("{s:e}"))
            )?;
            let outcome = run_roundtrip(&case)?;
            if let Some(path) = matrix_output {
                write_file(&path, &matrix_to_json(&outcome.matrix)?)?;
            }
            if let Some(path) = output {
                write_file(&path, &factorization_to_json(&outcome.factorization)?)?;
            }
            let r = &outcome.report;
            writeln!(out, "distance_to_identity={:e}", outcome.matrix.distance_to_identity())?;
            writeln!(
                out,
                "method={} factors={} blocks={} residual={:e} tol={:e} {}",
                outcome.method.as_str(),
                r.factor_count,
                r.normal_form_blocks,
                r.residual,
                tol,
                if r.passed { "PASS" } else { "FAIL" }
            )?;
            if !r.passed {
                writeln!(err, "residual {:e} exceeds tolerance {:e}", r.residual, tol)?;
            }
            Ok(if r.passed { EXIT_OK } else { EXIT_FAILED })
        }
    }
}

fn demo_cohn(
    eval: Option<Vec<f64>>,
    write: Option<PathBuf>,
    out: &mut dyn Write,
    _err: &mut dyn Write,
) -> Result<i32, Error> {
    let config = AlgebraConfig::vars(2)?;
    let c = cohn_matrix(config)?;
    writeln!(out, "Cohn matrix over C[z1, z2]:")?;
    write!(out, "{c}")?;
    let det = c.det()?;
    let dev = det.sub(&TruncatedSeries::one(config))?;
    writeln!(out, "det = {det}   (max |det - 1| coefficient = {:e})", dev.max_abs_coeff())?;
    if let Some(p) = eval {
        let point = [Complex64::new(p[0], 0.0), Complex64::new(p[1], 0.0)];
        for i in 0..2 {
            for j in 0..2 {
                let v = c.get(i, j).evaluate(&point)?;
                writeln!(out, "F{}{}({}, {}) = {}", i + 1, j + 1, p[0], p[1], v.mid)?;
            }
        }
        writeln!(out, "det({}, {}) = {}", p[0], p[1], det.evaluate(&point)?.mid)?;
    }
    if let Some(path) = write {
        write_file(&path, &matrix_to_json(&c)?)?;
    }
    match factor(&FactorRequest::new(c, Mode::Auto, 1e-8)) {
        Err(e @ Error::Unsupported(_)) => {
            writeln!(out, "auto factorization refused: {e}")?;
            writeln!(
                out,
                "note: this refusal is a scope limit; over C[z1, z2] the matrix is known to lie outside E_2"
            )?;
        }
        Err(e) => writeln!(out, "auto factorization failed: {e}")?,
        Ok(fac) => writeln!(out, "unexpected factorization with {} factors", fac.len())?,
    }
    Ok(EXIT_OK)
}
