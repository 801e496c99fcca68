use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use pstep::io::{
    self, ErrorDocument, FunctionDocument, OperatorDocument, OracleCaseDocument,
    OracleReportDocument, RepresentationDocument, SampledKernelDocument, SpectrumDocument,
    TupleDocument,
};
use pstep::oracle::{oracle_invertibility_check, oracle_spectrum_check, MATCH_TOLERANCE};
use pstep::random::random_operator;
use pstep::representation::{operator_exp, operator_invert, operator_solve, sigma};
use pstep::spectral::{det_tuple, spectrum, trace_tuple};
use pstep::{Error, StepFunction, StepOperator};

#[derive(Parser)]
#[command(
    name = "pstep",
    version,
    about = "Integral operators with p-step kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Input document (compose takes two).
    #[arg(long)]
    input: Vec<PathBuf>,
    /// Right-hand side or argument function document.
    #[arg(long)]
    rhs: Option<PathBuf>,
    /// Oracle refinement factor.
    #[arg(long, default_value_t = 1)]
    q: usize,
    /// Write the output document here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Relative eigenvalue matching tolerance.
    #[arg(long, default_value_t = MATCH_TOLERANCE)]
    tolerance: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Block representation of an operator.
    Represent(Common),
    /// Inverse operator.
    Invert(Common),
    /// Solve A u = f for the function given by --rhs.
    Solve(Common),
    /// Spectrum with block provenance.
    Spectrum(Common),
    /// Trace tuple.
    Trace(Common),
    /// Determinant tuple.
    Det(Common),
    /// Apply the operator to the function given by --rhs.
    Apply(Common),
    /// Composition of two operators, first input on the left.
    Compose(Common),
    /// Operator exponential.
    Exp(Common),
    /// Compare block spectra and invertibility against the dense oracle.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        /// Check this many seeded random operators instead of --input.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        n_dims: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
    },
    /// Project a sampled kernel onto p-step coefficients.
    Project {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: usize,
    },
}

enum Failure {
    Error(Error),
    CheckFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn read_doc<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T, Error> {
    io::parse(&read_text(path)?).map_err(|e| match e {
        Error::Malformed(m) => Error::Malformed(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn operator_at(c: &Common, k: usize) -> Result<StepOperator, Error> {
    let path = c
        .input
        .get(k)
        .ok_or_else(|| Error::Malformed(format!("expected {} --input document(s)", k + 1)))?;
    read_doc::<OperatorDocument>(path)?.to_operator()
}

fn single_operator(c: &Common) -> Result<StepOperator, Error> {
    if c.input.len() != 1 {
        return Err(Error::Malformed(format!(
            "expected exactly one --input, got {}",
            c.input.len()
        )));
    }
    operator_at(c, 0)
}

fn rhs(c: &Common) -> Result<StepFunction, Error> {
    let path = c
        .rhs
        .as_ref()
        .ok_or_else(|| Error::Malformed("missing --rhs".into()))?;
    read_doc::<FunctionDocument>(path)?.to_function()
}

fn emit<T: Serialize>(c: &Common, doc: &T) -> Result<(), Error> {
    let text = io::render(doc);
    match &c.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Structure(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Represent(c) => {
            let r = sigma(&single_operator(&c)?);
            emit(&c, &RepresentationDocument::from_representation(&r))?;
        }
        Command::Invert(c) => {
            let inv = operator_invert(&single_operator(&c)?)?;
            emit(&c, &OperatorDocument::from_operator(&inv))?;
        }
        Command::Solve(c) => {
            let u = operator_solve(&single_operator(&c)?, &rhs(&c)?)?;
            emit(&c, &FunctionDocument::from_function(&u))?;
        }
        Command::Spectrum(c) => {
            let s = spectrum(&single_operator(&c)?)?;
            emit(&c, &SpectrumDocument::from_report(&s))?;
        }
        Command::Trace(c) => {
            let t = trace_tuple(&single_operator(&c)?);
            emit(&c, &TupleDocument::from_tuple("trace", &t))?;
        }
        Command::Det(c) => {
            let t = det_tuple(&single_operator(&c)?);
            emit(&c, &TupleDocument::from_tuple("det", &t))?;
        }
        Command::Apply(c) => {
            let u = single_operator(&c)?.apply(&rhs(&c)?)?;
            emit(&c, &FunctionDocument::from_function(&u))?;
        }
        Command::Compose(c) => {
            if c.input.len() != 2 {
                return Err(Error::Malformed(format!(
                    "compose expects two --input documents, got {}",
                    c.input.len()
                ))
                .into());
            }
            let ab = operator_at(&c, 0)?.compose(&operator_at(&c, 1)?)?;
            emit(&c, &OperatorDocument::from_operator(&ab))?;
        }
        Command::Exp(c) => {
            let e = operator_exp(&single_operator(&c)?)?;
            emit(&c, &OperatorDocument::from_operator(&e))?;
        }
        Command::OracleCheck {
            common: c,
            random,
            seed,
            n_dims,
            p,
        } => {
            let operators = match random {
                Some(count) => {
                    pstep::indexing::check_sizes(n_dims, p)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..count)
                        .map(|_| random_operator(n_dims, p, &mut rng))
                        .collect()
                }
                None => (0..c.input.len())
                    .map(|k| operator_at(&c, k))
                    .collect::<Result<Vec<_>, _>>()?,
            };
            let mut cases = Vec::with_capacity(operators.len());
            for (k, a) in operators.iter().enumerate() {
                let spectrum = oracle_spectrum_check(a, c.q, c.tolerance)?;
                let inv = oracle_invertibility_check(a)?;
                cases.push(OracleCaseDocument::new(k, &spectrum, &inv));
            }
            let all_passed = cases.iter().all(OracleCaseDocument::passed);
            emit(
                &c,
                &OracleReportDocument {
                    kind: "oracle-check".into(),
                    tolerance: c.tolerance,
                    all_passed,
                    cases,
                },
            )?;
            if !all_passed {
                return Err(Failure::CheckFailed);
            }
        }
        Command::Project { common: c, p } => {
            let path = c
                .input
                .first()
                .ok_or_else(|| Error::Malformed("missing --input".into()))?;
            let kernel = read_doc::<SampledKernelDocument>(path)?.to_kernel()?;
            emit(&c, &OperatorDocument::from_operator(&kernel.project(p)?))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::CheckFailed) => {
            eprintln!("oracle check failed");
            ExitCode::from(1)
        }
        Err(Failure::Error(e)) => {
            eprint!("{}", io::render(&ErrorDocument::from_error(&e)));
            ExitCode::from(match e {
                Error::SingularBlock { .. } => 2,
                Error::Malformed(_) => 3,
                Error::SizeGuard(_) => 4,
                _ => 1,
            })
        }
    }
}
