//! Command-line surface: builds relations, diagnoses splitting operators,
//! runs iterations, and executes lab experiments.
//!
//! Exit codes: 0 ok, 2 parse/malformed input, 3 invalid operator,
//! 4 dimension error, 5 precondition failure, 1 internal inconsistency.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::drcalc;
use crate::error::Error;
use crate::iterate::{self, DEFAULT_MAX_ITER, DEFAULT_STEP_TOL};
use crate::lab::{self, SweepConfig};
use crate::linrel::{LinearRelation, ResolventMatrix, DEFAULT_TOL};
use crate::numerics::Matrix;

#[derive(Parser)]
#[command(
    name = "drlab",
    version,
    about = "Douglas–Rachford calculus for linear relations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a relation from a matrix, a subspace basis, or a resolvent,
    /// and print it with diagnostics.
    Rel {
        /// Matrix JSON file: the operator x ↦ Mx.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Matrix JSON file whose columns span a subspace: its normal cone
        /// operator.
        #[arg(long = "normal-cone")]
        normal_cone: Option<PathBuf>,
        /// Matrix JSON file holding a firmly nonexpansive resolvent.
        #[arg(long)]
        resolvent: Option<PathBuf>,
    },
    /// Diagnose the Douglas–Rachford operator of a pair of relation files.
    Dr { a: PathBuf, b: PathBuf },
    /// Run the Douglas–Rachford iteration and emit the trace as CSV.
    Iterate {
        a: PathBuf,
        b: PathBuf,
        /// Start vector, comma separated (e.g. "1,1").
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = DEFAULT_STEP_TOL)]
        tol: f64,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample random symmetric pairs and record how often their operator is
    /// proximal.
    Sweep {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "commute-tol")]
        commute_tol: Option<f64>,
        #[arg(long = "lambda-escape")]
        lambda_escape: Option<f64>,
        /// Write the records here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sweep config JSON; explicit flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Perturb a commuting pair off the proximal set.
    Escape {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long = "commute-tol", default_value_t = 1e-8)]
        commute_tol: f64,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::DimensionMismatch { .. } | Error::DimensionTooSmall { .. } => 4,
            Error::NotInProximalSet { .. } | Error::PreconditionViolated { .. } => 5,
            Error::SingularMatrix { .. }
            | Error::NotSymmetric { .. }
            | Error::NotFirmlyNonexpansive { .. }
            | Error::NotMaximallyMonotone { .. } => 3,
            Error::InternalInconsistency { .. } => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses and runs a full command line; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Rel {
            matrix,
            normal_cone,
            resolvent,
        } => cmd_rel(matrix, normal_cone, resolvent),
        Command::Dr { a, b } => cmd_dr(&a, &b),
        Command::Iterate {
            a,
            b,
            x0,
            max_iter,
            tol,
            out,
        } => cmd_iterate(&a, &b, &x0, max_iter, tol, out.as_deref()),
        Command::Sweep {
            n,
            trials,
            seed,
            commute_tol,
            lambda_escape,
            out,
            config,
        } => cmd_sweep(
            n,
            trials,
            seed,
            commute_tol,
            lambda_escape,
            out.as_deref(),
            config.as_deref(),
        ),
        Command::Escape {
            a,
            b,
            lambda,
            commute_tol,
        } => cmd_escape(&a, &b, lambda, commute_tol),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("cannot read {}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<Matrix, Failure> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

/// Accepts either a bare relation JSON object or the `rel` command's output
/// (which wraps the relation under a "relation" key).
fn load_relation(path: &Path) -> Result<LinearRelation, Failure> {
    let text = read_file(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let body = value.get("relation").cloned().unwrap_or(value);
    serde_json::from_value(body).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct RelDiagnostics {
    monotone: bool,
    maximally_monotone: bool,
    symmetric: Option<bool>,
}

#[derive(Serialize)]
struct RelOutput {
    relation: LinearRelation,
    diagnostics: RelDiagnostics,
}

fn cmd_rel(
    matrix: Option<PathBuf>,
    normal_cone: Option<PathBuf>,
    resolvent: Option<PathBuf>,
) -> Result<(), Failure> {
    let given = [&matrix, &normal_cone, &resolvent]
        .iter()
        .filter(|o| o.is_some())
        .count();
    if given != 1 {
        return Err(Failure::parse(
            "exactly one of --matrix, --normal-cone, --resolvent is required",
        ));
    }
    let relation = if let Some(path) = matrix {
        let m = load_matrix(&path)?;
        if !m.is_square() {
            return Err(Failure::parse(format!(
                "{}: operator matrix must be square, got {}x{}",
                path.display(),
                m.rows(),
                m.cols()
            )));
        }
        LinearRelation::from_matrix(&m)
    } else if let Some(path) = normal_cone {
        LinearRelation::normal_cone_of_subspace(&load_matrix(&path)?)
    } else {
        let path = resolvent.expect("one flag is present");
        let j = ResolventMatrix::new(load_matrix(&path)?).map_err(Failure::from)?;
        LinearRelation::from_resolvent(&j)
    };

    let monotone = relation.is_monotone(DEFAULT_TOL);
    let maximally_monotone = relation.is_maximally_monotone(DEFAULT_TOL);
    let symmetric = if maximally_monotone {
        Some(relation.is_symmetric(DEFAULT_TOL).map_err(Failure::from)?)
    } else {
        None
    };
    let output = RelOutput {
        relation,
        diagnostics: RelDiagnostics {
            monotone,
            maximally_monotone,
            symmetric,
        },
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&output).expect("serializable")
    );
    if !maximally_monotone {
        return Err(Failure::from(Error::NotMaximallyMonotone {
            graph_dim: output.relation.graph_dim(),
            n: output.relation.n(),
            monotone,
        }));
    }
    Ok(())
}

fn cmd_dr(a_path: &Path, b_path: &Path) -> Result<(), Failure> {
    let a = load_relation(a_path)?;
    let b = load_relation(b_path)?;
    let diagnosis = drcalc::dr_operator(&a, &b).map_err(Failure::from)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&diagnosis).expect("serializable")
    );
    Ok(())
}

fn parse_vector(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Failure::parse(format!("bad vector component {p:?}: {e}")))
        })
        .collect()
}

fn cmd_iterate(
    a_path: &Path,
    b_path: &Path,
    x0: &str,
    max_iter: usize,
    tol: f64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if max_iter == 0 {
        return Err(Failure::parse("--max-iter must be at least 1"));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Failure::parse("--tol must be positive"));
    }
    let a = load_relation(a_path)?;
    let b = load_relation(b_path)?;
    let x0 = parse_vector(x0)?;
    let trace = iterate::run_dr(&a, &b, &x0, max_iter, tol).map_err(Failure::from)?;
    let z = iterate::solution_set(&a, &b, 1e-8).map_err(Failure::from)?;

    let csv = trace.to_csv();
    if let Some(path) = out {
        fs::write(path, &csv)
            .map_err(|e| Failure::parse(format!("cannot write {}: {e}", path.display())))?;
    } else {
        print!("{csv}");
    }
    let shadow = trace
        .shadow_limit
        .clone()
        .or_else(|| trace.shadows.last().cloned())
        .unwrap_or_default();
    let dist = z.distance(&shadow);
    let shadow_json = serde_json::to_string(&shadow).expect("serializable");
    if trace.converged {
        println!(
            "# summary: converged=true iterations_used={} shadow_limit={} dist_to_Z={}",
            trace.iterations_used, shadow_json, dist
        );
    } else {
        println!(
            "# summary: converged=false (NoConvergence) iterations_used={} shadow_last={} dist_to_Z={}",
            trace.iterations_used, shadow_json, dist
        );
    }
    Ok(())
}

fn cmd_sweep(
    n: Option<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
    commute_tol: Option<f64>,
    lambda_escape: Option<f64>,
    out: Option<&Path>,
    config: Option<&Path>,
) -> Result<(), Failure> {
    let mut cfg = match config {
        Some(path) => serde_json::from_str::<SweepConfig>(&read_file(path)?)
            .map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?,
        None => SweepConfig::default(),
    };
    if let Some(n) = n {
        cfg.n = n;
    }
    if let Some(trials) = trials {
        cfg.trials = trials;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(tol) = commute_tol {
        cfg.commute_tol = tol;
    }
    if let Some(l) = lambda_escape {
        cfg.lambda_escape = l;
    }
    cfg.validate()
        .map_err(|_| Failure::parse("invalid sweep configuration"))?;

    let records = lab::genericity_sweep(&cfg).map_err(Failure::from)?;
    let in_set = records.iter().filter(|r| r.in_proximal_set).count();
    let fraction = in_set as f64 / records.len() as f64;
    let summary = format!(
        "in_D fraction: {in_set}/{} = {fraction} (n={}, seed={}, commute_tol={})",
        records.len(),
        cfg.n,
        cfg.seed,
        cfg.commute_tol
    );
    let csv = lab::sweep_csv_string(&records);
    match out {
        Some(path) => {
            fs::write(path, &csv)
                .map_err(|e| Failure::parse(format!("cannot write {}: {e}", path.display())))?;
            println!("{summary}");
        }
        None => {
            print!("{csv}");
            // Keep piped CSV clean.
            let _ = writeln!(std::io::stderr(), "{summary}");
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct EscapeOutput {
    lambda_requested: f64,
    lambda_used: f64,
    retried: bool,
    commutator_norm: f64,
    dist_moved: f64,
    a_perturbed: LinearRelation,
    b_perturbed: LinearRelation,
}

fn cmd_escape(a_path: &Path, b_path: &Path, lambda: f64, commute_tol: f64) -> Result<(), Failure> {
    let a = load_relation(a_path)?;
    let b = load_relation(b_path)?;
    let outcome = lab::escape(&a, &b, lambda, commute_tol).map_err(Failure::from)?;
    let output = EscapeOutput {
        lambda_requested: outcome.report.lambda_requested,
        lambda_used: outcome.report.lambda_used,
        retried: outcome.report.retried,
        commutator_norm: outcome.report.commutator_norm,
        dist_moved: outcome.report.dist_moved,
        a_perturbed: outcome.a,
        b_perturbed: outcome.b,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&output).expect("serializable")
    );
    Ok(())
}
