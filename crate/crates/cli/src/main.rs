//! `lfrac`: evaluate the Mittag-Leffler-type function, solve problem files
//! and run verification suites.

mod problem;
mod solve;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand};
use lfrac::special::ml_deriv_eval;
use lfrac::{Complex64, Error, FracOrder};

use problem::{ProblemFile, TolFlags};

#[derive(Parser, Debug)]
#[command(name = "lfrac", version, about = "L-fractional calculus toolkit")]
struct Cli {
    /// Relative tolerance for series summation [default: 1e-12]
    #[arg(long, global = true)]
    tol_rel: Option<f64>,
    /// Absolute tolerance for series summation [default: 1e-14]
    #[arg(long, global = true)]
    tol_abs: Option<f64>,
    /// Term budget for every series [default: 4096]
    #[arg(long, global = true)]
    max_terms: Option<usize>,
    /// Seed for randomized suites
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print "re im n_terms_used" for the k-th derivative of ML_alpha at s.
    #[command(allow_negative_numbers = true)]
    MlEval {
        alpha: f64,
        s_re: f64,
        s_im: f64,
        #[arg(default_value_t = 0)]
        k: usize,
    },
    /// Solve a JSON problem file and write its trajectory as CSV.
    Solve {
        problem: PathBuf,
        /// CSV destination; without it the CSV goes to stdout and the summary to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(value_parser = PossibleValuesParser::new(suites::SUITES))]
        suite: String,
    },
}

/// 3 for exhausted budgets, 4 for unsolvable symbolic systems, 2 otherwise.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotConverged { .. } | Error::NoConvergence(_) => 3,
        Error::SingularWronskian { .. } | Error::AnsatzMismatch(_) => 4,
        _ => 2,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = TolFlags { rel: cli.tol_rel, abs: cli.tol_abs, max_terms: cli.max_terms };
    match cli.command {
        Command::MlEval { alpha, s_re, s_im, k } => {
            let run = || -> lfrac::Result<String> {
                let tol = flags.resolve(None)?;
                let v = ml_deriv_eval(FracOrder::new(alpha)?, k, Complex64::new(s_re, s_im), &tol)?;
                Ok(format!("{} {} {}", v.value.re, v.value.im, v.n_terms_used))
            };
            match run() {
                Ok(line) => println!("{line}"),
                Err(e) => return fail(e),
            }
        }
        Command::Solve { problem, out } => {
            let text = match std::fs::read_to_string(&problem) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", problem.display());
                    return ExitCode::from(2);
                }
            };
            let traj = match ProblemFile::parse(&text).and_then(|p| solve::solve(&p, &flags)) {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            let csv = traj.to_csv();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, csv) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                    for line in &traj.summary {
                        println!("{line}");
                    }
                }
                None => {
                    print!("{csv}");
                    for line in &traj.summary {
                        eprintln!("{line}");
                    }
                }
            }
        }
        Command::Verify { suite } => {
            println!("suite {suite} (seed {})", cli.seed);
            let checks = match suites::run(&suite, cli.seed).expect("clap restricts suite names") {
                Ok(c) => c,
                Err(e) => {
                    println!("FAIL  suite aborted: {e}");
                    return ExitCode::from(1);
                }
            };
            for c in &checks {
                println!("{}", c.line());
            }
            let passed = checks.iter().filter(|c| c.passed()).count();
            println!("{passed}/{} checks passed", checks.len());
            if passed != checks.len() {
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::SUCCESS
}
