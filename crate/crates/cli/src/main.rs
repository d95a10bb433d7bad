use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fibring::fibring::SearchBudget;
use fibring_cli::{
  run_check, run_oracle_brown, run_primes, run_sphere, run_verify, Assumptions, CliError, Problem, Report,
};

#[derive(Parser)]
#[command(name = "fibring", version, about = "Certify algebraic fibring of finitely presented groups")]
struct Cli {
  #[command(subcommand)]
  command: Command,
}

#[derive(Args)]
struct ProblemArgs {
  /// Presentation file
  #[arg(long)]
  presentation: PathBuf,
  /// Coefficients: Q, Z, F2, F3, ..., Fp:p or Zloc:p,q
  #[arg(long, default_value = "Q")]
  field: String,
  /// Finiteness degree n to certify (FP_n)
  #[arg(long, default_value_t = 1)]
  degree: usize,
  /// Largest truncation level tried by the search
  #[arg(long, default_value_t = 8)]
  precision_budget: i64,
  /// Free resolution file extending the presentation complex
  #[arg(long)]
  resolution: Option<PathBuf>,
  /// Write the JSON report here
  #[arg(long)]
  out: Option<PathBuf>,
}

impl ProblemArgs {
  fn problem(&self) -> Problem {
    Problem {
      presentation: self.presentation.clone(),
      resolution: self.resolution.clone(),
      field: self.field.clone(),
      degree: self.degree,
      budget: SearchBudget { max_precision: self.precision_budget, ..SearchBudget::default() },
    }
  }
}

#[derive(Subcommand)]
enum Command {
  /// Verdict for one character
  Check {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Character, e.g. a=1,b=0
    #[arg(long = "char")]
    character: String,
    /// Assert that G is a duality group of this dimension (at least 3)
    #[arg(long)]
    assume_duality_dim: Option<u32>,
    /// Assert that H^2(G; KG) vanishes
    #[arg(long)]
    assume_h2_zero: bool,
    /// Also extract denominator primes of rational certificates
    #[arg(long)]
    primes: bool,
  },
  /// Verdicts for all primitive characters in a grid
  Sphere {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 1)]
    grid: i64,
    /// Write the sampled points as CSV here
    #[arg(long)]
    points: Option<PathBuf>,
  },
  /// Prime set and mod-p re-verification of a certificate file
  Primes {
    certificate: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
  },
  /// Re-verify a certificate file
  Verify {
    certificate: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
  },
  /// Independent oracles
  Oracle {
    #[command(subcommand)]
    oracle: OracleCommand,
  },
}

#[derive(Subcommand)]
enum OracleCommand {
  /// Brown's criterion for one-relator groups; prints the walk as JSON
  Brown {
    #[arg(long)]
    presentation: PathBuf,
    #[arg(long = "char")]
    character: String,
  },
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
  std::fs::write(path, text).map_err(|e| CliError::Io { path: path.to_path_buf(), msg: e.to_string() })
}

fn finish(report: &Report, out: Option<&PathBuf>) -> Result<i32, CliError> {
  println!("{}", report.summary);
  if let Some(path) = out {
    write(path, &report.to_json())?;
  }
  Ok(report.exit_code)
}

fn run(cli: Cli) -> Result<i32, CliError> {
  match cli.command {
    Command::Check { problem, character, assume_duality_dim, assume_h2_zero, primes } => {
      let assumptions = Assumptions { duality_dimension: assume_duality_dim, h2_vanishes: assume_h2_zero };
      let report = run_check(&problem.problem(), &character, &assumptions, primes)?;
      if let Some(a) = &report.assumptions {
        for s in &a.statements {
          println!("{s}");
        }
      }
      finish(&report, problem.out.as_ref())
    }
    Command::Sphere { problem, grid, points } => {
      let report = run_sphere(&problem.problem(), grid)?;
      if let Some(path) = &points {
        let gens = fibring::presentation::parse_presentation(
          &std::fs::read_to_string(&problem.presentation).unwrap_or_default(),
        )
        .map(|p| p.generators)
        .unwrap_or_default();
        write(path, &report.points_csv(&gens))?;
      }
      finish(&report, problem.out.as_ref())
    }
    Command::Primes { certificate, out } => finish(&run_primes(&certificate)?, out.as_ref()),
    Command::Verify { certificate, out } => finish(&run_verify(&certificate)?, out.as_ref()),
    Command::Oracle { oracle: OracleCommand::Brown { presentation, character } } => {
      let report = run_oracle_brown(&presentation, &character)?;
      let record = report.oracle.as_ref().expect("oracle reports carry a record");
      println!("{}", serde_json::to_string_pretty(record).expect("oracle records serialize"));
      Ok(0)
    }
  }
}

fn main() -> ExitCode {
  let cli = match Cli::try_parse() {
    Ok(cli) => cli,
    Err(e) => {
      let _ = e.print();
      // exit code 2 means inconclusive, so usage errors take the usage code
      return ExitCode::from(if e.use_stderr() { CliError::Usage(String::new()).code() as u8 } else { 0 });
    }
  };
  match run(cli) {
    Ok(code) => ExitCode::from(code as u8),
    Err(e) => {
      eprintln!("error [{}]: {e}", e.kind());
      ExitCode::from(e.code() as u8)
    }
  }
}
