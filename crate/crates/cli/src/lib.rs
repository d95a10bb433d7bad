//! Driver behind the `fibring` binary: reads presentation, resolution and
//! certificate files, runs the core library, and assembles JSON reports.
//!
//! Exit codes: 0 fibred (or a successful auxiliary command), 1 not fibred
//! (or a failed verification), 2 inconclusive, larger values for errors
//! (see [`CliError::code`]).

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use fibring::chain::{load_resolution, presentation_complex, ChainComplex};
use fibring::coefficients::CoefficientRing;
use fibring::fibring::{
  certificate_failures, extract_primes, load_certificate, sikorav_verdict, sphere_characters,
  CertificateJson, FibringError, PrimeReport, SearchBudget, Verdict, VerdictKind,
};
use fibring::groupring::{Group, GroupRing};
use fibring::oracle::{brown_sigma, BrownTrace, SigmaMembership};
use fibring::presentation::{parse_character, parse_presentation, Budget, Character, Presentation};

pub const TOOL: &str = "fibring";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
  #[error("usage: {0}")]
  Usage(String),
  #[error("{path}: {msg}")]
  Io { path: PathBuf, msg: String },
  #[error("invalid input: {0}")]
  Input(String),
  #[error("computation failed: {0}")]
  Computation(String),
  #[error("assumption missing: {0}")]
  AssumptionMissing(String),
}

impl CliError {
  /// Process exit code; always greater than 2.
  pub fn code(&self) -> i32 {
    match self {
      CliError::Usage(_) => 3,
      CliError::Io { .. } => 4,
      CliError::Input(_) => 5,
      CliError::Computation(_) => 6,
      CliError::AssumptionMissing(_) => 7,
    }
  }

  /// Short machine-readable name.
  pub fn kind(&self) -> &'static str {
    match self {
      CliError::Usage(_) => "usage",
      CliError::Io { .. } => "io",
      CliError::Input(_) => "invalid_input",
      CliError::Computation(_) => "computation",
      CliError::AssumptionMissing(_) => "assumption_missing",
    }
  }
}

impl From<FibringError> for CliError {
  fn from(e: FibringError) -> Self {
    match e {
      FibringError::Degree { .. } => CliError::Usage(e.to_string()),
      FibringError::Rewriting(_) | FibringError::Novikov(_) => CliError::Computation(e.to_string()),
      _ => CliError::Input(e.to_string()),
    }
  }
}

fn read(path: &Path) -> Result<String, CliError> {
  fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), msg: e.to_string() })
}

fn sha256(text: &str) -> String {
  format!("{:x}", Sha256::digest(text.as_bytes()))
}

/// Accepts `Q`, `Z`, `Fp:p`, `Zloc:p,q` and the shorthands `F2`, `F3`, ...
pub fn parse_field(s: &str) -> Result<CoefficientRing, CliError> {
  let bad = |e: &dyn std::fmt::Display| CliError::Input(format!("field '{s}': {e}"));
  if let Some(p) = s.strip_prefix('F').filter(|r| !r.is_empty() && r.chars().all(|c| c.is_ascii_digit())) {
    let p: u64 = p.parse().map_err(|e| bad(&e))?;
    return CoefficientRing::prime_field(p).map_err(|e| bad(&e));
  }
  s.parse().map_err(|e| bad(&e))
}

/// User-asserted hypotheses. Never computed, only passed through to the
/// statements they unlock.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Assumptions {
  pub duality_dimension: Option<u32>,
  pub h2_vanishes: bool,
}

impl Assumptions {
  pub fn is_empty(&self) -> bool {
    self.duality_dimension.is_none() && !self.h2_vanishes
  }

  pub fn validate(&self) -> Result<(), CliError> {
    match self.duality_dimension {
      Some(d) if d < 3 => {
        Err(CliError::Usage(format!("--assume-duality-dim needs a dimension of at least 3, got {d}")))
      }
      _ => Ok(()),
    }
  }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssumptionReport {
  pub status: &'static str,
  #[serde(flatten)]
  pub assumptions: Assumptions,
  pub statements: Vec<String>,
}

/// Consequences for the ends of the kernel. Empty without assumptions;
/// requires a verdict of type at least `FP_1` otherwise.
pub fn ends_report(verdict: &Verdict, assumptions: &Assumptions) -> Result<Vec<String>, CliError> {
  if assumptions.is_empty() {
    return Ok(Vec::new());
  }
  assumptions.validate()?;
  if !matches!(verdict.verdict, VerdictKind::FibredFPn { degree } if degree >= 1) {
    return Err(CliError::AssumptionMissing(
      "end statements need a kernel of type FP_1, but the verdict is not fibred".into(),
    ));
  }
  let field = verdict.ring.to_string();
  let mut out = Vec::new();
  if assumptions.h2_vanishes {
    out.push(format!(
      "Under the asserted assumption H^2(G; {field}G) = 0 (assumed, not verified), the kernel of the character is \
       finitely generated and has at most one end: H^1(K; {field}K) is isomorphic to H^2(G; {field}G) = 0."
    ));
  }
  if let Some(d) = assumptions.duality_dimension {
    out.push(format!(
      "Under the asserted assumption that G is a duality group of dimension {d} >= 3 (assumed, not verified), \
       H^2(G; {field}G) = 0 and the kernel of the character has exactly one end."
    ));
  }
  Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inputs {
  pub presentation: String,
  pub presentation_sha256: String,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub resolution: Option<String>,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub resolution_sha256: Option<String>,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub character: Option<String>,
  pub field: String,
  pub degree: usize,
}

/// Prime data for one certified direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeRecord {
  pub character: Character,
  #[serde(flatten)]
  pub report: PrimeReport,
}

/// One sampled character in a sphere run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Point {
  pub values: Vec<i64>,
  pub verdict: &'static str,
  pub plus_certified: bool,
  pub minus_certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
  pub total_ms: f64,
}

/// Everything a run produced. Deterministic apart from `timings`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
  pub tool: &'static str,
  pub version: &'static str,
  pub command: &'static str,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub group: Option<String>,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub inputs: Option<Inputs>,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub budget: Option<SearchBudget>,
  #[serde(skip_serializing_if = "Vec::is_empty")]
  pub verdicts: Vec<Verdict>,
  #[serde(skip_serializing_if = "Vec::is_empty")]
  pub certificates: Vec<CertificateJson>,
  #[serde(skip_serializing_if = "Vec::is_empty")]
  pub primes: Vec<PrimeRecord>,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub assumptions: Option<AssumptionReport>,
  #[serde(skip_serializing_if = "Vec::is_empty")]
  pub points: Vec<Point>,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub verification: Option<VerificationRecord>,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub oracle: Option<OracleRecord>,
  pub exit_code: i32,
  pub summary: String,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub timings: Option<Timings>,
}

impl Report {
  fn new(command: &'static str) -> Report {
    Report {
      tool: TOOL,
      version: VERSION,
      command,
      group: None,
      inputs: None,
      budget: None,
      verdicts: Vec::new(),
      certificates: Vec::new(),
      primes: Vec::new(),
      assumptions: None,
      points: Vec::new(),
      verification: None,
      oracle: None,
      exit_code: 0,
      summary: String::new(),
      timings: None,
    }
  }

  pub fn to_json(&self) -> String {
    serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
  }

  /// The JSON without timing fields, byte-identical across repeated runs.
  pub fn deterministic_json(&self) -> String {
    Report { timings: None, ..self.clone() }.to_json()
  }

  /// Sphere points as CSV: one column per generator, then the verdict.
  pub fn points_csv(&self, generators: &[String]) -> String {
    let mut out = generators.join(",") + ",verdict,plus_certified,minus_certified\n";
    for p in &self.points {
      let vals: Vec<String> = p.values.iter().map(i64::to_string).collect();
      out += &format!("{},{},{},{}\n", vals.join(","), p.verdict, p.plus_certified, p.minus_certified);
    }
    out
  }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationRecord {
  pub verified: bool,
  pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleRecord {
  pub character: Character,
  pub membership: SigmaMembership,
  pub trace: BrownTrace,
}

/// Inputs shared by `check` and `sphere`.
#[derive(Debug, Clone)]
pub struct Problem {
  pub presentation: PathBuf,
  pub resolution: Option<PathBuf>,
  pub field: String,
  pub degree: usize,
  pub budget: SearchBudget,
}

struct Loaded {
  complex: ChainComplex,
  inputs: Inputs,
}

impl Loaded {
  fn presentation(&self) -> &Presentation {
    self.complex.ctx().group().presentation()
  }
}

fn load(problem: &Problem) -> Result<Loaded, CliError> {
  let text = read(&problem.presentation)?;
  let p = parse_presentation(&text)
    .map_err(|e| CliError::Input(format!("{}: {e}", problem.presentation.display())))?;
  let ring = parse_field(&problem.field)?;
  let group = Group::new(p, Budget::default()).map_err(|e| CliError::Computation(e.to_string()))?;
  let ctx = GroupRing::new(Arc::new(group), ring);
  let (complex, res_text) = match &problem.resolution {
    Some(path) => {
      let t = read(path)?;
      let c = load_resolution(&ctx, &t).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
      (c, Some(t))
    }
    None => {
      if problem.degree > 1 {
        return Err(CliError::Usage("degrees above 1 need a resolution (--resolution)".into()));
      }
      (presentation_complex(&ctx), None)
    }
  };
  if problem.degree > complex.top() {
    return Err(CliError::Usage(format!(
      "degree {} exceeds the top degree {} of the complex",
      problem.degree,
      complex.top()
    )));
  }
  let inputs = Inputs {
    presentation: problem.presentation.display().to_string(),
    presentation_sha256: sha256(&text),
    resolution: problem.resolution.as_ref().map(|p| p.display().to_string()),
    resolution_sha256: res_text.as_deref().map(sha256),
    character: None,
    field: ctx.ring().to_string(),
    degree: problem.degree,
  };
  Ok(Loaded { complex, inputs })
}

pub fn verdict_exit_code(v: &Verdict) -> i32 {
  match v.verdict {
    VerdictKind::FibredFPn { .. } => 0,
    VerdictKind::NotFibred => 1,
    VerdictKind::Inconclusive => 2,
  }
}

fn verdict_word(v: &Verdict) -> &'static str {
  match v.verdict {
    VerdictKind::FibredFPn { .. } => "fibred",
    VerdictKind::NotFibred => "not_fibred",
    VerdictKind::Inconclusive => "inconclusive",
  }
}

fn describe(p: &Presentation, v: &Verdict) -> String {
  let head = match v.verdict {
    VerdictKind::FibredFPn { degree } => format!("FibredFP{degree}"),
    VerdictKind::NotFibred => "NotFibred".into(),
    VerdictKind::Inconclusive => "Inconclusive".into(),
  };
  let mark = |b: bool| if b { "certified" } else { "not certified" };
  let mut s = format!(
    "{} [{}] over {}: {head} (+phi {}, -phi {})",
    p.name,
    v.character.format(p),
    v.ring,
    mark(v.plus.certified),
    mark(v.minus.certified)
  );
  if let Some(o) = &v.oracle {
    let m = o.membership;
    s += &format!(
      "; {}: [phi] {} Sigma, [-phi] {} Sigma",
      o.source,
      if m.in_sigma_plus { "in" } else { "not in" },
      if m.in_sigma_minus { "in" } else { "not in" }
    );
  }
  s
}

/// `check`: verdict for one character, with optional prime extraction and
/// assumption-driven statements.
pub fn run_check(
  problem: &Problem,
  character: &str,
  assumptions: &Assumptions,
  primes: bool,
) -> Result<Report, CliError> {
  let start = Instant::now();
  assumptions.validate()?;
  let loaded = load(problem)?;
  let phi = parse_character(character, loaded.presentation()).map_err(|e| CliError::Input(e.to_string()))?;
  let verdict = sikorav_verdict(&loaded.complex, &phi, problem.degree, &problem.budget)?;

  let mut report = Report::new("check");
  report.group = Some(loaded.presentation().name.clone());
  report.inputs =
    Some(Inputs { character: Some(phi.format(loaded.presentation())), ..loaded.inputs.clone() });
  report.budget = Some(problem.budget);
  for d in [&verdict.plus, &verdict.minus] {
    if let Some(cert) = &d.certificate {
      report.certificates.push(CertificateJson::new(&loaded.complex, cert, true));
      if primes && *cert.ring() == CoefficientRing::Rationals {
        report
          .primes
          .push(PrimeRecord { character: cert.phi.clone(), report: extract_primes(&loaded.complex, cert)? });
      }
    }
  }
  if !assumptions.is_empty() {
    let statements = ends_report(&verdict, assumptions)?;
    report.assumptions = Some(AssumptionReport {
      status: "assumed, not verified",
      assumptions: assumptions.clone(),
      statements,
    });
  }
  report.exit_code = verdict_exit_code(&verdict);
  report.summary = describe(loaded.presentation(), &verdict);
  report.verdicts.push(verdict);
  report.timings = Some(Timings { total_ms: start.elapsed().as_secs_f64() * 1e3 });
  Ok(report)
}

/// `sphere`: verdicts for all primitive characters in a grid, computed in
/// parallel and sorted by character.
pub fn run_sphere(problem: &Problem, grid: i64) -> Result<Report, CliError> {
  let start = Instant::now();
  if grid < 1 {
    return Err(CliError::Usage("--grid must be at least 1".into()));
  }
  let loaded = load(problem)?;
  let chars = sphere_characters(loaded.presentation(), grid)?;
  let mut verdicts = chars
    .par_iter()
    .map(|phi| sikorav_verdict(&loaded.complex, phi, problem.degree, &problem.budget))
    .collect::<Result<Vec<_>, _>>()?;
  verdicts.sort_by(|a, b| a.character.values().cmp(b.character.values()));

  let mut report = Report::new("sphere");
  report.group = Some(loaded.presentation().name.clone());
  report.inputs = Some(loaded.inputs.clone());
  report.budget = Some(problem.budget);
  report.points = verdicts
    .iter()
    .map(|v| Point {
      values: v.character.values().to_vec(),
      verdict: verdict_word(v),
      plus_certified: v.plus.certified,
      minus_certified: v.minus.certified,
    })
    .collect();
  let fibred = verdicts.iter().filter(|v| v.is_fibred()).count();
  report.summary = format!(
    "{}: {} character classes sampled in grid {grid}, {fibred} fibred\n{}",
    loaded.presentation().name,
    verdicts.len(),
    verdicts.iter().map(|v| describe(loaded.presentation(), v)).collect::<Vec<_>>().join("\n")
  );
  report.verdicts = verdicts;
  report.timings = Some(Timings { total_ms: start.elapsed().as_secs_f64() * 1e3 });
  Ok(report)
}

/// A certificate file, or every certificate inside a `check` report.
fn read_certificates(path: &Path) -> Result<Vec<CertificateJson>, CliError> {
  let text = read(path)?;
  let bad = |e: serde_json::Error| CliError::Input(format!("{}: {e}", path.display()));
  let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
  let certs = match value.get("certificates") {
    Some(list) => serde_json::from_value::<Vec<CertificateJson>>(list.clone()).map_err(bad)?,
    None => vec![serde_json::from_value(value).map_err(bad)?],
  };
  if certs.is_empty() {
    return Err(CliError::Input(format!("{}: no certificates", path.display())));
  }
  Ok(certs)
}

/// `verify`: re-checks certificates from scratch.
pub fn run_verify(path: &Path) -> Result<Report, CliError> {
  let start = Instant::now();
  let mut report = Report::new("verify");
  let mut failures = Vec::new();
  let mut lines = Vec::new();
  for json in read_certificates(path)? {
    let (c, cert) = load_certificate(&json)?;
    let p = c.ctx().group().presentation();
    let found = certificate_failures(&c, &cert)?;
    let label = format!("certificate for {} [{}] over {}", json.group, cert.phi.format(p), cert.ring());
    lines.push(if found.is_empty() {
      format!("{label} verifies")
    } else {
      format!("{label} fails: {}", found.join("; "))
    });
    failures.extend(found.into_iter().map(|f| format!("{label}: {f}")));
    report.group = Some(json.group.clone());
  }
  report.exit_code = if failures.is_empty() { 0 } else { 1 };
  report.summary = lines.join("\n");
  report.verification = Some(VerificationRecord { verified: failures.is_empty(), failures });
  report.timings = Some(Timings { total_ms: start.elapsed().as_secs_f64() * 1e3 });
  Ok(report)
}

/// `primes`: prime sets of rational certificates plus mod-p checks.
pub fn run_primes(path: &Path) -> Result<Report, CliError> {
  let start = Instant::now();
  let mut report = Report::new("primes");
  let mut lines = Vec::new();
  let mut all = true;
  for json in read_certificates(path)? {
    let (c, cert) = load_certificate(&json)?;
    let pr = extract_primes(&c, &cert)?;
    all &= pr.localized_verified && pr.reductions.iter().all(|r| r.verified);
    let checks: Vec<String> = pr
      .reductions
      .iter()
      .map(|r| format!("F_{} {}", r.prime, if r.verified { "ok" } else { "FAILED" }))
      .collect();
    lines.push(format!(
      "{} [{}]: primes {:?}; over {} {}; {}",
      json.group,
      cert.phi.format(c.ctx().group().presentation()),
      pr.primes.primes(),
      pr.localized_ring,
      if pr.localized_verified { "ok" } else { "FAILED" },
      checks.join(", ")
    ));
    report.group = Some(json.group.clone());
    report.primes.push(PrimeRecord { character: cert.phi.clone(), report: pr });
  }
  report.exit_code = if all { 0 } else { 1 };
  report.summary = lines.join("\n");
  report.timings = Some(Timings { total_ms: start.elapsed().as_secs_f64() * 1e3 });
  Ok(report)
}

/// `oracle brown`: the relator walk for a one-relator presentation.
pub fn run_oracle_brown(presentation: &Path, character: &str) -> Result<Report, CliError> {
  let text = read(presentation)?;
  let p =
    parse_presentation(&text).map_err(|e| CliError::Input(format!("{}: {e}", presentation.display())))?;
  let phi = parse_character(character, &p).map_err(|e| CliError::Input(e.to_string()))?;
  let (membership, trace) = brown_sigma(&p, &phi).map_err(|e| CliError::Input(e.to_string()))?;
  let mut report = Report::new("oracle brown");
  report.group = Some(p.name.clone());
  report.summary = format!(
    "{} [{}]: [phi] {} Sigma, [-phi] {} Sigma (walk {:?})",
    p.name,
    phi.format(&p),
    if membership.in_sigma_plus { "in" } else { "not in" },
    if membership.in_sigma_minus { "in" } else { "not in" },
    trace.heights
  );
  report.oracle = Some(OracleRecord { character: phi, membership, trace });
  Ok(report)
}
