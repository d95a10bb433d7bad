use super::{BudgetUsed, Certificate, FibringError, InconclusiveReport, SearchBudget};
use crate::chain::{first_failure, ChainComplex};
use crate::groupring::GrMatrix;
use crate::novikov::{solve_left, NovikovMatrix, NovikovRing};
use crate::presentation::Character;

#[derive(Debug, Clone)]
pub enum SearchOutcome {
  Certified(Box<Certificate>),
  Inconclusive(InconclusiveReport),
}

impl SearchOutcome {
  pub fn certificate(&self) -> Option<&Certificate> {
    match self {
      SearchOutcome::Certified(c) => Some(c),
      SearchOutcome::Inconclusive(_) => None,
    }
  }
}

struct Failure {
  degree: usize,
  reason: String,
  stuck: Vec<(usize, usize, String)>,
}

/// Approximate contractions `s_0..s_n` with every product capped at `cap`.
fn contractions(
  nr: &NovikovRing,
  c: &ChainComplex,
  n: usize,
  cap: i64,
  step_cap: usize,
  steps: &mut usize,
) -> Result<Vec<NovikovMatrix>, Failure> {
  let mut out: Vec<NovikovMatrix> = Vec::with_capacity(n + 1);
  let mut prev = NovikovMatrix::zeros(nr, 0, c.rank(0));
  for i in 0..=n {
    let di = NovikovMatrix::exact(nr, &c.boundary(i));
    let dnext = NovikovMatrix::exact(nr, &c.boundary(i + 1));
    let rhs = NovikovMatrix::identity(nr, c.rank(i)).sub(nr, &di.mul(nr, &prev, cap));
    let sol = solve_left(nr, &dnext, &rhs, cap, step_cap);
    *steps += sol.record.steps;
    if !sol.solved() {
      let stuck = sol.record.stuck.map(|s| s.entries).unwrap_or_default();
      let reason = if i == c.top() {
        format!("degree {i} is the top of the complex and I - d s does not vanish")
      } else {
        format!("I - d_{i} s_{} is not in the row space reachable from d_{}", i as i64 - 1, i + 1)
      };
      return Err(Failure { degree: i, reason, stuck });
    }
    prev = sol.x.clone();
    out.push(sol.x);
  }
  Ok(out)
}

/// `E_i = I - d_i S_{i-1} - S_i d_{i+1}` for `i = 0..=n`.
pub fn error_matrices(c: &ChainComplex, s: &[GrMatrix]) -> Vec<GrMatrix> {
  let ctx = c.ctx();
  (0..s.len())
    .map(|i| {
      let prev = if i == 0 { GrMatrix::zeros(ctx, 0, c.rank(0)) } else { s[i - 1].clone() };
      GrMatrix::identity(ctx, c.rank(i)).sub(&c.boundary(i).mul(&prev)).sub(&s[i].mul(&c.boundary(i + 1)))
    })
    .collect()
}

/// How far below level 0 the boundary `d_{i+1}` reaches under `phi`. The
/// contraction `s_i` is truncated `kappa` levels above this, so every
/// discarded term of `s_i` meets `d_{i+1}` (and `d_i` meets `s_{i-1}`) at
/// level `kappa` or higher.
pub fn truncation_shift(c: &ChainComplex, phi: &Character, i: usize) -> i64 {
  c.boundary(i + 1).valuation(phi).map_or(0, |v| (-v).max(0))
}

/// Searches for a certificate of length `n`, trying relative truncation
/// levels `kappa = 0..=budget.max_precision` in turn; `s_i` is truncated at
/// `kappa + truncation_shift(i)`. For each level the working precision is
/// raised until the approximate contraction is known that far; the
/// truncation is then checked exactly.
pub fn search_certificate(
  c: &ChainComplex,
  phi: &Character,
  n: usize,
  budget: &SearchBudget,
) -> Result<SearchOutcome, FibringError> {
  if n > c.top() {
    return Err(FibringError::Degree { requested: n, top: c.top() });
  }
  let nr = NovikovRing::new(c.ctx().clone(), phi.clone());
  let shifts: Vec<i64> = (0..=n).map(|i| truncation_shift(c, phi, i)).collect();
  let mut steps = 0usize;
  let mut last = Failure { degree: 0, reason: "precision budget exhausted".into(), stuck: Vec::new() };
  for kappa in 0..=budget.max_precision {
    let top_level = kappa + shifts.iter().max().copied().unwrap_or(0);
    let mut cap = top_level;
    while cap <= top_level + budget.max_extra_precision {
      let s = match contractions(&nr, c, n, cap, budget.step_cap, &mut steps) {
        Ok(s) => s,
        Err(f) => {
          last = f;
          break;
        }
      };
      let deficit = s.iter().zip(&shifts).map(|(m, sh)| kappa + sh - m.precision()).max().unwrap_or(0);
      if deficit > 0 {
        cap += deficit;
        continue;
      }
      let s: Vec<GrMatrix> =
        s.iter().zip(&shifts).map(|(m, sh)| m.to_group_ring(&nr, kappa + sh)).collect::<Result<_, _>>()?;
      let e = error_matrices(c, &s);
      let budget_used = BudgetUsed { precision: kappa, working_precision: cap, steps };
      let cert = Certificate { phi: phi.clone(), degree: n, precision: kappa, s, e, budget_used };
      if verify_certificate(c, &cert)? {
        return Ok(SearchOutcome::Certified(Box::new(cert)));
      }
      last = Failure {
        degree: n,
        reason: format!("truncation at relative level {kappa} leaves an error term without positive support"),
        stuck: Vec::new(),
      };
      break;
    }
  }
  Ok(SearchOutcome::Inconclusive(InconclusiveReport {
    max_precision_tried: budget.max_precision,
    failed_degree: Some(last.degree),
    reason: last.reason,
    stuck_entries: last.stuck,
  }))
}

fn check_shapes(c: &ChainComplex, cert: &Certificate) -> Result<(), FibringError> {
  let n = cert.degree;
  if n > c.top() {
    return Err(FibringError::ShapeMismatch(format!("degree {n} exceeds the top degree {}", c.top())));
  }
  if cert.s.len() != n + 1 || cert.e.len() != n + 1 {
    return Err(FibringError::ShapeMismatch(format!(
      "degree {n} needs {} matrices, found {} and {}",
      n + 1,
      cert.s.len(),
      cert.e.len()
    )));
  }
  if cert.ctx() != c.ctx() {
    return Err(FibringError::ShapeMismatch(
      "certificate and complex live over different group rings".into(),
    ));
  }
  if cert.phi.values().len() != c.ctx().generators().len() {
    return Err(FibringError::ShapeMismatch("character arity differs from the number of generators".into()));
  }
  for i in 0..=n {
    let (want_s, want_e) = ((c.rank(i), c.rank(i + 1)), (c.rank(i), c.rank(i)));
    if cert.s[i].shape() != want_s {
      return Err(FibringError::ShapeMismatch(format!(
        "S_{i} has shape {:?}, expected {want_s:?}",
        cert.s[i].shape()
      )));
    }
    if cert.e[i].shape() != want_e {
      return Err(FibringError::ShapeMismatch(format!(
        "E_{i} has shape {:?}, expected {want_e:?}",
        cert.e[i].shape()
      )));
    }
  }
  Ok(())
}

/// Every reason the certificate fails to verify; empty iff it verifies.
pub fn certificate_failures(c: &ChainComplex, cert: &Certificate) -> Result<Vec<String>, FibringError> {
  check_shapes(c, cert)?;
  let mut failures = Vec::new();
  if let Some(i) = first_failure(c) {
    failures.push(format!("d_{} d_{} is nonzero", i + 1, i));
  }
  let e = error_matrices(c, &cert.s);
  for (i, ei) in e.iter().enumerate() {
    if *ei != cert.e[i] {
      failures.push(format!("stored E_{i} differs from I - d S - S d"));
    }
    if let Some((r, col)) = ei.first_nonpositive(&cert.phi) {
      failures.push(format!("E_{i} entry ({r}, {col}) = {} lacks positive support", ei.get(r, col)));
    }
  }
  for i in 1..e.len() {
    let d = c.boundary(i);
    if e[i].mul(&d) != d.mul(&e[i - 1]) {
      failures.push(format!("E is not a chain map in degree {i}"));
    }
  }
  Ok(failures)
}

/// Exact check of a certificate against `c`.
pub fn verify_certificate(c: &ChainComplex, cert: &Certificate) -> Result<bool, FibringError> {
  Ok(certificate_failures(c, cert)?.is_empty())
}

/// `z - z (sum_{k<K} E_i^k) S_i d_{i+1}` for a cycle `z` (a `1 x n_i` row).
/// This equals `z E_i^K` and so has valuation at least `v(z) + K`.
pub fn soundness_residual(
  c: &ChainComplex,
  cert: &Certificate,
  z: &GrMatrix,
  i: usize,
  k: usize,
) -> Result<GrMatrix, FibringError> {
  if i > cert.degree || z.shape() != (1, c.rank(i)) {
    return Err(FibringError::ShapeMismatch(format!("cycle of shape {:?} in degree {i}", z.shape())));
  }
  let mut power = z.clone();
  let mut sum = GrMatrix::zeros(c.ctx(), 1, c.rank(i));
  for _ in 0..k {
    sum = sum.add(&power);
    power = power.mul(&cert.e[i]);
  }
  Ok(z.sub(&sum.mul(&cert.s[i]).mul(&c.boundary(i + 1))))
}
