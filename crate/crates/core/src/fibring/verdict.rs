use serde::Serialize;

use super::{
  search_certificate, verify_certificate, Certificate, FibringError, InconclusiveReport, SearchBudget,
  SearchOutcome,
};
use crate::chain::ChainComplex;
use crate::coefficients::CoefficientRing;
use crate::oracle::{sigma_oracle, OracleEvidence};
use crate::presentation::{Character, Presentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictKind {
  /// Novikov homology vanishes up to `degree` for both `phi` and `-phi`,
  /// so the kernel is of type `FP_degree`.
  FibredFPn {
    degree: usize,
  },
  /// An oracle shows the kernel is not finitely generated.
  NotFibred,
  Inconclusive,
}

/// The search in one direction.
#[derive(Debug, Clone, Serialize)]
pub struct DirectionResult {
  pub character: Character,
  pub certified: bool,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub precision: Option<i64>,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub inconclusive: Option<InconclusiveReport>,
  #[serde(skip)]
  pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
  pub verdict: VerdictKind,
  pub character: Character,
  pub ring: CoefficientRing,
  pub degree: usize,
  pub plus: DirectionResult,
  pub minus: DirectionResult,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub oracle: Option<OracleEvidence>,
  pub notes: Vec<String>,
}

impl Verdict {
  pub fn is_fibred(&self) -> bool {
    matches!(self.verdict, VerdictKind::FibredFPn { .. })
  }
}

fn direction(
  c: &ChainComplex,
  phi: &Character,
  n: usize,
  budget: &SearchBudget,
) -> Result<DirectionResult, FibringError> {
  Ok(match search_certificate(c, phi, n, budget)? {
    SearchOutcome::Certified(cert) => {
      debug_assert!(verify_certificate(c, &cert)?);
      DirectionResult {
        character: phi.clone(),
        certified: true,
        precision: Some(cert.precision),
        inconclusive: None,
        certificate: Some(*cert),
      }
    }
    SearchOutcome::Inconclusive(report) => DirectionResult {
      character: phi.clone(),
      certified: false,
      precision: None,
      inconclusive: Some(report),
      certificate: None,
    },
  })
}

/// Searches certificates for `phi` and `-phi` up to degree `n`. Both
/// verifying gives `FP_n`; otherwise an applicable oracle may refute finite
/// generation of the kernel, and failing that the verdict is inconclusive.
/// Search failure alone never refutes anything.
pub fn sikorav_verdict(
  c: &ChainComplex,
  phi: &Character,
  n: usize,
  budget: &SearchBudget,
) -> Result<Verdict, FibringError> {
  let plus = direction(c, phi, n, budget)?;
  let minus = direction(c, &phi.negate(), n, budget)?;
  let oracle = sigma_oracle(c.ctx().group().presentation(), phi);
  let mut notes = Vec::new();
  for (d, label) in [(&plus, "+phi"), (&minus, "-phi")] {
    if !d.certified {
      let report = d.inconclusive.as_ref().expect("uncertified directions carry a report");
      notes.push(format!(
        "{label}: no certificate up to precision {}: {}",
        report.max_precision_tried, report.reason
      ));
    }
  }
  if let Some(o) = &oracle {
    for (d, in_sigma, label) in
      [(&plus, o.membership.in_sigma_plus, "+phi"), (&minus, o.membership.in_sigma_minus, "-phi")]
    {
      if d.certified && !in_sigma && n >= 1 {
        notes.push(format!("{label}: certified although {} says it lies outside Sigma", o.source));
      }
      if !d.certified && in_sigma && n == 1 {
        notes.push(format!("{label}: {} places it in Sigma but the search stopped", o.source));
      }
    }
  }
  let verdict = if plus.certified && minus.certified {
    VerdictKind::FibredFPn { degree: n }
  } else if n >= 1 && oracle.as_ref().is_some_and(|o| !o.membership.kernel_finitely_generated()) {
    VerdictKind::NotFibred
  } else {
    VerdictKind::Inconclusive
  };
  Ok(Verdict {
    verdict,
    character: phi.clone(),
    ring: c.ctx().ring().clone(),
    degree: n,
    plus,
    minus,
    oracle,
    notes,
  })
}

/// Primitive characters with coordinates in `[-grid, grid]`, one per line
/// through the origin (first nonzero coordinate positive), sorted.
pub fn sphere_characters(p: &Presentation, grid: i64) -> Result<Vec<Character>, FibringError> {
  if p.first_betti_number() == 0 {
    return Err(FibringError::NoCharacters);
  }
  let k = p.num_generators();
  let mut out = Vec::new();
  let mut v = vec![-grid; k];
  'outer: loop {
    let first = v.iter().find(|&&x| x != 0).copied();
    if first.is_some_and(|f| f > 0) {
      if let Ok(chr) = Character::from_vector(&v, p) {
        if chr.scale() == 1 {
          out.push(chr);
        }
      }
    }
    for i in (0..k).rev() {
      if v[i] < grid {
        v[i] += 1;
        continue 'outer;
      }
      v[i] = -grid;
    }
    break;
  }
  out.sort_by(|a, b| a.values().cmp(b.values()));
  Ok(out)
}

/// [`sikorav_verdict`] for every character of [`sphere_characters`].
pub fn sphere_sample(
  c: &ChainComplex,
  grid: i64,
  n: usize,
  budget: &SearchBudget,
) -> Result<Vec<(Character, Verdict)>, FibringError> {
  sphere_characters(c.ctx().group().presentation(), grid)?
    .into_iter()
    .map(|phi| sikorav_verdict(c, &phi, n, budget).map(|v| (phi, v)))
    .collect()
}
