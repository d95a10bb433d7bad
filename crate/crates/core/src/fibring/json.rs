use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{BudgetUsed, Certificate, FibringError};
use crate::chain::{load_resolution, presentation_complex, ChainComplex};
use crate::coefficients::CoefficientRing;
use crate::groupring::{GrMatrix, Group, GroupRing, GroupRingElement, Term};
use crate::presentation::{parse_presentation, Budget, Character};

/// The on-disk form of a certificate. Self-contained: it carries the
/// presentation and, when the complex is not the presentation complex, the
/// resolution it was found for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
  pub group: String,
  pub presentation: String,
  #[serde(default, skip_serializing_if = "Option::is_none")]
  pub resolution: Option<String>,
  pub character: Character,
  pub ring: CoefficientRing,
  pub degree: usize,
  pub precision: i64,
  pub s_matrices: Vec<Vec<Vec<Vec<Term>>>>,
  #[serde(rename = "E_matrices")]
  pub e_matrices: Vec<Vec<Vec<Vec<Term>>>>,
  pub verified: bool,
  pub budget_used: BudgetUsed,
}

impl CertificateJson {
  pub fn new(c: &ChainComplex, cert: &Certificate, verified: bool) -> CertificateJson {
    let p = c.ctx().group().presentation();
    let resolution = (*c != presentation_complex(c.ctx())).then(|| c.to_text());
    CertificateJson {
      group: p.name.clone(),
      presentation: p.to_text(),
      resolution,
      character: cert.phi.clone(),
      ring: cert.ring().clone(),
      degree: cert.degree,
      precision: cert.precision,
      s_matrices: cert.s.iter().map(|m| m.to_terms(&cert.phi)).collect(),
      e_matrices: cert.e.iter().map(|m| m.to_terms(&cert.phi)).collect(),
      verified,
      budget_used: cert.budget_used,
    }
  }
}

fn matrix(
  ctx: &GroupRing,
  rows: usize,
  cols: usize,
  data: &[Vec<Vec<Term>>],
  what: &str,
) -> Result<GrMatrix, FibringError> {
  if data.len() != rows || data.iter().any(|r| r.len() != cols) {
    return Err(FibringError::ShapeMismatch(format!("{what} should be {rows} x {cols}")));
  }
  let mut m = GrMatrix::zeros(ctx, rows, cols);
  for (i, row) in data.iter().enumerate() {
    for (j, terms) in row.iter().enumerate() {
      m.set(i, j, GroupRingElement::from_terms(ctx, terms)?);
    }
  }
  Ok(m)
}

/// Rebuilds the complex and certificate described by `json`. The stored
/// `verified` flag is ignored; callers re-verify.
pub fn load_certificate(json: &CertificateJson) -> Result<(ChainComplex, Certificate), FibringError> {
  let p = parse_presentation(&json.presentation)?;
  let phi = Character::from_vector(json.character.values(), &p)?;
  let group = Arc::new(Group::new(p, Budget::default())?);
  let ctx = GroupRing::new(group, json.ring.clone());
  let c = match &json.resolution {
    Some(text) => load_resolution(&ctx, text)?,
    None => presentation_complex(&ctx),
  };
  let n = json.degree;
  if n > c.top() || json.s_matrices.len() != n + 1 || json.e_matrices.len() != n + 1 {
    return Err(FibringError::ShapeMismatch(format!("degree {n} does not match the stored matrices")));
  }
  let mut s = Vec::new();
  let mut e = Vec::new();
  for i in 0..=n {
    s.push(matrix(&ctx, c.rank(i), c.rank(i + 1), &json.s_matrices[i], &format!("S_{i}"))?);
    e.push(matrix(&ctx, c.rank(i), c.rank(i), &json.e_matrices[i], &format!("E_{i}"))?);
  }
  let cert = Certificate { phi, degree: n, precision: json.precision, s, e, budget_used: json.budget_used };
  Ok((c, cert))
}

#[cfg(test)]
mod tests {
  use super::super::tests::{chr, complex, KLEIN, TREFOIL};
  use super::super::{search_certificate, verify_certificate, SearchBudget};
  use super::*;

  #[test]
  fn round_trip() {
    for (text, phi) in [(KLEIN, "a=0,t=1"), (TREFOIL, "x=-3,y=-2")] {
      let c = complex(text, CoefficientRing::Rationals);
      let cert = search_certificate(&c, &chr(&c, phi), 1, &SearchBudget::default())
        .unwrap()
        .certificate()
        .unwrap()
        .clone();
      let json = CertificateJson::new(&c, &cert, true);
      let text = serde_json::to_string_pretty(&json).unwrap();
      assert!(text.contains("\"E_matrices\""));
      let back: CertificateJson = serde_json::from_str(&text).unwrap();
      assert_eq!(back, json);
      let (c2, cert2) = load_certificate(&back).unwrap();
      assert!(verify_certificate(&c2, &cert2).unwrap());
      assert_eq!(CertificateJson::new(&c2, &cert2, true), json);
    }
  }

  #[test]
  fn rejects_bad_shapes() {
    let c = complex(KLEIN, CoefficientRing::Rationals);
    let cert = search_certificate(&c, &chr(&c, "a=0,t=1"), 1, &SearchBudget::default())
      .unwrap()
      .certificate()
      .unwrap()
      .clone();
    let mut json = CertificateJson::new(&c, &cert, true);
    json.s_matrices[1].push(Vec::new());
    assert!(matches!(load_certificate(&json), Err(FibringError::ShapeMismatch(_))));
  }
}
