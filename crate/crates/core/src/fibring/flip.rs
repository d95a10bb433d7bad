//! From homology over `+phi` to cohomology over `-phi`.
//!
//! Cochains are rows over the completion towards `-phi` and the coboundary
//! out of degree `i` is `d_{i+1}^*` (see [`crate::chain::dualize`]). The
//! involution turns a cochain row `z` into a column `z^` over `+phi`, where
//! the cocycle condition reads `d_{i+1} z^ = 0`. The contraction identity
//! `I = d_i s_{i-1} + s_i d_{i+1}` then gives `d_i (s_{i-1} z^) = z^`, so
//! `w = (s_{i-1} z^)^` satisfies `w d_i^* = z`.

use super::{Certificate, FibringError};
use crate::chain::ChainComplex;
use crate::novikov::{geometric_transform, NovikovApprox, NovikovMatrix, NovikovRing};

fn conjugate(to: &NovikovRing, x: &NovikovApprox) -> NovikovApprox {
  let head = x.head().involution();
  if x.is_exact() {
    to.exact(head)
  } else {
    to.approx(&head, x.precision())
  }
}

/// Transpose with the involution applied entrywise, moving between the
/// completions towards `phi` and `-phi`.
fn conjugate_transpose(to: &NovikovRing, m: &NovikovMatrix) -> NovikovMatrix {
  let mut out = NovikovMatrix::zeros(to, m.cols(), m.rows());
  for (i, j, x) in m.entries() {
    out.set(j, i, conjugate(to, x));
  }
  out
}

fn minus_ring(cert: &Certificate) -> NovikovRing {
  NovikovRing::new(cert.ctx().clone(), cert.phi.negate())
}

/// True iff `w d_i^* = z` on all levels up to `kappa` (over `-phi`).
pub fn cobound_holds(
  c: &ChainComplex,
  cert: &Certificate,
  w: &NovikovMatrix,
  z: &NovikovMatrix,
  i: usize,
  kappa: i64,
) -> bool {
  let minus = minus_ring(cert);
  if i == 0 {
    return z.truncate(&minus, kappa).heads_are_zero() && z.precision() >= kappa;
  }
  let dual = NovikovMatrix::exact(&minus, &c.boundary(i).conjugate_transpose());
  if w.cols() != dual.rows() || z.shape() != (w.rows(), dual.cols()) {
    return false;
  }
  let diff = w.mul(&minus, &dual, kappa).sub(&minus, z).truncate(&minus, kappa);
  diff.heads_are_zero() && diff.precision() >= kappa
}

/// Given a cocycle `z` (a `1 x n_i` row over `-phi`) with `i <= degree`,
/// returns `w` with `w d_i^* = z` at precision `kappa`. In degree 0 the
/// preimage is the empty row.
pub fn flip_cobound(
  c: &ChainComplex,
  cert: &Certificate,
  z: &NovikovMatrix,
  i: usize,
  kappa: i64,
) -> Result<NovikovMatrix, FibringError> {
  if i > cert.degree || z.shape() != (1, c.rank(i)) {
    return Err(FibringError::ShapeMismatch(format!("cochain of shape {:?} in degree {i}", z.shape())));
  }
  let plus = NovikovRing::new(cert.ctx().clone(), cert.phi.clone());
  let minus = minus_ring(cert);
  let next = NovikovMatrix::exact(&minus, &c.boundary(i + 1).conjugate_transpose());
  if !z.mul(&minus, &next, kappa).heads_are_zero() {
    return Err(FibringError::NotACocycle(kappa));
  }
  if i == 0 {
    return Ok(NovikovMatrix::zeros(&minus, 1, 0));
  }

  let column = conjugate_transpose(&plus, z);
  let d = c.boundary(i);
  let vd = d.valuation(&cert.phi).unwrap_or(0).min(0);
  let vz = column.lower_bound(&plus).min(0);
  let e = NovikovMatrix::exact(&plus, &cert.e[i - 1]);
  let sbar = NovikovMatrix::exact(&plus, &cert.s[i - 1]);
  let mut w = NovikovMatrix::zeros(&minus, 1, c.rank(i - 1));
  let mut cap = kappa - vd - vz + 1;
  for _ in 0..8 {
    let s = geometric_transform(&plus, &e, &sbar, cap - vz)?;
    w = conjugate_transpose(&minus, &s.mul(&plus, &column, cap));
    if cobound_holds(c, cert, &w, z, i, kappa) {
      break;
    }
    cap += 4;
  }
  Ok(w)
}

#[cfg(test)]
mod tests {
  use super::super::tests::{chr, complex, KLEIN, Z2};
  use super::super::{search_certificate, SearchBudget};
  use super::*;
  use crate::coefficients::CoefficientRing;
  use crate::groupring::{GrMatrix, GroupRingElement};

  fn setup(text: &str, phi: &str) -> (ChainComplex, Certificate) {
    let c = complex(text, CoefficientRing::Rationals);
    let phi = chr(&c, phi);
    let cert =
      search_certificate(&c, &phi, 1, &SearchBudget::default()).unwrap().certificate().unwrap().clone();
    (c, cert)
  }

  #[test]
  fn flips_coboundaries() {
    for (text, phi, y) in [(Z2, "a=1,b=0", "2 - a*b + b^-1"), (KLEIN, "a=0,t=1", "t^-1 + 1/3*a*t")] {
      let (c, cert) = setup(text, phi);
      let minus = minus_ring(&cert);
      let ctx = c.ctx();
      let y = GrMatrix::from_rows(ctx, 1, vec![vec![GroupRingElement::parse(ctx, y).unwrap()]]);
      let z = NovikovMatrix::exact(&minus, &y.mul(&c.boundary(1).conjugate_transpose()));
      let w = flip_cobound(&c, &cert, &z, 1, 3).unwrap();
      assert!(cobound_holds(&c, &cert, &w, &z, 1, 3));
      assert_eq!(w.shape(), (1, 1));
    }
  }

  #[test]
  fn zero_and_non_cocycles() {
    let (c, cert) = setup(Z2, "a=1,b=0");
    let minus = minus_ring(&cert);
    let zero = NovikovMatrix::zeros(&minus, 1, 2);
    let w = flip_cobound(&c, &cert, &zero, 1, 3).unwrap();
    assert!(w.truncate(&minus, 3).heads_are_zero());
    let mut bad = NovikovMatrix::zeros(&minus, 1, 2);
    bad.set(0, 0, minus.one());
    assert_eq!(flip_cobound(&c, &cert, &bad, 1, 3), Err(FibringError::NotACocycle(3)));
    let w0 = flip_cobound(&c, &cert, &NovikovMatrix::zeros(&minus, 1, 1), 0, 3).unwrap();
    assert_eq!(w0.shape(), (1, 0));
  }
}
