//! Independent ground truth for the first Sigma invariant, used to refute
//! fibring and to cross-check certificates. Nothing here looks at chain
//! complexes or Novikov rings.
//!
//! The one-relator test is K. S. Brown's criterion for two-generator
//! one-relator groups ("Trees, valuations, and the Bieri-Neumann-Strebel
//! invariant", Invent. Math. 90, 1987; also Dunfield and Thurston, "A random
//! tunnel number one 3-manifold does not fiber over the circle", 2006).
//! Walk once around the cyclically reduced relator, recording the
//! character value of every prefix. Then `[phi]` lies in Sigma iff the
//! minimum of the walk is attained at exactly one vertex, or at exactly two
//! cyclically adjacent vertices (joined by a letter on which `phi`
//! vanishes). `[-phi]` is decided by the same test applied to the maximum.
//! The sign convention is the one for which `[phi]` in Sigma matches
//! vanishing of Novikov homology over the completion towards `+phi`, as
//! set up in [`crate::fibring`].
//!
//! With three or more generators and one relator the deficiency is at least
//! two and Sigma is empty. Free groups of rank at least two have empty
//! Sigma; for the infinite cyclic group both classes lie in Sigma.

use serde::Serialize;
use thiserror::Error;

use crate::presentation::{free_reduce, Character, Presentation, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
  #[error("expected exactly one relator, found {0}")]
  NotOneRelator(usize),
  #[error("presentation is not the standard presentation of a free abelian group")]
  NotFreeAbelian,
}

/// Membership of `[phi]` and `[-phi]` in Sigma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SigmaMembership {
  pub in_sigma_plus: bool,
  pub in_sigma_minus: bool,
}

impl SigmaMembership {
  /// The kernel is finitely generated iff both classes lie in Sigma.
  pub fn kernel_finitely_generated(&self) -> bool {
    self.in_sigma_plus && self.in_sigma_minus
  }
}

/// The audit trail of Brown's criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BrownTrace {
  /// The cyclically reduced relator that was walked.
  pub relator: String,
  /// Character value of each cyclic prefix, starting from the empty one.
  pub heights: Vec<i64>,
  pub min: i64,
  pub min_vertices: Vec<usize>,
  pub max: i64,
  pub max_vertices: Vec<usize>,
  pub rule: String,
}

/// Where an oracle answer came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleEvidence {
  pub source: String,
  pub membership: SigmaMembership,
  #[serde(skip_serializing_if = "Option::is_none")]
  pub trace: Option<BrownTrace>,
}

pub fn cyclically_reduce(w: &Word) -> Word {
  let mut letters = free_reduce(w).0;
  while letters.len() >= 2 && letters[0] == letters[letters.len() - 1].inverse() {
    letters.pop();
    letters.remove(0);
  }
  Word(letters)
}

/// True iff the extreme value is attained at one vertex, or at two
/// cyclically adjacent vertices.
fn extreme_is_simple(vertices: &[usize], len: usize) -> bool {
  match vertices {
    [_] => true,
    [i, j] => len > 2 && (j - i == 1 || (*i == 0 && *j == len - 1)),
    _ => false,
  }
}

/// Brown's criterion for a one-relator presentation.
pub fn brown_sigma(p: &Presentation, phi: &Character) -> Result<(SigmaMembership, BrownTrace), OracleError> {
  if p.relators.len() != 1 {
    return Err(OracleError::NotOneRelator(p.relators.len()));
  }
  let r = cyclically_reduce(&p.relators[0]);
  let mut heights = Vec::with_capacity(r.len());
  let mut h = 0i64;
  for &l in r.letters() {
    heights.push(h);
    h += phi.letter_value(l);
  }
  debug_assert_eq!(h, 0, "characters vanish on relators");
  let min = heights.iter().copied().min().unwrap_or(0);
  let max = heights.iter().copied().max().unwrap_or(0);
  let min_vertices: Vec<usize> = (0..heights.len()).filter(|&i| heights[i] == min).collect();
  let max_vertices: Vec<usize> = (0..heights.len()).filter(|&i| heights[i] == max).collect();
  let k = p.num_generators();
  let used: Vec<bool> = (0..k).map(|g| r.letters().iter().any(|l| l.generator() == g)).collect();

  let (membership, rule) = if k >= 3 {
    (
      SigmaMembership { in_sigma_plus: false, in_sigma_minus: false },
      "deficiency at least two: Sigma is empty".to_string(),
    )
  } else if used.iter().any(|u| !u) {
    // a free product of <x | x^n> with Z; for n = 1 this is Z itself
    let cyclic = r.len() == 1;
    (
      SigmaMembership { in_sigma_plus: cyclic, in_sigma_minus: cyclic },
      if cyclic { "group is infinite cyclic" } else { "nontrivial free product: Sigma is empty" }.to_string(),
    )
  } else {
    (
      SigmaMembership {
        in_sigma_plus: extreme_is_simple(&min_vertices, heights.len()),
        in_sigma_minus: extreme_is_simple(&max_vertices, heights.len()),
      },
      "minimum (for phi) and maximum (for -phi) attained at one vertex or one edge".to_string(),
    )
  };
  let trace = BrownTrace { relator: p.format_word(&r), heights, min, min_vertices, max, max_vertices, rule };
  Ok((membership, trace))
}

/// `Sigma(F_k)` is empty for `k >= 2`; for `k = 1` it is everything.
pub fn free_group_sigma(p: &Presentation) -> Option<SigmaMembership> {
  if !p.relators.is_empty() {
    return None;
  }
  let cyclic = p.num_generators() == 1;
  Some(SigmaMembership { in_sigma_plus: cyclic, in_sigma_minus: cyclic })
}

/// True iff the relators are exactly the commutators of all pairs of
/// generators, each once, up to cyclic permutation and inversion.
pub fn is_free_abelian_presentation(p: &Presentation) -> bool {
  let k = p.num_generators();
  let mut seen = vec![false; k * k];
  for r in &p.relators {
    let r = cyclically_reduce(r);
    if r.len() != 4 {
      return false;
    }
    let l = r.letters();
    let (x, y) = (l[0].generator(), l[1].generator());
    let is_commutator = (0..4).any(|s| {
      let c: Vec<_> = (0..4).map(|i| l[(i + s) % 4]).collect();
      c[0].generator() != c[1].generator() && c[2] == c[0].inverse() && c[3] == c[1].inverse()
    });
    if !is_commutator || x == y {
      return false;
    }
    let (i, j) = (x.min(y), x.max(y));
    if seen[i * k + j] {
      return false;
    }
    seen[i * k + j] = true;
  }
  p.relators.len() == k * (k - 1) / 2
}

/// For free abelian groups every nonzero character has a finitely
/// generated kernel (`Z^{n-1}`).
pub fn abelian_kernel_fg(p: &Presentation, _phi: &Character) -> Result<bool, OracleError> {
  if is_free_abelian_presentation(p) {
    Ok(true)
  } else {
    Err(OracleError::NotFreeAbelian)
  }
}

/// The first applicable oracle, if any.
pub fn sigma_oracle(p: &Presentation, phi: &Character) -> Option<OracleEvidence> {
  if let Some(membership) = free_group_sigma(p) {
    return Some(OracleEvidence { source: "free group".into(), membership, trace: None });
  }
  if abelian_kernel_fg(p, phi).is_ok() {
    let membership = SigmaMembership { in_sigma_plus: true, in_sigma_minus: true };
    return Some(OracleEvidence { source: "free abelian group".into(), membership, trace: None });
  }
  if p.relators.len() == 1 {
    let (membership, trace) = brown_sigma(p, phi).ok()?;
    return Some(OracleEvidence { source: "Brown's criterion".into(), membership, trace: Some(trace) });
  }
  None
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::presentation::{parse_character, parse_presentation};

  fn brown(text: &str, chr: &str) -> SigmaMembership {
    let p = parse_presentation(text).unwrap();
    brown_sigma(&p, &parse_character(chr, &p).unwrap()).unwrap().0
  }

  fn both(b: bool) -> SigmaMembership {
    SigmaMembership { in_sigma_plus: b, in_sigma_minus: b }
  }

  #[test]
  fn worked_examples() {
    let bs = brown("gens a t\nrel t a t^-1 a^-2", "a=0,t=1");
    assert_eq!(bs, SigmaMembership { in_sigma_plus: false, in_sigma_minus: true });
    assert_eq!(brown("gens x y\nrel x^2 y^-3", "x=3,y=2"), both(true));
    assert_eq!(brown("gens a t\nrel t a t^-1 a", "a=0,t=1"), both(true));
    assert_eq!(brown("gens a b\nrel a b a^-1 b^-1", "a=1,b=1"), both(true));
    assert_eq!(brown("gens a b\nrel a^2 b a^-2 b^-1", "a=0,b=1"), both(false));
    assert_eq!(brown("gens a b\nrel a^2 b a^-2 b^-1", "a=1,b=0"), both(true));
    assert_eq!(brown("gens a b c\nrel a b a^-1 b^-1", "a=1,b=0,c=0"), both(false));
    assert_eq!(brown("gens a b\nrel a", "a=0,b=1"), both(true));
    assert_eq!(brown("gens a b\nrel a^3", "a=0,b=1"), both(false));
  }

  #[test]
  fn trace_records_the_walk() {
    let p = parse_presentation("gens a t\nrel a^-1 t a t^-1 a^-1 a").unwrap();
    let phi = parse_character("a=0,t=1", &p).unwrap();
    let (_, trace) = brown_sigma(&p, &phi).unwrap();
    assert_eq!(trace.relator, "a^-1 t a t^-1");
    assert_eq!(trace.heights, vec![0, 0, 1, 1]);
    assert_eq!(trace.min_vertices, vec![0, 1]);
  }

  #[test]
  fn invariances() {
    let base = brown("gens a t\nrel t a t^-1 a^-2", "a=0,t=1");
    // cyclic permutation
    assert_eq!(brown("gens a t\nrel a^-2 t a t^-1", "a=0,t=1"), base);
    // inversion of the relator
    assert_eq!(brown("gens a t\nrel a^2 t a^-1 t^-1", "a=0,t=1"), base);
    // renaming t -> t^-1 together with phi(t) -> -phi(t)
    assert_eq!(brown("gens a t\nrel t^-1 a t a^-2", "a=0,t=-1"), base);
    // phi -> -phi swaps the roles of min and max
    let flipped = brown("gens a t\nrel t a t^-1 a^-2", "a=0,t=-1");
    assert_eq!(
      flipped,
      SigmaMembership { in_sigma_plus: base.in_sigma_minus, in_sigma_minus: base.in_sigma_plus }
    );
    // scaling
    assert_eq!(brown("gens x y\nrel x^2 y^-3", "x=9,y=6"), brown("gens x y\nrel x^2 y^-3", "x=3,y=2"));
  }

  #[test]
  fn other_oracles() {
    let f2 = parse_presentation("gens a b").unwrap();
    assert_eq!(free_group_sigma(&f2), Some(both(false)));
    assert_eq!(
      brown_sigma(&f2, &parse_character("a=1,b=0", &f2).unwrap()).unwrap_err(),
      OracleError::NotOneRelator(0)
    );
    let z1 = parse_presentation("gens t").unwrap();
    assert_eq!(free_group_sigma(&z1), Some(both(true)));
    let z2 = parse_presentation("gens a b\nrel a b a^-1 b^-1").unwrap();
    assert_eq!(abelian_kernel_fg(&z2, &parse_character("a=1,b=0", &z2).unwrap()), Ok(true));
    let z3 =
      parse_presentation("gens a b c\nrel a b a^-1 b^-1\nrel a c a^-1 c^-1\nrel c^-1 b^-1 c b").unwrap();
    assert_eq!(abelian_kernel_fg(&z3, &parse_character("a=1,b=1,c=1", &z3).unwrap()), Ok(true));
    let klein = parse_presentation("gens a t\nrel t a t^-1 a").unwrap();
    assert_eq!(
      abelian_kernel_fg(&klein, &parse_character("a=0,t=1", &klein).unwrap()),
      Err(OracleError::NotFreeAbelian)
    );
  }
}
