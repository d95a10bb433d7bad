//! Free differential calculus in the integral group ring of the free group.

use std::collections::BTreeMap;

use super::word::{free_reduce, Letter, Word};

/// An element of the integral group ring of the free group, keyed by
/// freely reduced words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreeGroupRingElement {
  pub terms: BTreeMap<Word, i64>,
}

impl FreeGroupRingElement {
  pub fn monomial(w: Word, c: i64) -> Self {
    let mut e = FreeGroupRingElement::default();
    e.add_term(w, c);
    e
  }

  pub fn add_term(&mut self, w: Word, c: i64) {
    let w = free_reduce(&w);
    let entry = self.terms.entry(w).or_insert(0);
    *entry += c;
    if *entry == 0 {
      self.terms.retain(|_, v| *v != 0);
    }
  }

  pub fn add(&self, other: &Self) -> Self {
    let mut out = self.clone();
    for (w, c) in &other.terms {
      out.add_term(w.clone(), *c);
    }
    out
  }

  pub fn mul(&self, other: &Self) -> Self {
    let mut out = FreeGroupRingElement::default();
    for (u, a) in &self.terms {
      for (v, b) in &other.terms {
        out.add_term(u.concat(v), a * b);
      }
    }
    out
  }

  pub fn is_zero(&self) -> bool {
    self.terms.is_empty()
  }
}

/// The Fox derivative of `r` with respect to `generator`.
pub fn fox_derivative(r: &Word, generator: usize) -> FreeGroupRingElement {
  let mut out = FreeGroupRingElement::default();
  let letters = r.letters();
  for (j, &l) in letters.iter().enumerate() {
    if l.generator() != generator {
      continue;
    }
    if l.is_inverse() {
      out.add_term(Word(letters[..=j].to_vec()), -1);
    } else {
      out.add_term(Word(letters[..j].to_vec()), 1);
    }
  }
  out
}

/// Checks `sum_x (dr/dx)(x - 1) = r - 1` in the free group ring.
pub fn fox_fundamental_identity_holds(r: &Word, num_generators: usize) -> bool {
  let mut lhs = FreeGroupRingElement::default();
  for g in 0..num_generators {
    let mut x_minus_one = FreeGroupRingElement::monomial(Word::letter(Letter::new(g, false)), 1);
    x_minus_one.add_term(Word::identity(), -1);
    lhs = lhs.add(&fox_derivative(r, g).mul(&x_minus_one));
  }
  let mut rhs = FreeGroupRingElement::monomial(r.clone(), 1);
  rhs.add_term(Word::identity(), -1);
  lhs == rhs
}
