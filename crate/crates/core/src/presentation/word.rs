//! Letters and words over a generating set and its formal inverses.

use std::cmp::Ordering;
use std::fmt;

/// A generator or its formal inverse. Generator `i` is letter `2i`, its
/// inverse is `2i + 1`, so the natural order on letters is the declared
/// generator order with each inverse immediately after its generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u32);

impl Letter {
  pub fn new(generator: usize, inverse: bool) -> Self {
    Letter(2 * generator as u32 + inverse as u32)
  }

  pub fn generator(self) -> usize {
    (self.0 / 2) as usize
  }

  pub fn is_inverse(self) -> bool {
    self.0 % 2 == 1
  }

  pub fn inverse(self) -> Self {
    Letter(self.0 ^ 1)
  }

  /// `+1` for a generator, `-1` for an inverse.
  pub fn sign(self) -> i64 {
    if self.is_inverse() {
      -1
    } else {
      1
    }
  }
}

/// A finite word in the letters. The empty word is the identity.
///
/// Words are ordered shortlex: shorter words first, equal lengths
/// lexicographically by letter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Ord for Word {
  fn cmp(&self, other: &Self) -> Ordering {
    self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
  }
}

impl PartialOrd for Word {
  fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
    Some(self.cmp(other))
  }
}

impl Word {
  pub fn identity() -> Self {
    Word(Vec::new())
  }

  pub fn letter(l: Letter) -> Self {
    Word(vec![l])
  }

  /// Builds a word from `(generator, exponent)` syllables.
  pub fn from_syllables(syllables: &[(usize, i64)]) -> Self {
    let mut letters = Vec::new();
    for &(g, e) in syllables {
      let l = Letter::new(g, e < 0);
      letters.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
    }
    Word(letters)
  }

  pub fn len(&self) -> usize {
    self.0.len()
  }

  pub fn is_empty(&self) -> bool {
    self.0.is_empty()
  }

  pub fn letters(&self) -> &[Letter] {
    &self.0
  }

  pub fn concat(&self, other: &Word) -> Word {
    let mut v = Vec::with_capacity(self.len() + other.len());
    v.extend_from_slice(&self.0);
    v.extend_from_slice(&other.0);
    Word(v)
  }

  pub fn inverse(&self) -> Word {
    Word(self.0.iter().rev().map(|l| l.inverse()).collect())
  }

  /// Collapses runs of equal letters into `(generator, exponent)` pairs.
  pub fn syllables(&self) -> Vec<(usize, i64)> {
    let mut out: Vec<(usize, i64)> = Vec::new();
    for &l in &self.0 {
      match out.last_mut() {
        Some((g, e)) if *g == l.generator() && (*e > 0) == (l.sign() > 0) => *e += l.sign(),
        _ => out.push((l.generator(), l.sign())),
      }
    }
    out
  }

  pub fn is_freely_reduced(&self) -> bool {
    self.0.windows(2).all(|w| w[0] != w[1].inverse())
  }

  /// True when the word is freely reduced and its first and last letters
  /// are not mutually inverse.
  pub fn is_cyclically_reduced(&self) -> bool {
    self.is_freely_reduced()
      && match (self.0.first(), self.0.last()) {
        (Some(&f), Some(&l)) => self.0.len() == 1 || f != l.inverse(),
        _ => true,
      }
  }
}

/// The unique freely reduced word equal to `w` in the free group.
pub fn free_reduce(w: &Word) -> Word {
  let mut out: Vec<Letter> = Vec::with_capacity(w.len());
  for &l in &w.0 {
    if out.last() == Some(&l.inverse()) {
      out.pop();
    } else {
      out.push(l);
    }
  }
  Word(out)
}

/// Formats a word with the given generator names as `a^2 b^-1`; the
/// identity prints as `1`.
pub struct WordDisplay<'a> {
  pub word: &'a Word,
  pub names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if self.word.is_empty() {
      return write!(f, "1");
    }
    for (i, (g, e)) in self.word.syllables().into_iter().enumerate() {
      if i > 0 {
        write!(f, " ")?;
      }
      if e == 1 {
        write!(f, "{}", self.names[g])?;
      } else {
        write!(f, "{}^{}", self.names[g], e)?;
      }
    }
    Ok(())
  }
}
