//! Finite presentations, words, characters, confluent rewriting systems and
//! free differential calculus.

mod character;
mod fox;
mod parse;
mod rewriting;
mod word;

use thiserror::Error;

pub use character::{parse_character, validate_character, Character};
pub use fox::{fox_derivative, fox_fundamental_identity_holds, FreeGroupRingElement};
pub use parse::{parse_presentation, parse_word};
pub use rewriting::{knuth_bendix, Budget, RewritingError, RewritingSystem, WordOrder};
pub use word::{free_reduce, Letter, Word, WordDisplay};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
  #[error("syntax error at line {line}, column {col}: {msg}")]
  Syntax { line: usize, col: usize, msg: String },
  #[error("duplicate generator '{name}' at line {line}")]
  DuplicateGenerator { name: String, line: usize },
  #[error("undeclared generator '{name}' at line {line}, column {col}")]
  UndeclaredGenerator { name: String, line: usize, col: usize },
  #[error("relator at line {line} is trivial after free reduction")]
  TrivialRelator { line: usize },
  #[error("character takes value {value} on relator {relator}")]
  NonzeroOnRelator { relator: String, value: i64 },
  #[error("the zero character is not allowed")]
  ZeroCharacter,
  #[error("character has {found} values but the presentation has {expected} generators")]
  CharacterArity { expected: usize, found: usize },
  #[error("character has no value for generator '{0}'")]
  MissingCharacterValue(String),
  #[error("character mentions unknown generator '{0}'")]
  UnknownCharacterGenerator(String),
  #[error("malformed character string: {0}")]
  CharacterSyntax(String),
}

/// A finite presentation `<generators | relators>`, optionally carrying a
/// hand-written rewriting system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
  pub name: String,
  pub generators: Vec<String>,
  /// Freely reduced, nonempty.
  pub relators: Vec<Word>,
  /// Hand-written rewriting rules `lhs -> rhs`, if any.
  pub rules: Vec<(Word, Word)>,
  /// Order used to orient rewriting rules.
  pub order: WordOrder,
}

impl Presentation {
  pub fn num_generators(&self) -> usize {
    self.generators.len()
  }

  pub fn format_word(&self, w: &Word) -> String {
    WordDisplay { word: w, names: &self.generators }.to_string()
  }

  /// Renders the presentation in the file format accepted by
  /// [`parse_presentation`]; parsing the result gives back `self`.
  pub fn to_text(&self) -> String {
    let mut out = format!("group {}\ngens {}\n", self.name, self.generators.join(" "));
    if self.order != WordOrder::Shortlex {
      out.push_str(&format!("order {}\n", self.order.name()));
    }
    for r in &self.relators {
      out.push_str(&format!("rel {}\n", self.format_word(r)));
    }
    for (l, r) in &self.rules {
      out.push_str(&format!("rule {} -> {}\n", self.format_word(l), self.format_word(r)));
    }
    out
  }

  /// Exponent-sum matrix (relators by generators); its cokernel is the
  /// abelianisation.
  pub fn exponent_sums(&self) -> Vec<Vec<i64>> {
    self
      .relators
      .iter()
      .map(|r| {
        let mut row = vec![0i64; self.generators.len()];
        for l in r.letters() {
          row[l.generator()] += l.sign();
        }
        row
      })
      .collect()
  }

  /// First Betti number: generators minus the rational rank of the
  /// exponent-sum matrix.
  pub fn first_betti_number(&self) -> usize {
    use num_rational::BigRational;
    use num_traits::Zero;
    let mut m: Vec<Vec<BigRational>> = self
      .exponent_sums()
      .into_iter()
      .map(|row| row.into_iter().map(|v| BigRational::from_integer(v.into())).collect())
      .collect();
    let cols = self.generators.len();
    let mut rank = 0;
    for c in 0..cols {
      let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
      m.swap(rank, p);
      let pivot = m[rank].clone();
      for (r, row) in m.iter_mut().enumerate() {
        if r != rank && !row[c].is_zero() {
          let f = &row[c] / &pivot[c];
          for (x, y) in row[c..].iter_mut().zip(&pivot[c..]) {
            *x -= &f * y;
          }
        }
      }
      rank += 1;
    }
    cols - rank
  }
}
