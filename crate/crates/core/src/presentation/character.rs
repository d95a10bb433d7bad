//! Integral characters `G -> Z`.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::word::{Letter, Word};
use super::{Presentation, PresentationError};

/// A nonzero homomorphism to the integers, stored primitive (the gcd of its
/// values is one) together with the positive factor it was divided by.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
  values: Vec<i64>,
  scale: u64,
}

impl Character {
  pub fn values(&self) -> &[i64] {
    &self.values
  }

  pub fn scale(&self) -> u64 {
    self.scale
  }

  pub fn value(&self, generator: usize) -> i64 {
    self.values[generator]
  }

  pub fn letter_value(&self, l: Letter) -> i64 {
    l.sign() * self.values[l.generator()]
  }

  /// Exponent-weighted sum over the letters of `w`.
  pub fn eval(&self, w: &Word) -> i64 {
    w.letters().iter().map(|&l| self.letter_value(l)).sum()
  }

  /// The character `-phi`, with the same recorded scale.
  pub fn negate(&self) -> Character {
    Character { values: self.values.iter().map(|v| -v).collect(), scale: self.scale }
  }

  /// Builds a character from a value vector (one entry per generator),
  /// checking that it kills every relator and normalising to primitive.
  pub fn from_vector(values: &[i64], p: &Presentation) -> Result<Character, PresentationError> {
    if values.len() != p.generators.len() {
      return Err(PresentationError::CharacterArity { expected: p.generators.len(), found: values.len() });
    }
    let g = values.iter().fold(0i64, |acc, &v| acc.gcd(&v));
    if g == 0 {
      return Err(PresentationError::ZeroCharacter);
    }
    let raw = Character { values: values.to_vec(), scale: 1 };
    for r in &p.relators {
      let v = raw.eval(r);
      if v != 0 {
        return Err(PresentationError::NonzeroOnRelator { relator: p.format_word(r), value: v });
      }
    }
    Ok(Character { values: values.iter().map(|v| v / g).collect(), scale: g as u64 })
  }

  /// Formats as `a=1,b=0` using the presentation's generator names.
  pub fn format(&self, p: &Presentation) -> String {
    p.generators.iter().zip(&self.values).map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(",")
  }
}

/// Validates a generator-to-integer assignment against a presentation.
pub fn validate_character(
  values: &BTreeMap<String, i64>,
  p: &Presentation,
) -> Result<Character, PresentationError> {
  for name in values.keys() {
    if !p.generators.contains(name) {
      return Err(PresentationError::UnknownCharacterGenerator(name.clone()));
    }
  }
  let vector = p
    .generators
    .iter()
    .map(|g| values.get(g).copied().ok_or_else(|| PresentationError::MissingCharacterValue(g.clone())))
    .collect::<Result<Vec<_>, _>>()?;
  Character::from_vector(&vector, p)
}

/// Parses the `a=1,b=-2` format.
pub fn parse_character(text: &str, p: &Presentation) -> Result<Character, PresentationError> {
  let mut values = BTreeMap::new();
  for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
    let (name, value) = part
      .split_once('=')
      .ok_or_else(|| PresentationError::CharacterSyntax(format!("missing '=' in '{part}'")))?;
    let v: i64 = value
      .trim()
      .parse()
      .map_err(|_| PresentationError::CharacterSyntax(format!("invalid integer '{}'", value.trim())))?;
    if values.insert(name.trim().to_string(), v).is_some() {
      return Err(PresentationError::CharacterSyntax(format!("generator '{}' given twice", name.trim())));
    }
  }
  validate_character(&values, p)
}
