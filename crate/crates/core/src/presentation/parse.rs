//! Text format for presentations.
//!
//! ```text
//! group bs12            # optional
//! gens a t
//! rel t a t^-1 a^-2     # zero or more
//! order recursive       # optional: shortlex (default) or recursive
//! rule t a -> a^2 t     # optional hand-written rewriting rules
//! ```
//!
//! Blank lines and `#` comments are ignored. A letter is an identifier or
//! `identifier^integer`; the identity word may be written `1`.

use super::word::{free_reduce, Word};
use super::{Presentation, PresentationError, WordOrder};

fn is_identifier(s: &str) -> bool {
  let mut chars = s.chars();
  match chars.next() {
    Some(c) if c.is_alphabetic() || c == '_' => chars.all(|c| c.is_alphanumeric() || c == '_'),
    _ => false,
  }
}

/// Splits a line into whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
  let mut out = Vec::new();
  let mut start = None;
  for (i, c) in line.char_indices() {
    if c.is_whitespace() {
      if let Some(s) = start.take() {
        out.push((s + 1, &line[s..i]));
      }
    } else if start.is_none() {
      start = Some(i);
    }
  }
  if let Some(s) = start {
    out.push((s + 1, &line[s..]));
  }
  out
}

pub(crate) fn parse_word_tokens(
  toks: &[(usize, &str)],
  generators: &[String],
  line: usize,
) -> Result<Word, PresentationError> {
  if toks.len() == 1 && toks[0].1 == "1" {
    return Ok(Word::identity());
  }
  let mut syllables = Vec::new();
  for &(col, tok) in toks {
    let (name, exp) = match tok.split_once('^') {
      Some((n, e)) => {
        let exp: i64 = e.parse().map_err(|_| PresentationError::Syntax {
          line,
          col: col + n.len() + 1,
          msg: format!("invalid exponent '{e}'"),
        })?;
        (n, exp)
      }
      None => (tok, 1),
    };
    if !is_identifier(name) {
      return Err(PresentationError::Syntax { line, col, msg: format!("invalid letter '{tok}'") });
    }
    let g = generators
      .iter()
      .position(|x| x == name)
      .ok_or_else(|| PresentationError::UndeclaredGenerator { name: name.to_string(), line, col })?;
    if exp != 0 {
      syllables.push((g, exp));
    }
  }
  Ok(Word::from_syllables(&syllables))
}

/// Parses a word such as `a b^-1 a^2` over the given generators.
pub fn parse_word(text: &str, generators: &[String]) -> Result<Word, PresentationError> {
  let toks = tokens(text);
  if toks.is_empty() {
    return Ok(Word::identity());
  }
  parse_word_tokens(&toks, generators, 1)
}

pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
  let mut name: Option<String> = None;
  let mut generators: Option<Vec<String>> = None;
  let mut relators = Vec::new();
  let mut rules = Vec::new();
  let mut order = WordOrder::Shortlex;

  for (idx, raw) in text.lines().enumerate() {
    let line_no = idx + 1;
    let line = raw.split('#').next().unwrap_or("");
    let toks = tokens(line);
    let Some(&(kw_col, keyword)) = toks.first() else { continue };
    let rest = &toks[1..];
    match keyword {
      "group" => {
        if rest.len() != 1 {
          return Err(PresentationError::Syntax {
            line: line_no,
            col: kw_col,
            msg: "expected 'group <name>'".into(),
          });
        }
        name = Some(rest[0].1.to_string());
      }
      "order" => {
        order = match rest {
          [(_, "shortlex")] => WordOrder::Shortlex,
          [(_, "recursive")] => WordOrder::Recursive,
          _ => {
            return Err(PresentationError::Syntax {
              line: line_no,
              col: kw_col,
              msg: "expected 'order shortlex' or 'order recursive'".into(),
            })
          }
        };
      }
      "gens" => {
        if generators.is_some() {
          return Err(PresentationError::Syntax {
            line: line_no,
            col: kw_col,
            msg: "generators declared twice".into(),
          });
        }
        let mut gens: Vec<String> = Vec::new();
        for &(col, g) in rest {
          if !is_identifier(g) {
            return Err(PresentationError::Syntax {
              line: line_no,
              col,
              msg: format!("invalid generator name '{g}'"),
            });
          }
          if gens.iter().any(|x| x == g) {
            return Err(PresentationError::DuplicateGenerator { name: g.to_string(), line: line_no });
          }
          gens.push(g.to_string());
        }
        if gens.is_empty() {
          return Err(PresentationError::Syntax {
            line: line_no,
            col: kw_col,
            msg: "at least one generator required".into(),
          });
        }
        generators = Some(gens);
      }
      "rel" | "rule" => {
        let Some(gens) = generators.as_ref() else {
          return Err(PresentationError::Syntax {
            line: line_no,
            col: kw_col,
            msg: "'gens' must come first".into(),
          });
        };
        if keyword == "rel" {
          if rest.is_empty() {
            return Err(PresentationError::Syntax {
              line: line_no,
              col: kw_col,
              msg: "empty relator".into(),
            });
          }
          let w = free_reduce(&parse_word_tokens(rest, gens, line_no)?);
          if w.is_empty() {
            return Err(PresentationError::TrivialRelator { line: line_no });
          }
          relators.push(w);
        } else {
          let Some(arrow) = rest.iter().position(|t| t.1 == "->") else {
            return Err(PresentationError::Syntax {
              line: line_no,
              col: kw_col,
              msg: "expected 'rule <word> -> <word>'".into(),
            });
          };
          let (lhs, rhs) = (&rest[..arrow], &rest[arrow + 1..]);
          if lhs.is_empty() || rhs.is_empty() {
            return Err(PresentationError::Syntax {
              line: line_no,
              col: kw_col,
              msg: "rule sides must be nonempty (write 1 for the identity)".into(),
            });
          }
          rules.push((parse_word_tokens(lhs, gens, line_no)?, parse_word_tokens(rhs, gens, line_no)?));
        }
      }
      other => {
        return Err(PresentationError::Syntax {
          line: line_no,
          col: kw_col,
          msg: format!("unknown statement '{other}'"),
        })
      }
    }
  }

  let generators = generators.ok_or(PresentationError::Syntax {
    line: 1,
    col: 1,
    msg: "missing 'gens' statement".into(),
  })?;
  Ok(Presentation { name: name.unwrap_or_else(|| "G".to_string()), generators, relators, rules, order })
}
