//! Finite free chain complexes over a group ring.
//!
//! Chains are row vectors: `C_i = RG^{n_i}` and the boundary `d_i` is an
//! `n_i x n_{i-1}` matrix acting by `x -> x d_i`. Row `j` of `d_i` is the
//! boundary of the `j`-th basis element of `C_i`. Coefficient rings act on
//! the left, so solving for contractions uses left row operations.
//!
//! # Resolution files
//!
//! ```text
//! # Koszul resolution of Z^2 over <a, b | [a, b]>
//! ranks 1 2 1
//! boundary 1
//! a - 1
//! b - 1
//! boundary 2
//! 1 - b, a - 1
//! ```
//!
//! `ranks n0 n1 ... nk` comes first. Each `boundary i` block lists the
//! `n_i * n_{i-1}` entries of `d_i` in row-major order, separated by commas
//! or line breaks. Entries use the group ring syntax `coeff*word +- ...`
//! with letters joined by `*`, for example `2*a*b^-1 - 1`. Whitespace
//! inside entries is ignored and `#` starts a comment.

use thiserror::Error;

use crate::coefficients::{CoefficientError, Scalar};
use crate::groupring::{GrMatrix, GroupRing, GroupRingElement, GroupRingError};
use crate::presentation::{fox_derivative, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
  #[error("resolution file, line {line}: {msg}")]
  Format { line: usize, msg: String },
  #[error("not a complex: d_{lower} d_{upper} is nonzero", lower = .0, upper = .0 + 1)]
  NotAComplex(usize),
  #[error(transparent)]
  Element(#[from] GroupRingError),
}

/// `C_top -> ... -> C_1 -> C_0`, free of finite rank in each degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
  ctx: GroupRing,
  ranks: Vec<usize>,
  /// `boundaries[i - 1]` is `d_i`.
  boundaries: Vec<GrMatrix>,
}

impl ChainComplex {
  /// Builds a complex from `d_1, ..., d_top`, checking shapes (not `dd = 0`).
  pub fn new(ctx: &GroupRing, ranks: Vec<usize>, boundaries: Vec<GrMatrix>) -> Result<Self, ChainError> {
    if ranks.is_empty() || boundaries.len() + 1 != ranks.len() {
      return Err(ChainError::Format {
        line: 0,
        msg: format!("{} ranks need {} boundaries", ranks.len(), ranks.len().saturating_sub(1)),
      });
    }
    for (i, d) in boundaries.iter().enumerate() {
      if d.shape() != (ranks[i + 1], ranks[i]) {
        return Err(ChainError::Format {
          line: 0,
          msg: format!("d_{} has shape {:?}, expected {:?}", i + 1, d.shape(), (ranks[i + 1], ranks[i])),
        });
      }
    }
    Ok(ChainComplex { ctx: ctx.clone(), ranks, boundaries })
  }

  pub fn ctx(&self) -> &GroupRing {
    &self.ctx
  }

  pub fn top(&self) -> usize {
    self.ranks.len() - 1
  }

  pub fn ranks(&self) -> &[usize] {
    &self.ranks
  }

  /// `n_i`, zero outside `0..=top`.
  pub fn rank(&self, i: usize) -> usize {
    self.ranks.get(i).copied().unwrap_or(0)
  }

  /// `d_i : C_i -> C_{i-1}` for any `i >= 0`; zero-size outside the range.
  pub fn boundary(&self, i: usize) -> GrMatrix {
    if i >= 1 && i <= self.top() {
      self.boundaries[i - 1].clone()
    } else {
      GrMatrix::zeros(&self.ctx, self.rank(i), if i == 0 { 0 } else { self.rank(i - 1) })
    }
  }

  pub fn boundaries(&self) -> &[GrMatrix] {
    &self.boundaries
  }

  /// The same complex over another coefficient ring of the same group.
  pub fn change_ring(
    &self,
    ctx: &GroupRing,
    f: impl Fn(&Scalar) -> Result<Scalar, CoefficientError>,
  ) -> Result<ChainComplex, CoefficientError> {
    let boundaries = self.boundaries.iter().map(|d| d.change_ring(ctx, &f)).collect::<Result<Vec<_>, _>>()?;
    Ok(ChainComplex { ctx: ctx.clone(), ranks: self.ranks.clone(), boundaries })
  }

  /// Renders the complex in the resolution file format.
  pub fn to_text(&self) -> String {
    let mut out =
      format!("ranks {}\n", self.ranks.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" "));
    for (i, d) in self.boundaries.iter().enumerate() {
      out.push_str(&format!("boundary {}\n", i + 1));
      for r in 0..d.rows() {
        out.push_str(&d.row(r).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
        out.push('\n');
      }
    }
    out
  }
}

/// The first degree `i` with `d_{i+1} d_i != 0`, if any.
pub fn first_failure(c: &ChainComplex) -> Option<usize> {
  (1..c.top()).find(|&i| !c.boundaries[i].mul(&c.boundaries[i - 1]).is_zero())
}

/// True iff every composite of consecutive boundaries vanishes exactly.
pub fn verify_complex(c: &ChainComplex) -> bool {
  first_failure(c).is_none()
}

fn free_to_group_ring(ctx: &GroupRing, x: &crate::presentation::FreeGroupRingElement) -> GroupRingElement {
  let mut out = GroupRingElement::zero(ctx);
  for (w, c) in &x.terms {
    out = out.add(&GroupRingElement::monomial(ctx, w, ctx.ring().from_i64(*c)));
  }
  out
}

/// The cellular chain complex of the universal cover of the presentation
/// 2-complex: `d_1` is the column `(x_j - 1)` and `d_2` the Fox Jacobian
/// (one row per relator). Without relators the complex stops in degree 1.
pub fn presentation_complex(ctx: &GroupRing) -> ChainComplex {
  let p = ctx.group().presentation();
  let k = p.num_generators();
  let mut d1 = GrMatrix::zeros(ctx, k, 1);
  for j in 0..k {
    let x = GroupRingElement::group_element(ctx, &Word::letter(Letter::new(j, false)));
    d1.set(j, 0, x.sub(&GroupRingElement::one(ctx)));
  }
  if p.relators.is_empty() {
    return ChainComplex { ctx: ctx.clone(), ranks: vec![1, k], boundaries: vec![d1] };
  }
  let mut d2 = GrMatrix::zeros(ctx, p.relators.len(), k);
  for (i, r) in p.relators.iter().enumerate() {
    for j in 0..k {
      d2.set(i, j, free_to_group_ring(ctx, &fox_derivative(r, j)));
    }
  }
  ChainComplex { ctx: ctx.clone(), ranks: vec![1, k, p.relators.len()], boundaries: vec![d1, d2] }
}

/// The dual complex `Hom(C, RG)` made into left modules through
/// `g -> g^-1`. Cochains are again row vectors and the coboundary from
/// degree `i` is `d_{i+1}^*`, the transpose of `d_{i+1}` with the involution
/// applied entrywise. Support flips sign: `phi(g^-1) = -phi(g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainData {
  ctx: GroupRing,
  ranks: Vec<usize>,
  /// `coboundaries[i]` is `d_{i+1}^*`, of shape `n_i x n_{i+1}`.
  coboundaries: Vec<GrMatrix>,
}

impl CochainData {
  pub fn ranks(&self) -> &[usize] {
    &self.ranks
  }

  /// `delta^i : C^i -> C^{i+1}`; zero-size beyond the top.
  pub fn coboundary(&self, i: usize) -> GrMatrix {
    self
      .coboundaries
      .get(i)
      .cloned()
      .unwrap_or_else(|| GrMatrix::zeros(&self.ctx, self.ranks.get(i).copied().unwrap_or(0), 0))
  }

  pub fn coboundaries(&self) -> &[GrMatrix] {
    &self.coboundaries
  }

  /// Undoes [`dualize`].
  pub fn predual(&self) -> ChainComplex {
    ChainComplex {
      ctx: self.ctx.clone(),
      ranks: self.ranks.clone(),
      boundaries: self.coboundaries.iter().map(GrMatrix::conjugate_transpose).collect(),
    }
  }

  /// True iff consecutive coboundaries compose to zero.
  pub fn is_complex(&self) -> bool {
    self.coboundaries.windows(2).all(|w| w[0].mul(&w[1]).is_zero())
  }
}

pub fn dualize(c: &ChainComplex) -> CochainData {
  CochainData {
    ctx: c.ctx.clone(),
    ranks: c.ranks.clone(),
    coboundaries: c.boundaries.iter().map(GrMatrix::conjugate_transpose).collect(),
  }
}

type Block = (usize, usize, Vec<(usize, String)>);

/// Parses a resolution file over `ctx` and checks `dd = 0`.
pub fn load_resolution(ctx: &GroupRing, text: &str) -> Result<ChainComplex, ChainError> {
  let mut ranks: Option<(usize, Vec<usize>)> = None;
  // (degree, rows, numbered entry lines)
  let mut blocks: Vec<Block> = Vec::new();
  for (idx, raw) in text.lines().enumerate() {
    let line_no = idx + 1;
    let line = raw.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
      continue;
    }
    let mut words = line.split_whitespace();
    match words.next() {
      Some("ranks") => {
        if ranks.is_some() {
          return Err(ChainError::Format { line: line_no, msg: "ranks given twice".into() });
        }
        let r = words.map(|w| w.parse::<usize>()).collect::<Result<Vec<_>, _>>().map_err(|_| {
          ChainError::Format { line: line_no, msg: "ranks must be nonnegative integers".into() }
        })?;
        if r.is_empty() {
          return Err(ChainError::Format { line: line_no, msg: "at least one rank required".into() });
        }
        ranks = Some((line_no, r));
      }
      Some("boundary") => {
        if ranks.is_none() {
          return Err(ChainError::Format { line: line_no, msg: "'ranks' must come first".into() });
        }
        let degree: usize = match (words.next().map(str::parse), words.next()) {
          (Some(Ok(d)), None) => d,
          _ => return Err(ChainError::Format { line: line_no, msg: "expected 'boundary <degree>'".into() }),
        };
        let expected = blocks.len() + 1;
        if degree != expected {
          return Err(ChainError::Format {
            line: line_no,
            msg: format!("expected boundary {expected}, found {degree}"),
          });
        }
        blocks.push((line_no, degree, Vec::new()));
      }
      Some(_) => {
        let Some(block) = blocks.last_mut() else {
          return Err(ChainError::Format { line: line_no, msg: "entries outside a boundary block".into() });
        };
        for entry in line.split(',') {
          if entry.trim().is_empty() {
            return Err(ChainError::Format { line: line_no, msg: "empty entry".into() });
          }
          block.2.push((line_no, entry.to_string()));
        }
      }
      None => {}
    }
  }
  let Some((ranks_line, ranks)) = ranks else {
    return Err(ChainError::Format { line: 1, msg: "missing 'ranks' line".into() });
  };
  if blocks.len() + 1 != ranks.len() {
    return Err(ChainError::Format {
      line: ranks_line,
      msg: format!("{} ranks need {} boundary blocks, found {}", ranks.len(), ranks.len() - 1, blocks.len()),
    });
  }
  let mut boundaries = Vec::new();
  for (line_no, degree, entries) in blocks {
    let (rows, cols) = (ranks[degree], ranks[degree - 1]);
    if entries.len() != rows * cols {
      return Err(ChainError::Format {
        line: line_no,
        msg: format!(
          "boundary {degree} needs {} entries ({rows} x {cols}), found {}",
          rows * cols,
          entries.len()
        ),
      });
    }
    let mut d = GrMatrix::zeros(ctx, rows, cols);
    for (k, (entry_line, text)) in entries.iter().enumerate() {
      let x = GroupRingElement::parse(ctx, text)
        .map_err(|e| ChainError::Format { line: *entry_line, msg: e.to_string() })?;
      d.set(k / cols, k % cols, x);
    }
    boundaries.push(d);
  }
  let c = ChainComplex::new(ctx, ranks, boundaries)?;
  if let Some(i) = first_failure(&c) {
    return Err(ChainError::NotAComplex(i));
  }
  Ok(c)
}
