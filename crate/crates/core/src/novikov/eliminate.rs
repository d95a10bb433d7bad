//! Gauss-Jordan elimination over the Novikov ring using left row
//! operations, restricted to pivots whose lowest level is a single unit
//! monomial (the only entries known to be invertible).

use super::{NovikovApprox, NovikovMatrix, NovikovRing};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pivot {
  pub row: usize,
  pub col: usize,
  pub valuation: i64,
}

/// One left row operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowOp {
  /// `row <- factor * row`
  Scale { row: usize, factor: NovikovApprox },
  /// `target <- target - factor * source`
  Subtract { target: usize, source: usize, factor: NovikovApprox },
}

/// Why elimination stopped before clearing the matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StuckReport {
  pub reason: String,
  pub rows: Vec<usize>,
  pub cols: Vec<usize>,
  /// Nonzero entries of the remaining submatrix as `(row, col, head)`.
  pub entries: Vec<(usize, usize, String)>,
}

#[derive(Debug, Clone)]
pub struct EliminationRecord {
  pub pivots: Vec<Pivot>,
  pub operations: Vec<RowOp>,
  /// Reduced row echelon form: pivot columns are unit vectors.
  pub echelon: NovikovMatrix,
  /// `transform * input = echelon`.
  pub transform: NovikovMatrix,
  pub stuck: Option<StuckReport>,
  pub steps: usize,
}

fn apply(n: &NovikovRing, m: &mut NovikovMatrix, op: &RowOp, cap: i64) {
  match op {
    RowOp::Scale { row, factor } => {
      for j in 0..m.cols() {
        let x = n.mul_capped(factor, m.get(*row, j), cap);
        m.set(*row, j, x);
      }
    }
    RowOp::Subtract { target, source, factor } => {
      for j in 0..m.cols() {
        let src = m.get(*source, j);
        if src.is_exact() && src.head_is_zero() {
          continue;
        }
        let x = n.sub(m.get(*target, j), &n.mul_capped(factor, src, cap));
        m.set(*target, j, n.truncate(&x, cap));
      }
    }
  }
}

/// Applies a transcript to `m`, as [`eliminate`] did.
pub fn replay(n: &NovikovRing, m: &NovikovMatrix, ops: &[RowOp], cap: i64) -> NovikovMatrix {
  let mut out = m.truncate(n, cap);
  for op in ops {
    apply(n, &mut out, op, cap);
  }
  out
}

/// Row-reduces `m` with all products truncated at `cap`. Pivot choice is
/// deterministic: minimal valuation, then smallest `(row, col)`.
pub fn eliminate(n: &NovikovRing, m: &NovikovMatrix, cap: i64, step_cap: usize) -> EliminationRecord {
  let (rows, cols) = m.shape();
  let mut w = m.truncate(n, cap);
  let mut t = NovikovMatrix::identity(n, rows);
  let mut pivots: Vec<Pivot> = Vec::new();
  let mut operations = Vec::new();
  let mut row_used = vec![false; rows];
  let mut col_used = vec![false; cols];
  let mut steps = 0usize;
  let mut stuck = None;

  loop {
    let mut best: Option<(i64, usize, usize)> = None;
    for r in (0..rows).filter(|&r| !row_used[r]) {
      for c in (0..cols).filter(|&c| !col_used[c]) {
        if let Ok((v, _, _)) = n.monomial_lead(w.get(r, c)) {
          if best.is_none_or(|b| (v, r, c) < b) {
            best = Some((v, r, c));
          }
        }
      }
    }
    let Some((v, r, c)) = best else { break };
    if steps + rows > step_cap {
      stuck = Some(StuckReport {
        reason: format!("elimination step cap {step_cap} reached"),
        rows: (0..rows).filter(|&r| !row_used[r]).collect(),
        cols: (0..cols).filter(|&c| !col_used[c]).collect(),
        entries: Vec::new(),
      });
      break;
    }
    let inv = n.invert_capped(w.get(r, c), cap).expect("admissible pivots are invertible");
    let scale = RowOp::Scale { row: r, factor: inv };
    apply(n, &mut w, &scale, cap);
    apply(n, &mut t, &scale, cap);
    // the true pivot is now exactly one
    w.set(r, c, n.one());
    operations.push(scale);
    steps += 1;
    for k in 0..rows {
      let f = w.get(k, c).clone();
      if k == r || f.is_exact() && f.head_is_zero() {
        continue;
      }
      let op = RowOp::Subtract { target: k, source: r, factor: f };
      apply(n, &mut w, &op, cap);
      apply(n, &mut t, &op, cap);
      w.set(k, c, n.zero());
      operations.push(op);
      steps += 1;
    }
    row_used[r] = true;
    col_used[c] = true;
    pivots.push(Pivot { row: r, col: c, valuation: v });
  }

  if stuck.is_none() {
    let free_rows: Vec<usize> = (0..rows).filter(|&r| !row_used[r]).collect();
    let free_cols: Vec<usize> = (0..cols).filter(|&c| !col_used[c]).collect();
    let entries: Vec<(usize, usize, String)> = free_rows
      .iter()
      .flat_map(|&r| free_cols.iter().map(move |&c| (r, c)))
      .filter(|&(r, c)| !w.get(r, c).head_is_zero())
      .map(|(r, c)| (r, c, w.get(r, c).head().to_string()))
      .collect();
    if !entries.is_empty() {
      stuck = Some(StuckReport {
        reason: "no entry of the remaining submatrix has a unit monomial leading term".into(),
        rows: free_rows,
        cols: free_cols,
        entries,
      });
    }
  }
  EliminationRecord { pivots, operations, echelon: w, transform: t, stuck, steps }
}

/// A solution attempt of `x * d = r`.
#[derive(Debug, Clone)]
pub struct Solution {
  pub x: NovikovMatrix,
  /// `r - x * d`; zero heads mean the system is solved at the residual's
  /// precision.
  pub residual: NovikovMatrix,
  pub record: EliminationRecord,
}

impl Solution {
  pub fn solved(&self) -> bool {
    self.residual.heads_are_zero()
  }
}

/// Solves `x * d = r` by reducing `d` and reading `x` off the pivot
/// columns of `r`.
pub fn solve_left(
  n: &NovikovRing,
  d: &NovikovMatrix,
  r: &NovikovMatrix,
  cap: i64,
  step_cap: usize,
) -> Solution {
  assert_eq!(d.cols(), r.cols(), "x * d = r needs matching column counts");
  let record = eliminate(n, d, cap, step_cap);
  let mut y = NovikovMatrix::zeros(n, r.rows(), d.rows());
  for p in &record.pivots {
    for a in 0..r.rows() {
      y.set(a, p.row, n.truncate(r.get(a, p.col), cap));
    }
  }
  let x = y.mul(n, &record.transform, cap);
  let residual = r.sub(n, &x.mul(n, d, cap)).truncate(n, cap);
  Solution { x, residual, record }
}

#[cfg(test)]
mod tests {
  use super::super::tests::novikov;
  use super::*;
  use crate::coefficients::CoefficientRing;
  use crate::groupring::GroupRingElement;

  fn row(n: &NovikovRing, entries: &[&str]) -> NovikovMatrix {
    let mut m = NovikovMatrix::zeros(n, 1, entries.len());
    for (j, s) in entries.iter().enumerate() {
      m.set(0, j, n.exact(GroupRingElement::parse(n.ctx(), s).unwrap()));
    }
    m
  }

  #[test]
  fn single_entry_and_zero() {
    let n = novikov("gens a t\nrel a t a^-1 t^-1", CoefficientRing::Rationals, "a=0,t=1");
    let rec = eliminate(&n, &row(&n, &["1 - t"]), 4, 1000);
    assert_eq!(rec.pivots, vec![Pivot { row: 0, col: 0, valuation: 0 }]);
    assert!(rec.stuck.is_none());
    let rec = eliminate(&n, &NovikovMatrix::zeros(&n, 2, 2), 4, 1000);
    assert!(rec.pivots.is_empty());
    assert!(rec.echelon.heads_are_zero());
    assert!(rec.stuck.is_none());
  }

  #[test]
  fn z2_fox_row() {
    let n = novikov("gens a b\nrel a b a^-1 b^-1", CoefficientRing::Rationals, "a=1,b=0");
    let rec = eliminate(&n, &row(&n, &["1 - b", "a - 1"]), 4, 1000);
    assert_eq!(rec.pivots, vec![Pivot { row: 0, col: 1, valuation: 0 }]);
  }

  #[test]
  fn stuck_on_non_monomial_leading_terms() {
    let n = novikov("gens a b\nrel a b a^-1 b^-1", CoefficientRing::Rationals, "a=1,b=0");
    let rec = eliminate(&n, &row(&n, &["1 - b", "2 + b + a"]), 4, 1000);
    let stuck = rec.stuck.expect("stuck");
    assert_eq!(stuck.cols, vec![0, 1]);
    assert_eq!(stuck.entries.len(), 2);
  }

  #[test]
  fn transcript_replays_and_is_deterministic() {
    let n = novikov("gens a b\nrel a b a^-1 b^-1", CoefficientRing::Rationals, "a=1,b=0");
    let e = |s: &str| n.exact(GroupRingElement::parse(n.ctx(), s).unwrap());
    let mut m = NovikovMatrix::zeros(&n, 3, 3);
    for (i, j, s) in
      [(0, 0, "1 - b"), (0, 2, "a - 1"), (1, 0, "a^-1 + b"), (1, 1, "2"), (2, 1, "b - a"), (2, 2, "1 + a*b")]
    {
      m.set(i, j, e(s));
    }
    let cap = 5;
    let rec = eliminate(&n, &m, cap, 10_000);
    let again = eliminate(&n, &m, cap, 10_000);
    assert_eq!(rec.operations, again.operations);
    assert_eq!(rec.pivots, again.pivots);
    let replayed = replay(&n, &m, &rec.operations, cap);
    let p = rec.echelon.precision().min(replayed.precision());
    assert!(replayed.truncate(&n, p).sub(&n, &rec.echelon.truncate(&n, p)).heads_are_zero());
    let tm = rec.transform.mul(&n, &m, cap);
    let q = tm.precision().min(rec.echelon.precision());
    assert!(tm.sub(&n, &rec.echelon).truncate(&n, q).heads_are_zero());
  }

  #[test]
  fn solves_left_systems() {
    let n = novikov("gens a b\nrel a b a^-1 b^-1", CoefficientRing::Rationals, "a=1,b=0");
    let d = row(&n, &["1 - b", "a - 1"]);
    // r = (1 + a) * d is in the row space
    let factor = n.exact(GroupRingElement::parse(n.ctx(), "1 + a").unwrap());
    let mut r = NovikovMatrix::zeros(&n, 1, 2);
    for j in 0..2 {
      r.set(0, j, n.mul_capped(&factor, d.get(0, j), 10));
    }
    let s = solve_left(&n, &d, &r, 6, 1000);
    assert!(s.solved());
    assert_eq!(s.x.get(0, 0).head(), factor.head());
  }
}
