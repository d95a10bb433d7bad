use super::{normalise, NovikovApprox, NovikovError, NovikovRing, EXACT};
use crate::groupring::GrMatrix;

/// A matrix of series. Each entry tracks its own precision; the matrix
/// precision is the minimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovikovMatrix {
  rows: usize,
  cols: usize,
  entries: Vec<NovikovApprox>,
}

impl NovikovMatrix {
  pub fn zeros(n: &NovikovRing, rows: usize, cols: usize) -> Self {
    NovikovMatrix { rows, cols, entries: vec![n.zero(); rows * cols] }
  }

  pub fn identity(n: &NovikovRing, size: usize) -> Self {
    let mut m = Self::zeros(n, size, size);
    for i in 0..size {
      m.set(i, i, n.one());
    }
    m
  }

  pub fn exact(n: &NovikovRing, m: &GrMatrix) -> Self {
    NovikovMatrix {
      rows: m.rows(),
      cols: m.cols(),
      entries: m.entries().map(|(_, _, x)| n.exact(x.clone())).collect(),
    }
  }

  pub fn rows(&self) -> usize {
    self.rows
  }

  pub fn cols(&self) -> usize {
    self.cols
  }

  pub fn shape(&self) -> (usize, usize) {
    (self.rows, self.cols)
  }

  pub fn get(&self, i: usize, j: usize) -> &NovikovApprox {
    &self.entries[i * self.cols + j]
  }

  pub fn set(&mut self, i: usize, j: usize, x: NovikovApprox) {
    self.entries[i * self.cols + j] = x;
  }

  pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &NovikovApprox)> {
    let c = self.cols.max(1);
    self.entries.iter().enumerate().map(move |(k, x)| (k / c, k % c, x))
  }

  /// Minimum precision over the entries (`EXACT` for an empty matrix).
  pub fn precision(&self) -> i64 {
    self.entries.iter().map(NovikovApprox::precision).min().unwrap_or(EXACT)
  }

  /// Minimum valuation lower bound over the entries.
  pub fn lower_bound(&self, n: &NovikovRing) -> i64 {
    self.entries.iter().map(|x| n.lower_bound(x)).min().unwrap_or(EXACT)
  }

  pub fn heads_are_zero(&self) -> bool {
    self.entries.iter().all(NovikovApprox::head_is_zero)
  }

  pub fn mul(&self, n: &NovikovRing, other: &NovikovMatrix, cap: i64) -> NovikovMatrix {
    assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
    let mut out = Self::zeros(n, self.rows, other.cols);
    for i in 0..self.rows {
      for j in 0..other.cols {
        let mut acc = n.zero();
        for k in 0..self.cols {
          let (a, b) = (self.get(i, k), other.get(k, j));
          if a.is_exact() && a.head_is_zero() || b.is_exact() && b.head_is_zero() {
            continue;
          }
          acc = n.add(&acc, &n.mul_capped(a, b, cap));
        }
        out.set(i, j, n.truncate(&acc, cap));
      }
    }
    out
  }

  pub fn add(&self, n: &NovikovRing, other: &NovikovMatrix) -> NovikovMatrix {
    self.zip(other, |a, b| n.add(a, b))
  }

  pub fn sub(&self, n: &NovikovRing, other: &NovikovMatrix) -> NovikovMatrix {
    self.zip(other, |a, b| n.sub(a, b))
  }

  fn zip(
    &self,
    other: &NovikovMatrix,
    f: impl Fn(&NovikovApprox, &NovikovApprox) -> NovikovApprox,
  ) -> NovikovMatrix {
    assert_eq!(self.shape(), other.shape(), "shape mismatch");
    NovikovMatrix {
      rows: self.rows,
      cols: self.cols,
      entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
    }
  }

  pub fn truncate(&self, n: &NovikovRing, kappa: i64) -> NovikovMatrix {
    NovikovMatrix {
      rows: self.rows,
      cols: self.cols,
      entries: self.entries.iter().map(|x| n.truncate(x, kappa)).collect(),
    }
  }

  /// The group ring matrix of heads truncated at `kappa`. Requires every
  /// entry to be known at least to `kappa`.
  pub fn to_group_ring(&self, n: &NovikovRing, kappa: i64) -> Result<GrMatrix, NovikovError> {
    let available = self.precision();
    if available < kappa {
      return Err(NovikovError::InsufficientPrecision { required: kappa, available });
    }
    let mut m = GrMatrix::zeros(n.ctx(), self.rows, self.cols);
    for (i, j, x) in self.entries() {
      m.set(i, j, x.head().truncate(kappa, n.phi()));
    }
    Ok(m)
  }
}

/// `(sum_i A^i) B` truncated at `kappa`. Every entry of `A` must have
/// positive support, so `A^i` has valuation at least `i` and the sum is
/// finite on each level.
pub fn geometric_transform(
  n: &NovikovRing,
  a: &NovikovMatrix,
  b: &NovikovMatrix,
  kappa: i64,
) -> Result<NovikovMatrix, NovikovError> {
  if a.rows() != a.cols() || a.cols() != b.rows() {
    return Err(NovikovError::Shape(format!("{:?} and {:?}", a.shape(), b.shape())));
  }
  for (i, j, x) in a.entries() {
    if n.lower_bound(x) < 1 {
      return Err(NovikovError::NotPositiveSupport { row: i, col: j });
    }
  }
  let cap = normalise(kappa);
  let vb = b.lower_bound(n);
  let mut y = b.truncate(n, cap);
  if vb >= EXACT {
    return Ok(y);
  }
  // sum_{i <= m} A^i B is stable on levels <= kappa once m > kappa - v(B)
  let rounds = (cap - vb).max(0) + 1;
  for _ in 0..rounds {
    let next = b.add(n, &a.mul(n, &y, cap)).truncate(n, cap);
    if next == y {
      break;
    }
    y = next;
  }
  Ok(y)
}
