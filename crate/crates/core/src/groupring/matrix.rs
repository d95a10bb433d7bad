use super::{GroupRing, GroupRingElement, Term};
use crate::coefficients::{CoefficientError, Scalar};
use crate::presentation::Character;

/// A dense matrix over a group ring, stored row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GrMatrix {
  ctx: GroupRing,
  rows: usize,
  cols: usize,
  entries: Vec<GroupRingElement>,
}

impl GrMatrix {
  pub fn zeros(ctx: &GroupRing, rows: usize, cols: usize) -> Self {
    GrMatrix { ctx: ctx.clone(), rows, cols, entries: vec![GroupRingElement::zero(ctx); rows * cols] }
  }

  pub fn identity(ctx: &GroupRing, n: usize) -> Self {
    let mut m = Self::zeros(ctx, n, n);
    for i in 0..n {
      m.set(i, i, GroupRingElement::one(ctx));
    }
    m
  }

  /// Builds from rows; all rows must have length `cols`.
  pub fn from_rows(ctx: &GroupRing, cols: usize, rows: Vec<Vec<GroupRingElement>>) -> Self {
    let mut m = Self::zeros(ctx, rows.len(), cols);
    for (i, row) in rows.into_iter().enumerate() {
      assert_eq!(row.len(), cols, "ragged matrix");
      for (j, x) in row.into_iter().enumerate() {
        m.set(i, j, x);
      }
    }
    m
  }

  pub fn ctx(&self) -> &GroupRing {
    &self.ctx
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

  pub fn get(&self, i: usize, j: usize) -> &GroupRingElement {
    &self.entries[i * self.cols + j]
  }

  pub fn set(&mut self, i: usize, j: usize, x: GroupRingElement) {
    self.entries[i * self.cols + j] = x;
  }

  pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &GroupRingElement)> {
    self.entries.iter().enumerate().map(move |(k, x)| (k / self.cols.max(1), k % self.cols.max(1), x))
  }

  pub fn row(&self, i: usize) -> &[GroupRingElement] {
    &self.entries[i * self.cols..(i + 1) * self.cols]
  }

  pub fn mul(&self, other: &GrMatrix) -> GrMatrix {
    assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
    let mut out = Self::zeros(&self.ctx, self.rows, other.cols);
    for i in 0..self.rows {
      for k in 0..self.cols {
        let a = self.get(i, k);
        if a.is_zero() {
          continue;
        }
        for j in 0..other.cols {
          let b = other.get(k, j);
          if !b.is_zero() {
            let sum = out.get(i, j).add(&a.mul(b));
            out.set(i, j, sum);
          }
        }
      }
    }
    out
  }

  fn zip(
    &self,
    other: &GrMatrix,
    f: impl Fn(&GroupRingElement, &GroupRingElement) -> GroupRingElement,
  ) -> GrMatrix {
    assert_eq!(self.shape(), other.shape(), "shape mismatch");
    GrMatrix {
      ctx: self.ctx.clone(),
      rows: self.rows,
      cols: self.cols,
      entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
    }
  }

  pub fn add(&self, other: &GrMatrix) -> GrMatrix {
    self.zip(other, |a, b| a.add(b))
  }

  pub fn sub(&self, other: &GrMatrix) -> GrMatrix {
    self.zip(other, |a, b| a.sub(b))
  }

  pub fn map(&self, f: impl Fn(&GroupRingElement) -> GroupRingElement) -> GrMatrix {
    GrMatrix {
      ctx: self.ctx.clone(),
      rows: self.rows,
      cols: self.cols,
      entries: self.entries.iter().map(f).collect(),
    }
  }

  pub fn transpose(&self) -> GrMatrix {
    let mut entries = Vec::with_capacity(self.entries.len());
    for j in 0..self.cols {
      for i in 0..self.rows {
        entries.push(self.get(i, j).clone());
      }
    }
    GrMatrix { ctx: self.ctx.clone(), rows: self.cols, cols: self.rows, entries }
  }

  /// Transpose with `g -> g^-1` applied entrywise.
  pub fn conjugate_transpose(&self) -> GrMatrix {
    self.transpose().map(GroupRingElement::involution)
  }

  pub fn is_zero(&self) -> bool {
    self.entries.iter().all(GroupRingElement::is_zero)
  }

  pub fn truncate(&self, kappa: i64, phi: &Character) -> GrMatrix {
    self.map(|x| x.truncate(kappa, phi))
  }

  /// Minimum entry valuation; `None` for the zero matrix.
  pub fn valuation(&self, phi: &Character) -> Option<i64> {
    self.entries.iter().filter_map(|x| x.valuation(phi)).min()
  }

  /// The first entry (row-major) without strictly positive support.
  pub fn first_nonpositive(&self, phi: &Character) -> Option<(usize, usize)> {
    self.entries().find(|(_, _, x)| !x.is_positive_support(phi)).map(|(i, j, _)| (i, j))
  }

  pub fn change_ring(
    &self,
    ctx: &GroupRing,
    f: impl Fn(&Scalar) -> Result<Scalar, CoefficientError>,
  ) -> Result<GrMatrix, CoefficientError> {
    let entries = self.entries.iter().map(|x| x.change_ring(ctx, &f)).collect::<Result<Vec<_>, _>>()?;
    Ok(GrMatrix { ctx: ctx.clone(), rows: self.rows, cols: self.cols, entries })
  }

  /// All coefficients, in entry order.
  pub fn scalars(&self) -> impl Iterator<Item = &Scalar> {
    self.entries.iter().flat_map(|x| x.terms().values())
  }

  /// Rows of serialized entries.
  pub fn to_terms(&self, phi: &Character) -> Vec<Vec<Vec<Term>>> {
    (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_terms(phi)).collect()).collect()
  }
}

#[cfg(test)]
mod tests {
  use std::sync::Arc;

  use super::*;
  use crate::coefficients::CoefficientRing;
  use crate::groupring::Group;
  use crate::presentation::{parse_presentation, Budget};

  #[test]
  fn products_and_conjugate_transpose() {
    let p = parse_presentation("gens a b\nrel a b a^-1 b^-1").unwrap();
    let ctx = GroupRing::new(Arc::new(Group::new(p, Budget::default()).unwrap()), CoefficientRing::Integers);
    let e = |s: &str| GroupRingElement::parse(&ctx, s).unwrap();
    let d1 = GrMatrix::from_rows(&ctx, 1, vec![vec![e("a - 1")], vec![e("b - 1")]]);
    let d2 = GrMatrix::from_rows(&ctx, 2, vec![vec![e("1 - b"), e("a - 1")]]);
    assert!(d2.mul(&d1).is_zero());
    let dual = d1.conjugate_transpose();
    assert_eq!(dual.shape(), (1, 2));
    assert_eq!(dual.get(0, 0), &e("a^-1 - 1"));
    assert_eq!(dual.conjugate_transpose(), d1);
    assert!(d1.conjugate_transpose().mul(&d2.conjugate_transpose()).is_zero());
    let id = GrMatrix::identity(&ctx, 2);
    assert_eq!(id.mul(&d1), d1);
  }
}
