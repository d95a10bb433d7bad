//! Finite-precision arithmetic in the Novikov completion of a group ring.
//!
//! A [`NovikovApprox`] is a group ring element `head` together with a
//! precision `k`: it stands for any series whose terms on levels `<= k`
//! are exactly `head`. Every operation propagates a precision that is
//! provably correct, so a result is never more trusted than its inputs.

mod eliminate;
mod matrix;

use thiserror::Error;

use crate::coefficients::CoefficientError;
use crate::groupring::{GroupRing, GroupRingElement};
use crate::presentation::{Character, Word};

pub use eliminate::{eliminate, replay, solve_left, EliminationRecord, Pivot, RowOp, Solution, StuckReport};
pub use matrix::{geometric_transform, NovikovMatrix};

/// Precision value meaning "known at every level".
pub const EXACT: i64 = i64::MAX / 4;

pub fn is_exact(precision: i64) -> bool {
  precision >= EXACT / 2
}

fn normalise(precision: i64) -> i64 {
  if is_exact(precision) {
    EXACT
  } else {
    precision
  }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NovikovError {
  #[error("insufficient precision: {required} needed, {available} available")]
  InsufficientPrecision { required: i64, available: i64 },
  #[error("leading term {0} is not a single monomial")]
  NonMonomialLeadingTerm(String),
  #[error("cannot invert zero")]
  Zero,
  #[error("entry ({row}, {col}) does not have positive support")]
  NotPositiveSupport { row: usize, col: usize },
  #[error("shape mismatch: {0}")]
  Shape(String),
  #[error(transparent)]
  Coefficient(#[from] CoefficientError),
}

/// A series known exactly on all levels `<= precision`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovikovApprox {
  head: GroupRingElement,
  precision: i64,
}

impl NovikovApprox {
  pub fn head(&self) -> &GroupRingElement {
    &self.head
  }

  pub fn precision(&self) -> i64 {
    self.precision
  }

  pub fn is_exact(&self) -> bool {
    is_exact(self.precision)
  }

  /// True when the head vanishes; the series itself may still be nonzero
  /// above the precision.
  pub fn head_is_zero(&self) -> bool {
    self.head.is_zero()
  }
}

/// The Novikov ring of a group ring with respect to a character.
#[derive(Debug, Clone)]
pub struct NovikovRing {
  ctx: GroupRing,
  phi: Character,
}

impl NovikovRing {
  pub fn new(ctx: GroupRing, phi: Character) -> Self {
    NovikovRing { ctx, phi }
  }

  pub fn ctx(&self) -> &GroupRing {
    &self.ctx
  }

  pub fn phi(&self) -> &Character {
    &self.phi
  }

  pub fn level(&self, w: &Word) -> i64 {
    self.phi.eval(w)
  }

  /// A group ring element viewed as an exactly known series.
  pub fn exact(&self, x: GroupRingElement) -> NovikovApprox {
    NovikovApprox { head: x, precision: EXACT }
  }

  /// The truncation of `x` at `kappa`, known to precision `kappa`.
  pub fn approx(&self, x: &GroupRingElement, kappa: i64) -> NovikovApprox {
    NovikovApprox { head: x.truncate(kappa, &self.phi), precision: normalise(kappa) }
  }

  pub fn zero(&self) -> NovikovApprox {
    self.exact(GroupRingElement::zero(&self.ctx))
  }

  pub fn one(&self) -> NovikovApprox {
    self.exact(GroupRingElement::one(&self.ctx))
  }

  /// A lower bound for the true valuation of the series.
  pub fn lower_bound(&self, x: &NovikovApprox) -> i64 {
    match x.head.valuation(&self.phi) {
      Some(v) => v,
      None if x.is_exact() => EXACT,
      None => x.precision + 1,
    }
  }

  /// Lowers the precision to `kappa` if it is higher.
  pub fn truncate(&self, x: &NovikovApprox, kappa: i64) -> NovikovApprox {
    if kappa >= x.precision {
      x.clone()
    } else {
      self.approx(&x.head, kappa)
    }
  }

  pub fn add(&self, x: &NovikovApprox, y: &NovikovApprox) -> NovikovApprox {
    let p = x.precision.min(y.precision);
    NovikovApprox { head: x.head.add(&y.head).truncate(p, &self.phi), precision: p }
  }

  pub fn sub(&self, x: &NovikovApprox, y: &NovikovApprox) -> NovikovApprox {
    let p = x.precision.min(y.precision);
    NovikovApprox { head: x.head.sub(&y.head).truncate(p, &self.phi), precision: p }
  }

  pub fn neg(&self, x: &NovikovApprox) -> NovikovApprox {
    NovikovApprox { head: x.head.neg(), precision: x.precision }
  }

  /// Precision of a product: an error above level `p_x` in `x` meets at
  /// least valuation `v_y` in `y`, and symmetrically.
  pub fn product_precision(&self, x: &NovikovApprox, y: &NovikovApprox) -> i64 {
    let (vx, vy) = (self.lower_bound(x), self.lower_bound(y));
    normalise((x.precision + vy).min(y.precision + vx))
  }

  /// The product at the best available precision, capped at `cap`.
  pub fn mul_capped(&self, x: &NovikovApprox, y: &NovikovApprox, cap: i64) -> NovikovApprox {
    let p = self.product_precision(x, y).min(normalise(cap));
    if is_exact(p) {
      return NovikovApprox { head: x.head.mul(&y.head), precision: EXACT };
    }
    NovikovApprox { head: x.head.mul_truncated(&y.head, &self.phi, p), precision: p }
  }

  /// The product at precision exactly `kappa`, or an error if the inputs do
  /// not determine it.
  pub fn mul(&self, x: &NovikovApprox, y: &NovikovApprox, kappa: i64) -> Result<NovikovApprox, NovikovError> {
    let available = self.product_precision(x, y);
    if available < kappa {
      return Err(NovikovError::InsufficientPrecision { required: kappa, available });
    }
    Ok(self.mul_capped(x, y, kappa))
  }

  /// Writes the lowest level of `x` as `c g` with `c` a unit, returning
  /// `(level, g, c)`.
  pub fn monomial_lead(
    &self,
    x: &NovikovApprox,
  ) -> Result<(i64, Word, crate::coefficients::Scalar), NovikovError> {
    let Some((v, lead)) = x.head.leading_part(&self.phi) else {
      return Err(if x.is_exact() {
        NovikovError::Zero
      } else {
        NovikovError::InsufficientPrecision { required: x.precision + 1, available: x.precision }
      });
    };
    let Some((g, c)) = lead.as_monomial() else {
      return Err(NovikovError::NonMonomialLeadingTerm(lead.to_string()));
    };
    let ring = self.ctx.ring();
    if !ring.is_unit(c) {
      return Err(NovikovError::NonMonomialLeadingTerm(lead.to_string()));
    }
    Ok((v, g.clone(), c.clone()))
  }

  /// The inverse at the best precision not exceeding `cap`. Writing
  /// `x = c g (1 - a)` with `a` of positive support, the inverse is
  /// `(sum a^i) g^-1 c^-1`; it is known to precision `p_x - 2 v`.
  pub fn invert_capped(&self, x: &NovikovApprox, cap: i64) -> Result<NovikovApprox, NovikovError> {
    let (v, g, c) = self.monomial_lead(x)?;
    let rs = self.ctx.group().rewriting();
    let ring = self.ctx.ring();
    let g_inv = rs.inverse(&g);
    let c_inv = ring.inv(&c)?;
    let target = if x.is_exact() { normalise(cap) } else { (x.precision - 2 * v).min(normalise(cap)) };
    // a = 1 - c^-1 g^-1 x, known to precision p_x - v
    let u = x.head.left_shift(&g_inv).scale(&c_inv);
    let a = GroupRingElement::one(&self.ctx).sub(&u);
    debug_assert!(a.is_positive_support(&self.phi));
    if a.is_zero() && x.is_exact() {
      return Ok(self.exact(GroupRingElement::monomial(&self.ctx, &g_inv, c_inv)));
    }
    if is_exact(target) {
      return Err(NovikovError::InsufficientPrecision { required: EXACT, available: EXACT - 1 });
    }
    let q = target + v;
    let one = GroupRingElement::one(&self.ctx);
    let mut s = if q >= 0 { one.clone() } else { GroupRingElement::zero(&self.ctx) };
    for _ in 0..q.max(0) {
      let next = one.add(&a.mul_truncated(&s, &self.phi, q));
      if next == s {
        break;
      }
      s = next;
    }
    let head = s.right_shift(&g_inv).scale(&c_inv).truncate(target, &self.phi);
    Ok(NovikovApprox { head, precision: target })
  }

  /// The inverse at precision exactly `kappa`.
  pub fn invert(&self, x: &NovikovApprox, kappa: i64) -> Result<NovikovApprox, NovikovError> {
    let y = self.invert_capped(x, kappa)?;
    if y.precision < kappa {
      return Err(NovikovError::InsufficientPrecision { required: kappa, available: y.precision });
    }
    Ok(y)
  }
}
