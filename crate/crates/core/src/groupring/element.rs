use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GroupRing, GroupRingError};
use crate::coefficients::{parse_rational, CoefficientError, Scalar};
use crate::presentation::{parse_word, Character, Word};

/// One serialized term of an element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
  pub word: String,
  pub coeff: String,
}

/// A finite sum of group elements with nonzero coefficients. Keys are normal
/// forms for the context's rewriting system.
#[derive(Clone)]
pub struct GroupRingElement {
  ctx: GroupRing,
  terms: BTreeMap<Word, Scalar>,
}

/// The decomposition of an element by character level, lowest level first.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedSupport {
  pub levels: Vec<(i64, GroupRingElement)>,
}

impl PartialEq for GroupRingElement {
  fn eq(&self, other: &Self) -> bool {
    self.terms == other.terms
  }
}

impl Eq for GroupRingElement {}

impl fmt::Debug for GroupRingElement {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{self}")
  }
}

impl GroupRingElement {
  pub fn zero(ctx: &GroupRing) -> Self {
    GroupRingElement { ctx: ctx.clone(), terms: BTreeMap::new() }
  }

  pub fn one(ctx: &GroupRing) -> Self {
    Self::scalar(ctx, ctx.ring().one())
  }

  pub fn from_i64(ctx: &GroupRing, n: i64) -> Self {
    Self::scalar(ctx, ctx.ring().from_i64(n))
  }

  pub fn scalar(ctx: &GroupRing, c: Scalar) -> Self {
    Self::monomial(ctx, &Word::identity(), c)
  }

  /// `c * w`, with `w` brought to normal form.
  pub fn monomial(ctx: &GroupRing, w: &Word, c: Scalar) -> Self {
    let mut out = Self::zero(ctx);
    let nf = ctx.group().normal_form(w);
    out.accumulate(nf, c);
    out
  }

  pub fn group_element(ctx: &GroupRing, w: &Word) -> Self {
    Self::monomial(ctx, w, ctx.ring().one())
  }

  pub fn ctx(&self) -> &GroupRing {
    &self.ctx
  }

  pub fn terms(&self) -> &BTreeMap<Word, Scalar> {
    &self.terms
  }

  pub fn num_terms(&self) -> usize {
    self.terms.len()
  }

  pub fn is_zero(&self) -> bool {
    self.terms.is_empty()
  }

  pub fn is_one(&self) -> bool {
    self.terms.len() == 1
      && self.terms.iter().next().is_some_and(|(w, c)| w.is_empty() && self.ctx.ring().is_one(c))
  }

  /// The single `(word, coefficient)` pair if this is a nonzero monomial.
  pub fn as_monomial(&self) -> Option<(&Word, &Scalar)> {
    if self.terms.len() == 1 {
      self.terms.iter().next()
    } else {
      None
    }
  }

  pub fn coefficient(&self, w: &Word) -> Option<&Scalar> {
    self.terms.get(w)
  }

  /// Adds `c * w` where `w` is already a normal form.
  fn accumulate(&mut self, w: Word, c: Scalar) {
    let ring = self.ctx.ring();
    if ring.is_zero(&c) {
      return;
    }
    match self.terms.get_mut(&w) {
      Some(existing) => {
        let sum = ring.add(existing, &c);
        if ring.is_zero(&sum) {
          self.terms.remove(&w);
        } else {
          *existing = sum;
        }
      }
      None => {
        self.terms.insert(w, c);
      }
    }
  }

  pub fn add(&self, other: &Self) -> Self {
    let mut out = self.clone();
    for (w, c) in &other.terms {
      out.accumulate(w.clone(), c.clone());
    }
    out
  }

  pub fn neg(&self) -> Self {
    let ring = self.ctx.ring();
    GroupRingElement {
      ctx: self.ctx.clone(),
      terms: self.terms.iter().map(|(w, c)| (w.clone(), ring.neg(c))).collect(),
    }
  }

  pub fn sub(&self, other: &Self) -> Self {
    let mut out = self.clone();
    let ring = self.ctx.ring();
    for (w, c) in &other.terms {
      out.accumulate(w.clone(), ring.neg(c));
    }
    out
  }

  /// Multiplication by a scalar (coefficients are central).
  pub fn scale(&self, c: &Scalar) -> Self {
    let ring = self.ctx.ring();
    let mut out = Self::zero(&self.ctx);
    for (w, a) in &self.terms {
      out.accumulate(w.clone(), ring.mul(a, c));
    }
    out
  }

  /// Left multiplication by a group element given as a normal form.
  pub fn left_shift(&self, g: &Word) -> Self {
    let rs = self.ctx.group().rewriting();
    let mut out = Self::zero(&self.ctx);
    for (w, a) in &self.terms {
      out.accumulate(rs.multiply(g, w), a.clone());
    }
    out
  }

  /// Right multiplication by a group element given as a word.
  pub fn right_shift(&self, g: &Word) -> Self {
    let rs = self.ctx.group().rewriting();
    let mut out = Self::zero(&self.ctx);
    for (w, a) in &self.terms {
      out.accumulate(rs.multiply(w, g), a.clone());
    }
    out
  }

  /// Convolution product, renormalising every product of words.
  pub fn mul(&self, other: &Self) -> Self {
    let rs = self.ctx.group().rewriting();
    let ring = self.ctx.ring();
    let mut out = Self::zero(&self.ctx);
    for (u, a) in &self.terms {
      for (v, b) in &other.terms {
        out.accumulate(rs.multiply(u, v), ring.mul(a, b));
      }
    }
    out
  }

  /// The part of `self * other` on levels `<= kappa`. Exact, since levels
  /// add under multiplication.
  pub fn mul_truncated(&self, other: &Self, phi: &Character, kappa: i64) -> Self {
    let rs = self.ctx.group().rewriting();
    let ring = self.ctx.ring();
    let mut right: Vec<(i64, &Word, &Scalar)> =
      other.terms.iter().map(|(w, c)| (phi.eval(w), w, c)).collect();
    right.sort_by_key(|t| t.0);
    let mut out = Self::zero(&self.ctx);
    for (u, a) in &self.terms {
      let lu = phi.eval(u);
      for &(lv, v, b) in &right {
        if lu.saturating_add(lv) > kappa {
          break;
        }
        out.accumulate(rs.multiply(u, v), ring.mul(a, b));
      }
    }
    out
  }

  /// Minimal character value on the support; `None` stands for `+infinity`.
  pub fn valuation(&self, phi: &Character) -> Option<i64> {
    self.terms.keys().map(|w| phi.eval(w)).min()
  }

  /// Largest character value on the support.
  pub fn top_level(&self, phi: &Character) -> Option<i64> {
    self.terms.keys().map(|w| phi.eval(w)).max()
  }

  /// Keeps exactly the terms on levels `<= kappa`.
  pub fn truncate(&self, kappa: i64, phi: &Character) -> Self {
    GroupRingElement {
      ctx: self.ctx.clone(),
      terms: self
        .terms
        .iter()
        .filter(|(w, _)| phi.eval(w) <= kappa)
        .map(|(w, c)| (w.clone(), c.clone()))
        .collect(),
    }
  }

  /// The complement of [`truncate`](Self::truncate): terms on levels `> kappa`.
  pub fn tail(&self, kappa: i64, phi: &Character) -> Self {
    GroupRingElement {
      ctx: self.ctx.clone(),
      terms: self
        .terms
        .iter()
        .filter(|(w, _)| phi.eval(w) > kappa)
        .map(|(w, c)| (w.clone(), c.clone()))
        .collect(),
    }
  }

  /// True iff every support element has strictly positive level; vacuous
  /// for zero.
  pub fn is_positive_support(&self, phi: &Character) -> bool {
    self.terms.keys().all(|w| phi.eval(w) > 0)
  }

  /// The lowest level together with the part of the element living there.
  pub fn leading_part(&self, phi: &Character) -> Option<(i64, GroupRingElement)> {
    let v = self.valuation(phi)?;
    Some((v, self.level_part(v, phi)))
  }

  pub fn level_part(&self, level: i64, phi: &Character) -> Self {
    GroupRingElement {
      ctx: self.ctx.clone(),
      terms: self
        .terms
        .iter()
        .filter(|(w, _)| phi.eval(w) == level)
        .map(|(w, c)| (w.clone(), c.clone()))
        .collect(),
    }
  }

  pub fn graded_support(&self, phi: &Character) -> GradedSupport {
    let mut levels: BTreeMap<i64, GroupRingElement> = BTreeMap::new();
    for (w, c) in &self.terms {
      levels.entry(phi.eval(w)).or_insert_with(|| Self::zero(&self.ctx)).terms.insert(w.clone(), c.clone());
    }
    GradedSupport { levels: levels.into_iter().collect() }
  }

  /// The anti-automorphism induced by `g -> g^-1`, coefficients unchanged.
  pub fn involution(&self) -> Self {
    let rs = self.ctx.group().rewriting();
    let mut out = Self::zero(&self.ctx);
    for (w, c) in &self.terms {
      out.accumulate(rs.inverse(w), c.clone());
    }
    out
  }

  /// Moves the element to another coefficient ring of the same group.
  pub fn change_ring(
    &self,
    ctx: &GroupRing,
    f: impl Fn(&Scalar) -> Result<Scalar, CoefficientError>,
  ) -> Result<Self, CoefficientError> {
    let mut out = Self::zero(ctx);
    for (w, c) in &self.terms {
      out.accumulate(w.clone(), f(c)?);
    }
    Ok(out)
  }

  /// Serialized terms sorted by (level, shortlex).
  pub fn to_terms(&self, phi: &Character) -> Vec<Term> {
    let p = self.ctx.group().presentation();
    let mut keyed: Vec<(i64, &Word, &Scalar)> = self.terms.iter().map(|(w, c)| (phi.eval(w), w, c)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    keyed.into_iter().map(|(_, w, c)| Term { word: p.format_word(w), coeff: c.to_string() }).collect()
  }

  pub fn from_terms(ctx: &GroupRing, terms: &[Term]) -> Result<Self, GroupRingError> {
    let mut out = Self::zero(ctx);
    for t in terms {
      let w = parse_word(&t.word, ctx.generators())?;
      let c = ctx.ring().parse_scalar(&t.coeff)?;
      let nf = ctx.group().normal_form(&w);
      out.accumulate(nf, c);
    }
    Ok(out)
  }

  /// Parses the `coeff*word +- ...` syntax, for example `2*a*b^-1 - 1/2*b + 1`.
  /// Factors of a term are separated by `*`; each is a rational literal or
  /// a letter `x` / `x^n`. Whitespace is ignored.
  pub fn parse(ctx: &GroupRing, text: &str) -> Result<Self, GroupRingError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = |msg: &str| GroupRingError::Parse { text: text.to_string(), msg: msg.to_string() };
    if compact.is_empty() {
      return Err(err("empty element"));
    }
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let mut prev: Option<char> = None;
    for ch in compact.chars() {
      if (ch == '+' || ch == '-') && prev != Some('^') {
        if !current.is_empty() {
          pieces.push((negative, std::mem::take(&mut current)));
        } else if prev.is_some() {
          return Err(err("dangling sign"));
        }
        negative = ch == '-';
      } else {
        current.push(ch);
      }
      prev = Some(ch);
    }
    if current.is_empty() {
      return Err(err("trailing sign"));
    }
    pieces.push((negative, current));

    let ring = ctx.ring();
    let mut out = Self::zero(ctx);
    for (negative, piece) in pieces {
      let mut coeff = parse_rational("1").expect("literal");
      let mut word = Word::identity();
      for factor in piece.split('*') {
        if factor.is_empty() {
          return Err(err("empty factor"));
        }
        if factor.starts_with(|c: char| c.is_ascii_digit()) {
          coeff *= parse_rational(factor)?;
        } else {
          word = word.concat(&parse_word(factor, ctx.generators())?);
        }
      }
      if negative {
        coeff = -coeff;
      }
      let c = ring.from_rational(&coeff)?;
      let nf = ctx.group().normal_form(&word);
      out.accumulate(nf, c);
    }
    Ok(out)
  }
}

fn format_factor_word(w: &Word, names: &[String]) -> String {
  w.syllables()
    .into_iter()
    .map(|(g, e)| if e == 1 { names[g].clone() } else { format!("{}^{}", names[g], e) })
    .collect::<Vec<_>>()
    .join("*")
}

/// Prints in the syntax read by [`GroupRingElement::parse`].
impl fmt::Display for GroupRingElement {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if self.terms.is_empty() {
      return write!(f, "0");
    }
    let names = self.ctx.generators();
    for (i, (w, c)) in self.terms.iter().enumerate() {
      let (negative, magnitude) = match c {
        Scalar::Rational(q) if q < &num_rational::BigRational::from_integer(0.into()) => {
          (true, Scalar::Rational(-q.clone()))
        }
        _ => (false, c.clone()),
      };
      if i == 0 {
        if negative {
          write!(f, "-")?;
        }
      } else {
        write!(f, "{}", if negative { " - " } else { " + " })?;
      }
      let one = self.ctx.ring().is_one(&magnitude);
      match (w.is_empty(), one) {
        (true, _) => write!(f, "{magnitude}")?,
        (false, true) => write!(f, "{}", format_factor_word(w, names))?,
        (false, false) => write!(f, "{magnitude}*{}", format_factor_word(w, names))?,
      }
    }
    Ok(())
  }
}

#[cfg(test)]
mod tests {
  use std::sync::Arc;

  use super::*;
  use crate::coefficients::CoefficientRing;
  use crate::groupring::Group;
  use crate::presentation::{parse_character, parse_presentation, Budget};

  fn ring(text: &str, r: CoefficientRing) -> GroupRing {
    let p = parse_presentation(text).unwrap();
    GroupRing::new(Arc::new(Group::new(p, Budget::default()).unwrap()), r)
  }

  fn z2() -> GroupRing {
    ring("gens a b\nrel a b a^-1 b^-1", CoefficientRing::Rationals)
  }

  fn el(ctx: &GroupRing, s: &str) -> GroupRingElement {
    GroupRingElement::parse(ctx, s).unwrap()
  }

  #[test]
  fn products_in_z2() {
    let ctx = z2();
    assert_eq!(el(&ctx, "1 - a").mul(&el(&ctx, "1 + a")), el(&ctx, "1 - a^2"));
    let x = el(&ctx, "2*a*b^-1 - 1/3*b");
    assert_eq!(x.mul(&GroupRingElement::one(&ctx)), x);
    assert_eq!(el(&ctx, "b*a"), el(&ctx, "a*b"));
  }

  #[test]
  fn bs12_rewrites_t_a() {
    let ctx = ring("order recursive\ngens a t\nrel t a t^-1 a^-2", CoefficientRing::Integers);
    let prod = el(&ctx, "t").mul(&el(&ctx, "a"));
    assert_eq!(prod.to_string(), "a^2*t");
  }

  #[test]
  fn valuation_truncation_support() {
    let ctx = ring("gens a t\nrel a t a^-1 t^-1", CoefficientRing::Rationals);
    let p = ctx.group().presentation().clone();
    let phi = parse_character("a=0,t=1", &p).unwrap();
    assert_eq!(el(&ctx, "t + t^2").valuation(&phi), Some(1));
    assert_eq!(GroupRingElement::zero(&ctx).valuation(&phi), None);
    assert_eq!(el(&ctx, "a + t^-1").valuation(&phi), Some(-1));
    assert_eq!(el(&ctx, "1 + t + t^2").truncate(1, &phi), el(&ctx, "1 + t"));
    assert!(el(&ctx, "t^3").truncate(1, &phi).is_zero());
    assert!(el(&ctx, "t").is_positive_support(&phi));
    assert!(!el(&ctx, "1 + t").is_positive_support(&phi));
    assert!(GroupRingElement::zero(&ctx).is_positive_support(&phi));
    let g = el(&ctx, "a*t^-1 + 2 + t^2 - a^3").graded_support(&phi);
    assert_eq!(g.levels.iter().map(|l| l.0).collect::<Vec<_>>(), vec![-1, 0, 2]);
  }

  #[test]
  fn parse_display_round_trip() {
    let ctx = z2();
    for s in ["2*a*b^-1 - 1/3*b + 1", "-a^2", "0", "a^-1*b^-2 - 7"] {
      let x = el(&ctx, s);
      assert_eq!(el(&ctx, &x.to_string()), x, "{s}");
    }
    assert!(GroupRingElement::parse(&ctx, "2*c").is_err());
    assert!(GroupRingElement::parse(&ctx, "a +").is_err());
    assert!(GroupRingElement::parse(&ctx, "a**b").is_err());
    let zint = ring("gens a", CoefficientRing::Integers);
    assert!(GroupRingElement::parse(&zint, "1/2*a").is_err());
  }

  #[test]
  fn involution_and_terms() {
    let ctx = z2();
    let p = ctx.group().presentation().clone();
    let phi = parse_character("a=1,b=0", &p).unwrap();
    let x = el(&ctx, "a - 1 + 3*a^-1*b");
    assert_eq!(x.involution(), el(&ctx, "a^-1 - 1 + 3*a*b^-1"));
    assert_eq!(x.involution().involution(), x);
    let terms = x.to_terms(&phi);
    assert_eq!(terms[0], Term { word: "a^-1 b".into(), coeff: "3".into() });
    assert_eq!(GroupRingElement::from_terms(&ctx, &terms).unwrap(), x);
  }

  #[test]
  fn mul_truncated_matches_truncated_mul() {
    let ctx = z2();
    let p = ctx.group().presentation().clone();
    let phi = parse_character("a=1,b=0", &p).unwrap();
    let x = el(&ctx, "a^-1 + b + 2*a^2");
    let y = el(&ctx, "1 - a*b + a^3");
    for k in -2..5 {
      assert_eq!(x.mul_truncated(&y, &phi, k), x.mul(&y).truncate(k, &phi));
    }
  }
}
