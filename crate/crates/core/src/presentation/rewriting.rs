//! Confluent string rewriting systems for groups and Knuth-Bendix
//! completion.
//!
//! The alphabet is the generators together with their formal inverses
//! (see [`Letter`]). Rules are oriented by a reduction order on words:
//! shortlex by default, or the recursive path ordering, under which
//! `t a -> a^2 t` is decreasing when `a < t`. A system is only ever marked
//! confluent after every critical pair (overlaps and inclusions of
//! left-hand sides) has been checked to resolve.

use std::cmp::Ordering;
use std::collections::VecDeque;

use thiserror::Error;

use super::word::{Letter, Word};
use super::{Presentation, WordDisplay};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewritingError {
  #[error("Knuth-Bendix budget exhausted ({rules} rules, {pairs} critical pairs); supply a rewriting system with 'rule' lines")]
  BudgetExhausted { rules: usize, pairs: usize },
  #[error("rule {0} does not decrease in the word order")]
  NotReducing(String),
  #[error("rewriting system is not confluent: {0} has normal forms {1} and {2}")]
  NotConfluent(String, String, String),
  #[error("relator {0} does not reduce to the identity")]
  RelatorNotTrivial(String),
}

/// Reduction order used to orient rules. Letters are compared in the
/// declared generator order with inverses immediately after generators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum WordOrder {
  #[default]
  Shortlex,
  /// Recursive path ordering reading words from the left: `x u > y v` iff
  /// `u >= y v`, or `x > y` and `x u > v`, or `x = y` and `u > v`.
  Recursive,
}

impl WordOrder {
  pub fn compare(self, u: &Word, v: &Word) -> Ordering {
    match self {
      WordOrder::Shortlex => u.cmp(v),
      WordOrder::Recursive => {
        if u == v {
          Ordering::Equal
        } else if recursive_gt(u.letters(), v.letters()) {
          Ordering::Greater
        } else {
          Ordering::Less
        }
      }
    }
  }

  pub fn name(self) -> &'static str {
    match self {
      WordOrder::Shortlex => "shortlex",
      WordOrder::Recursive => "recursive",
    }
  }
}

/// `u > v` in the recursive path ordering, by dynamic programming over
/// suffix pairs.
fn recursive_gt(u: &[Letter], v: &[Letter]) -> bool {
  let (n, m) = (u.len(), v.len());
  // gt[i][j]: u[i..] > v[j..]
  let mut gt = vec![vec![false; m + 1]; n + 1];
  for i in (0..=n).rev() {
    for j in (0..=m).rev() {
      gt[i][j] = if i == n {
        false
      } else if j == m {
        true
      } else {
        let ge_tail = gt[i + 1][j] || u[i + 1..] == v[j..];
        ge_tail
          || match u[i].cmp(&v[j]) {
            Ordering::Greater => gt[i][j + 1],
            Ordering::Equal => gt[i + 1][j + 1],
            Ordering::Less => false,
          }
      };
    }
  }
  gt[0][0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
  pub max_rules: usize,
  pub max_critical_pairs: usize,
}

impl Default for Budget {
  fn default() -> Self {
    Budget { max_rules: 10_000, max_critical_pairs: 100_000 }
  }
}

const NONE: u32 = u32::MAX;

/// Trie over reversed left-hand sides, so that redexes ending at the top of
/// a stack are found by walking the stack backwards.
#[derive(Debug, Clone)]
struct SuffixTrie {
  alphabet: usize,
  children: Vec<u32>,
  rule: Vec<u32>,
}

impl SuffixTrie {
  fn new(alphabet: usize) -> Self {
    SuffixTrie { alphabet, children: vec![NONE; alphabet], rule: vec![NONE] }
  }

  fn insert(&mut self, lhs: &[Letter], rule: usize) {
    let mut node = 0usize;
    for l in lhs.iter().rev() {
      let slot = node * self.alphabet + l.0 as usize;
      if self.children[slot] == NONE {
        let id = self.rule.len();
        self.rule.push(NONE);
        self.children.extend(std::iter::repeat_n(NONE, self.alphabet));
        self.children[slot] = id as u32;
      }
      node = self.children[slot] as usize;
    }
    self.rule[node] = rule as u32;
  }

  fn remove(&mut self, lhs: &[Letter]) {
    let mut node = 0usize;
    for l in lhs.iter().rev() {
      node = self.children[node * self.alphabet + l.0 as usize] as usize;
    }
    self.rule[node] = NONE;
  }

  /// Shortest rule whose left-hand side is a suffix of `w`.
  fn match_suffix(&self, w: &[Letter]) -> Option<usize> {
    let mut node = 0usize;
    for l in w.iter().rev() {
      let next = self.children[node * self.alphabet + l.0 as usize];
      if next == NONE {
        return None;
      }
      node = next as usize;
      if self.rule[node] != NONE {
        return Some(self.rule[node] as usize);
      }
    }
    None
  }
}

#[derive(Debug, Clone)]
pub struct RewritingSystem {
  num_generators: usize,
  order: WordOrder,
  rules: Vec<(Word, Word)>,
  active: Vec<bool>,
  trie: SuffixTrie,
  confluent: bool,
}

impl RewritingSystem {
  fn empty(num_generators: usize, order: WordOrder) -> Self {
    RewritingSystem {
      num_generators,
      order,
      rules: Vec::new(),
      active: Vec::new(),
      trie: SuffixTrie::new(2 * num_generators),
      confluent: false,
    }
  }

  pub fn num_generators(&self) -> usize {
    self.num_generators
  }

  pub fn is_confluent(&self) -> bool {
    self.confluent
  }

  pub fn order(&self) -> WordOrder {
    self.order
  }

  /// The active rules `lhs -> rhs`, in creation order.
  pub fn rules(&self) -> Vec<(Word, Word)> {
    self.rules.iter().zip(&self.active).filter(|(_, &a)| a).map(|(r, _)| r.clone()).collect()
  }

  fn push_rule(&mut self, lhs: Word, rhs: Word) -> usize {
    let id = self.rules.len();
    self.trie.insert(lhs.letters(), id);
    self.rules.push((lhs, rhs));
    self.active.push(true);
    id
  }

  fn deactivate(&mut self, id: usize) {
    self.active[id] = false;
    let lhs = self.rules[id].0.clone();
    self.trie.remove(lhs.letters());
  }

  /// Rewrites `input` onto an irreducible `stack`, leaving the normal form of
  /// `stack · input` in `stack`.
  fn reduce_onto(&self, stack: &mut Vec<Letter>, input: &[Letter]) {
    let mut pending: Vec<Letter> = input.iter().rev().copied().collect();
    while let Some(l) = pending.pop() {
      stack.push(l);
      if let Some(r) = self.trie.match_suffix(stack) {
        let (lhs, rhs) = &self.rules[r];
        stack.truncate(stack.len() - lhs.len());
        pending.extend(rhs.letters().iter().rev());
      }
    }
  }

  /// Normal form of `w`. Idempotent; for a confluent system, words equal in
  /// the group have equal normal forms.
  pub fn normal_form(&self, w: &Word) -> Word {
    let mut stack = Vec::with_capacity(w.len());
    self.reduce_onto(&mut stack, w.letters());
    Word(stack)
  }

  /// Normal form of `u · v` where `u` is already in normal form.
  pub fn multiply(&self, u: &Word, v: &Word) -> Word {
    let mut stack = u.0.clone();
    self.reduce_onto(&mut stack, v.letters());
    Word(stack)
  }

  pub fn inverse(&self, w: &Word) -> Word {
    self.normal_form(&w.inverse())
  }

  fn is_reducible(&self, w: &Word) -> bool {
    (1..=w.len()).any(|end| self.trie.match_suffix(&w.0[..end]).is_some())
  }

  /// Pairs of words obtained by rewriting a common ancestor in two ways:
  /// proper overlaps of `l1` followed by `l2`, and occurrences of `l2`
  /// inside `l1`.
  fn critical_pairs(&self, i: usize, j: usize) -> Vec<(Word, Word)> {
    let (l1, r1) = &self.rules[i];
    let (l2, r2) = &self.rules[j];
    let (a, b) = (l1.letters(), l2.letters());
    let mut out = Vec::new();
    for k in 1..a.len().min(b.len()) {
      if a[a.len() - k..] == b[..k] {
        let left = r1.concat(&Word(b[k..].to_vec()));
        let right = Word(a[..a.len() - k].to_vec()).concat(r2);
        out.push((left, right));
      }
    }
    if i != j && b.len() <= a.len() {
      for start in 0..=a.len() - b.len() {
        if a[start..start + b.len()] == *b {
          let right = Word(a[..start].to_vec()).concat(r2).concat(&Word(a[start + b.len()..].to_vec()));
          out.push((r1.clone(), right));
        }
      }
    }
    out
  }

  /// Checks that every critical pair between active rules resolves.
  fn check_local_confluence(&self) -> Result<(), (Word, Word, Word)> {
    let ids: Vec<usize> = (0..self.rules.len()).filter(|&i| self.active[i]).collect();
    for &i in &ids {
      for &j in &ids {
        for (u, v) in self.critical_pairs(i, j) {
          let (nu, nv) = (self.normal_form(&u), self.normal_form(&v));
          if nu != nv {
            return Err((u, nu, nv));
          }
        }
      }
    }
    Ok(())
  }

  /// Wraps a hand-written rule set after checking that every rule is
  /// decreasing in the presentation's word order, that free cancellation and the relators reduce to
  /// the identity, and that all critical pairs resolve.
  pub fn from_rules(p: &Presentation) -> Result<RewritingSystem, RewritingError> {
    let mut rs = RewritingSystem::empty(p.num_generators(), p.order);
    let show = |w: &Word| WordDisplay { word: w, names: &p.generators }.to_string();
    for (lhs, rhs) in &p.rules {
      if p.order.compare(lhs, rhs) != Ordering::Greater {
        return Err(RewritingError::NotReducing(format!("{} -> {}", show(lhs), show(rhs))));
      }
      rs.push_rule(lhs.clone(), rhs.clone());
    }
    if let Err((w, a, b)) = rs.check_local_confluence() {
      return Err(RewritingError::NotConfluent(show(&w), show(&a), show(&b)));
    }
    for g in 0..p.num_generators() {
      for inv in [false, true] {
        let l = Letter::new(g, inv);
        let w = Word(vec![l, l.inverse()]);
        if !rs.normal_form(&w).is_empty() {
          return Err(RewritingError::RelatorNotTrivial(show(&w)));
        }
      }
    }
    for r in &p.relators {
      if !rs.normal_form(r).is_empty() {
        return Err(RewritingError::RelatorNotTrivial(show(r)));
      }
    }
    rs.confluent = true;
    Ok(rs)
  }

  /// The hand-written system when the presentation carries one, otherwise
  /// Knuth-Bendix completion within `budget`.
  pub fn for_presentation(p: &Presentation, budget: Budget) -> Result<RewritingSystem, RewritingError> {
    if p.rules.is_empty() {
      knuth_bendix(p, budget)
    } else {
      RewritingSystem::from_rules(p)
    }
  }
}

/// Knuth-Bendix completion under the presentation's word order. Equations
/// are processed first-in first-out, so the result is reproducible.
pub fn knuth_bendix(p: &Presentation, budget: Budget) -> Result<RewritingSystem, RewritingError> {
  let mut rs = RewritingSystem::empty(p.num_generators(), p.order);
  let mut queue: VecDeque<(Word, Word)> = VecDeque::new();
  for g in 0..p.num_generators() {
    for inv in [false, true] {
      let l = Letter::new(g, inv);
      queue.push_back((Word(vec![l, l.inverse()]), Word::identity()));
    }
  }
  for r in &p.relators {
    queue.push_back((r.clone(), Word::identity()));
  }

  let mut pairs = 0usize;
  let mut live_rules = 0usize;
  while let Some((u, v)) = queue.pop_front() {
    let (nu, nv) = (rs.normal_form(&u), rs.normal_form(&v));
    if nu == nv {
      continue;
    }
    let (lhs, rhs) = if p.order.compare(&nu, &nv) == Ordering::Greater { (nu, nv) } else { (nv, nu) };
    let id = rs.push_rule(lhs.clone(), rhs);
    live_rules += 1;

    // Interreduce: retire rules whose left side now reduces, and normalise
    // right-hand sides.
    for j in 0..id {
      if !rs.active[j] {
        continue;
      }
      let lj = rs.rules[j].0.clone();
      let contains = lj.len() >= lhs.len() && lj.0.windows(lhs.len()).any(|w| w == lhs.letters());
      if contains {
        rs.deactivate(j);
        live_rules -= 1;
        let (l, r) = rs.rules[j].clone();
        queue.push_back((l, r));
      }
    }
    for j in 0..id {
      if rs.active[j] && rs.is_reducible(&rs.rules[j].1) {
        let nf = rs.normal_form(&rs.rules[j].1);
        rs.rules[j].1 = nf;
      }
    }

    for j in 0..=id {
      if !rs.active[j] {
        continue;
      }
      for pair in rs.critical_pairs(id, j).into_iter().chain(if j != id {
        rs.critical_pairs(j, id)
      } else {
        Vec::new()
      }) {
        pairs += 1;
        queue.push_back(pair);
      }
    }
    if live_rules > budget.max_rules || pairs > budget.max_critical_pairs {
      return Err(RewritingError::BudgetExhausted { rules: live_rules, pairs });
    }
  }

  if let Err((w, a, b)) = rs.check_local_confluence() {
    let show = |w: &Word| WordDisplay { word: w, names: &p.generators }.to_string();
    return Err(RewritingError::NotConfluent(show(&w), show(&a), show(&b)));
  }
  rs.confluent = true;
  Ok(rs)
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::presentation::{free_reduce, parse_presentation, parse_word};

  fn system(text: &str) -> (Presentation, RewritingSystem) {
    let p = parse_presentation(text).unwrap();
    let rs = RewritingSystem::for_presentation(&p, Budget::default()).unwrap();
    (p, rs)
  }

  fn nf(p: &Presentation, rs: &RewritingSystem, w: &str) -> String {
    p.format_word(&rs.normal_form(&parse_word(w, &p.generators).unwrap()))
  }

  #[test]
  fn z2_completion() {
    let (p, rs) = system("gens a b\nrel a b a^-1 b^-1");
    assert!(rs.is_confluent());
    assert_eq!(nf(&p, &rs, "b a"), "a b");
    assert_eq!(nf(&p, &rs, "b^-1 a^2 b a^-1"), "a");
    assert_eq!(nf(&p, &rs, ""), "1");
    assert_eq!(nf(&p, &rs, "a a^-1 b"), "b");
  }

  #[test]
  fn free_group_has_only_cancellation_rules() {
    let (p, rs) = system("gens a b");
    assert_eq!(rs.rules().len(), 4);
    assert!(rs.rules().iter().all(|(l, r)| l.len() == 2 && r.is_empty()));
    assert_eq!(nf(&p, &rs, "a b b^-1 a"), "a^2");
  }

  #[test]
  fn klein_bottle_normal_forms() {
    let (p, rs) = system("gens a t\nrel t a t^-1 a");
    assert_eq!(nf(&p, &rs, "t a t^-1"), "a^-1");
    assert_eq!(nf(&p, &rs, "a t a"), "t");
  }

  #[test]
  fn relators_reduce_to_identity() {
    for text in [
      "gens a b\nrel a b a^-1 b^-1",
      "gens a t\nrel t a t^-1 a",
      "order recursive\ngens a t\nrel t a t^-1 a^-2",
      "order recursive\ngens y x\nrel x^2 y^-3",
      "order recursive\ngens a b\nrel a^2 b a^-2 b^-1",
      "order recursive\ngens a b c d\nrel a b a^-1 b^-1 c d c^-1 d^-1",
    ] {
      let (p, rs) = system(text);
      for r in &p.relators {
        assert!(rs.normal_form(r).is_empty(), "{text}");
        assert!(rs.normal_form(&r.inverse()).is_empty(), "{text}");
      }
    }
  }

  #[test]
  fn hand_written_system() {
    let p = parse_presentation("gens a b\nrel a b a^-1 b^-1\nrule a a^-1 -> 1\nrule a^-1 a -> 1\nrule b b^-1 -> 1\nrule b^-1 b -> 1\nrule b a -> a b\nrule b a^-1 -> a^-1 b\nrule b^-1 a -> a b^-1\nrule b^-1 a^-1 -> a^-1 b^-1").unwrap();
    let rs = RewritingSystem::for_presentation(&p, Budget::default()).unwrap();
    assert!(rs.is_confluent());
    let bad = parse_presentation("gens a b\nrel a b a^-1 b^-1\nrule a b -> b a").unwrap();
    assert!(matches!(RewritingSystem::from_rules(&bad), Err(RewritingError::NotReducing(_))));
    let incomplete = parse_presentation("gens a b\nrel a b a^-1 b^-1\nrule b a -> a b").unwrap();
    assert!(RewritingSystem::from_rules(&incomplete).is_err());
  }

  #[test]
  fn recursive_order_basics() {
    let gens = ["a".to_string(), "t".to_string()];
    let w = |s: &str| parse_word(s, &gens).unwrap();
    let o = WordOrder::Recursive;
    assert_eq!(o.compare(&w("t a"), &w("a^2 t")), Ordering::Greater);
    assert_eq!(o.compare(&w("a^5"), &w("t")), Ordering::Less);
    assert_eq!(o.compare(&w("a a^-1"), &w("")), Ordering::Greater);
    assert_eq!(o.compare(&w("t a"), &w("t a")), Ordering::Equal);
    assert_eq!(WordOrder::Shortlex.compare(&w("t a"), &w("a^2 t")), Ordering::Less);
  }

  #[test]
  fn bs12_normal_forms() {
    let (p, rs) = system("order recursive\ngens a t\nrel t a t^-1 a^-2");
    assert!(rs.is_confluent());
    assert_eq!(nf(&p, &rs, "t a"), "a^2 t");
    assert_eq!(nf(&p, &rs, "t a t^-1"), "a^2");
    assert_eq!(nf(&p, &rs, "t^-1 a^2 t"), "a");
  }

  #[test]
  fn budget_is_enforced() {
    let p = parse_presentation("gens a t\nrel t a t^-1 a^-2").unwrap();
    let tiny = Budget { max_rules: 2, max_critical_pairs: 3 };
    assert!(matches!(knuth_bendix(&p, tiny), Err(RewritingError::BudgetExhausted { .. })));
  }

  #[test]
  fn normal_form_is_idempotent_and_inverts() {
    let (_, rs) = system("order recursive\ngens a t\nrel t a t^-1 a^-2");
    let words = [vec![0u32, 2, 1, 3, 2, 2, 0], vec![3, 3, 0, 2, 1, 1]];
    for w in words {
      let w = free_reduce(&Word(w.into_iter().map(Letter).collect()));
      let n = rs.normal_form(&w);
      assert_eq!(rs.normal_form(&n), n);
      assert!(rs.normal_form(&w.concat(&w.inverse())).is_empty());
    }
  }
}
