//! Group rings `RG` of finitely presented groups with a solved word
//! problem, and the character-graded operations on them (valuation,
//! truncation, positive support).
//!
//! Elements are sparse maps from normal-form words to nonzero scalars.
//! Iteration order is shortlex on the normal forms, so every output built
//! from an element is deterministic.

mod element;
mod matrix;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::coefficients::{CoefficientError, CoefficientRing};
use crate::presentation::{Budget, Presentation, PresentationError, RewritingError, RewritingSystem, Word};

pub use element::{GradedSupport, GroupRingElement, Term};
pub use matrix::GrMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupRingError {
  #[error("cannot parse group ring element '{text}': {msg}")]
  Parse { text: String, msg: String },
  #[error(transparent)]
  Coefficient(#[from] CoefficientError),
  #[error(transparent)]
  Presentation(#[from] PresentationError),
  #[error(transparent)]
  Rewriting(#[from] RewritingError),
}

/// A finitely presented group together with a confluent rewriting system
/// solving its word problem.
#[derive(Debug)]
pub struct Group {
  presentation: Presentation,
  rewriting: RewritingSystem,
}

impl Group {
  /// Uses the presentation's own rules if it has any, otherwise runs
  /// Knuth-Bendix within `budget`.
  pub fn new(presentation: Presentation, budget: Budget) -> Result<Group, RewritingError> {
    let rewriting = RewritingSystem::for_presentation(&presentation, budget)?;
    Ok(Group { presentation, rewriting })
  }

  pub fn presentation(&self) -> &Presentation {
    &self.presentation
  }

  pub fn rewriting(&self) -> &RewritingSystem {
    &self.rewriting
  }

  pub fn normal_form(&self, w: &Word) -> Word {
    self.rewriting.normal_form(w)
  }

  pub fn format_word(&self, w: &Word) -> String {
    self.presentation.format_word(w)
  }
}

struct Inner {
  group: Arc<Group>,
  ring: CoefficientRing,
}

/// The group ring `RG`: a shared group plus a coefficient ring. Cloning is
/// cheap.
#[derive(Clone)]
pub struct GroupRing(Arc<Inner>);

impl GroupRing {
  pub fn new(group: Arc<Group>, ring: CoefficientRing) -> GroupRing {
    GroupRing(Arc::new(Inner { group, ring }))
  }

  pub fn group(&self) -> &Arc<Group> {
    &self.0.group
  }

  pub fn ring(&self) -> &CoefficientRing {
    &self.0.ring
  }

  /// The group ring of the same group over another coefficient ring.
  pub fn with_ring(&self, ring: CoefficientRing) -> GroupRing {
    GroupRing::new(self.0.group.clone(), ring)
  }

  pub fn generators(&self) -> &[String] {
    &self.0.group.presentation.generators
  }
}

impl PartialEq for GroupRing {
  fn eq(&self, other: &Self) -> bool {
    Arc::ptr_eq(&self.0.group, &other.0.group) && self.0.ring == other.0.ring
  }
}

impl Eq for GroupRing {}

impl fmt::Debug for GroupRing {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{}[{}]", self.0.ring, self.0.group.presentation.name)
  }
}
