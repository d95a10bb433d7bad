//! Positivity certificates for Novikov acyclicity and the fibring verdicts
//! built from them.
//!
//! With chains as row vectors (see [`crate::chain`]) a certificate of
//! length `n` consists of group ring matrices `S_i` of shape
//! `n_i x n_{i+1}`, for `i = 0..=n`, such that every entry of
//!
//! ```text
//! E_i = I - d_i S_{i-1} - S_i d_{i+1}        (S_{-1} = 0)
//! ```
//!
//! has strictly positive support under `phi`. Then `I - E_i` is invertible
//! over the Novikov completion towards `+phi` and `s_i = (sum_k E_i^k) S_i`
//! is a genuine partial contraction, so Novikov homology vanishes up to
//! degree `n`. Checking a certificate is finite, exact group ring
//! arithmetic.

mod flip;
mod json;
mod primes;
mod search;
mod verdict;

pub use flip::{cobound_holds, flip_cobound};
pub use json::{load_certificate, CertificateJson};
pub use primes::{extract_primes, ModPCheck, PrimeReport};
pub use search::{
  certificate_failures, error_matrices, search_certificate, soundness_residual, truncation_shift,
  verify_certificate, SearchOutcome,
};
pub use verdict::{sikorav_verdict, sphere_characters, sphere_sample, DirectionResult, Verdict, VerdictKind};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::ChainError;
use crate::coefficients::{CoefficientError, CoefficientRing};
use crate::groupring::{GrMatrix, GroupRing, GroupRingError};
use crate::novikov::NovikovError;
use crate::presentation::{Character, PresentationError, RewritingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FibringError {
  #[error("shape mismatch: {0}")]
  ShapeMismatch(String),
  #[error("degree {requested} exceeds the top degree {top} of the complex")]
  Degree { requested: usize, top: usize },
  #[error("not a cocycle at precision {0}")]
  NotACocycle(i64),
  #[error("unverified input: {0}")]
  UnverifiedInput(String),
  #[error("no nonzero characters: the abelianization is finite")]
  NoCharacters,
  #[error("malformed certificate: {0}")]
  Certificate(String),
  #[error(transparent)]
  Novikov(#[from] NovikovError),
  #[error(transparent)]
  Coefficient(#[from] CoefficientError),
  #[error(transparent)]
  GroupRing(#[from] GroupRingError),
  #[error(transparent)]
  Chain(#[from] ChainError),
  #[error(transparent)]
  Presentation(#[from] PresentationError),
  #[error(transparent)]
  Rewriting(#[from] RewritingError),
}

/// Caps for [`search_certificate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
  /// Largest relative truncation level tried.
  pub max_precision: i64,
  /// Extra working precision allowed on top of the truncation level.
  pub max_extra_precision: i64,
  /// Row operations per elimination.
  pub step_cap: usize,
}

impl Default for SearchBudget {
  fn default() -> Self {
    SearchBudget { max_precision: 8, max_extra_precision: 32, step_cap: 1_000_000 }
  }
}

/// What a successful search spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetUsed {
  pub precision: i64,
  pub working_precision: i64,
  pub steps: usize,
}

/// A finite witness that Novikov homology over `+phi` vanishes up to
/// `degree`. `s[i]` has shape `n_i x n_{i+1}`; `e[i]` is the stored error
/// matrix, recomputed by the verifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
  pub phi: Character,
  pub degree: usize,
  /// Relative truncation level: `s[i]` keeps the levels below
  /// `precision + truncation_shift(i)`.
  pub precision: i64,
  pub s: Vec<GrMatrix>,
  pub e: Vec<GrMatrix>,
  pub budget_used: BudgetUsed,
}

impl Certificate {
  pub fn ctx(&self) -> &GroupRing {
    self.s[0].ctx()
  }

  pub fn ring(&self) -> &CoefficientRing {
    self.ctx().ring()
  }

  /// The same data read over another character, e.g. a multiple of `phi`.
  pub fn with_character(&self, phi: Character) -> Certificate {
    Certificate { phi, ..self.clone() }
  }

  /// Maps every coefficient through `f` into `ctx`.
  pub fn change_ring(
    &self,
    ctx: &GroupRing,
    f: impl Fn(&crate::coefficients::Scalar) -> Result<crate::coefficients::Scalar, CoefficientError>,
  ) -> Result<Certificate, CoefficientError> {
    let map = |ms: &[GrMatrix]| ms.iter().map(|m| m.change_ring(ctx, &f)).collect::<Result<Vec<_>, _>>();
    Ok(Certificate { s: map(&self.s)?, e: map(&self.e)?, ..self.clone() })
  }
}

/// Why a search gave up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InconclusiveReport {
  pub max_precision_tried: i64,
  /// The degree at which the last attempt failed, if it got that far.
  pub failed_degree: Option<usize>,
  pub reason: String,
  /// Remaining submatrix without admissible pivots, as `(row, col, head)`.
  pub stuck_entries: Vec<(usize, usize, String)>,
}
