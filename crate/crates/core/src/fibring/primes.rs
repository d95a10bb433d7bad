use serde::Serialize;

use super::{verify_certificate, Certificate, FibringError};
use crate::chain::ChainComplex;
use crate::coefficients::{
  primes_of_denominators, reduce_mod_p, CoefficientError, CoefficientRing, PrimeSet, Scalar,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModPCheck {
  pub prime: u64,
  pub verified: bool,
}

/// Primes that must be inverted for a rational certificate to make sense,
/// and the re-verifications it implies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeReport {
  pub primes: PrimeSet,
  /// `Z` when no prime is needed, else `Z` localised at `primes`.
  pub localized_ring: CoefficientRing,
  pub localized_verified: bool,
  /// The smallest primes outside the set, each re-verified over `F_p`.
  pub reductions: Vec<ModPCheck>,
}

const SAMPLE_PRIMES: usize = 3;

/// Collects the denominator primes of a verified rational certificate
/// (and of the complex it lives on), then re-verifies the same data over the
/// localisation and over `F_p` for the three smallest primes outside.
pub fn extract_primes(c: &ChainComplex, cert: &Certificate) -> Result<PrimeReport, FibringError> {
  if *cert.ring() != CoefficientRing::Rationals {
    return Err(FibringError::UnverifiedInput(format!(
      "a rational certificate is required, got one over {}",
      cert.ring()
    )));
  }
  if !verify_certificate(c, cert)? {
    return Err(FibringError::UnverifiedInput("the certificate does not verify".into()));
  }
  let from_s = primes_of_denominators(cert.s.iter().flat_map(|m| m.scalars()));
  let from_c = primes_of_denominators(c.boundaries().iter().flat_map(|m| m.scalars()));
  let primes = from_s.union(&from_c);

  let localized_ring =
    if primes.is_empty() { CoefficientRing::Integers } else { CoefficientRing::Localization(primes.clone()) };
  let to_local = |x: &Scalar| -> Result<Scalar, CoefficientError> {
    let q = x.as_rational().expect("rational certificate");
    localized_ring.from_rational(q)
  };
  let local_ctx = c.ctx().with_ring(localized_ring.clone());
  let localized_verified =
    verify_certificate(&c.change_ring(&local_ctx, to_local)?, &cert.change_ring(&local_ctx, to_local)?)?;

  let mut reductions = Vec::new();
  for p in primes.smallest_outside(SAMPLE_PRIMES) {
    let ctx = c.ctx().with_ring(CoefficientRing::prime_field(p)?);
    let f = |x: &Scalar| reduce_mod_p(x, p);
    let verified = verify_certificate(&c.change_ring(&ctx, f)?, &cert.change_ring(&ctx, f)?)?;
    reductions.push(ModPCheck { prime: p, verified });
  }
  Ok(PrimeReport { primes, localized_ring, localized_verified, reductions })
}
