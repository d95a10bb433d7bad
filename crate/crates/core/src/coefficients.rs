//! Exact coefficient rings: the rationals, prime fields, the integers and
//! localisations of the integers at finitely many primes.
//!
//! Localisations are represented as rationals with a membership and unit
//! check rather than a dedicated normal form; membership is decided by
//! stripping the allowed primes off the denominator.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoefficientError {
  #[error("{0} is not a unit of {1}")]
  NotAUnit(String, String),
  #[error("denominator of {0} is divisible by {1}")]
  DenominatorDivisible(String, u64),
  #[error("{0} is not prime")]
  NotPrime(u64),
  #[error("{0} is not an element of {1}")]
  NotInRing(String, String),
  #[error("cannot parse coefficient '{0}'")]
  Parse(String),
  #[error("unknown field selector '{0}' (expected Q, Fp:<p>, Z or Zloc:<p1,p2,...>)")]
  Selector(String),
}

/// Deterministic primality test for 64-bit integers (trial division; the
/// primes that occur here are small).
pub fn is_prime(n: u64) -> bool {
  if n < 2 {
    return false;
  }
  if n < 4 {
    return true;
  }
  if n.is_multiple_of(2) {
    return false;
  }
  let mut d = 3u64;
  while d.saturating_mul(d) <= n {
    if n.is_multiple_of(d) {
      return false;
    }
    d += 2;
  }
  true
}

/// A finite, sorted set of distinct primes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeSet(Vec<u64>);

impl PrimeSet {
  pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Self, CoefficientError> {
    let mut v: Vec<u64> = primes.into_iter().collect();
    if let Some(&p) = v.iter().find(|&&p| !is_prime(p)) {
      return Err(CoefficientError::NotPrime(p));
    }
    v.sort_unstable();
    v.dedup();
    Ok(PrimeSet(v))
  }

  pub fn empty() -> Self {
    PrimeSet(Vec::new())
  }

  pub fn primes(&self) -> &[u64] {
    &self.0
  }

  pub fn contains(&self, p: u64) -> bool {
    self.0.binary_search(&p).is_ok()
  }

  pub fn is_empty(&self) -> bool {
    self.0.is_empty()
  }

  pub fn union(&self, other: &PrimeSet) -> PrimeSet {
    let mut v = self.0.clone();
    v.extend_from_slice(&other.0);
    v.sort_unstable();
    v.dedup();
    PrimeSet(v)
  }

  /// The `count` smallest primes not in the set.
  pub fn smallest_outside(&self, count: usize) -> Vec<u64> {
    (2u64..).filter(|&p| is_prime(p) && !self.contains(p)).take(count).collect()
  }

  /// Removes every factor in the set from `n` and returns what is left.
  fn strip(&self, n: &BigInt) -> BigInt {
    let mut n = n.abs();
    for &p in &self.0 {
      let bp = BigInt::from(p);
      while !n.is_zero() && (&n % &bp).is_zero() {
        n /= &bp;
      }
    }
    n
  }
}

impl fmt::Display for PrimeSet {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, p) in self.0.iter().enumerate() {
      if i > 0 {
        write!(f, ",")?;
      }
      write!(f, "{p}")?;
    }
    write!(f, "}}")
  }
}

/// The coefficient ring `R` of a group ring `RG`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CoefficientRing {
  Rationals,
  PrimeField(u64),
  Integers,
  Localization(PrimeSet),
}

/// An exact ring element. Rationals are kept in lowest terms (the
/// `num-rational` invariant); residues lie in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
  Rational(BigRational),
  Residue(u64),
}

impl Scalar {
  pub fn as_rational(&self) -> Option<&BigRational> {
    match self {
      Scalar::Rational(q) => Some(q),
      Scalar::Residue(_) => None,
    }
  }
}

impl fmt::Display for Scalar {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match self {
      Scalar::Rational(q) => {
        if q.denom().is_one() {
          write!(f, "{}", q.numer())
        } else {
          write!(f, "{}/{}", q.numer(), q.denom())
        }
      }
      Scalar::Residue(r) => write!(f, "{r}"),
    }
  }
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
  let mut acc = 1u128;
  let m = p as u128;
  let mut b = (base % p) as u128;
  while exp > 0 {
    if exp & 1 == 1 {
      acc = acc * b % m;
    }
    b = b * b % m;
    exp >>= 1;
  }
  base = acc as u64;
  base
}

fn bigint_mod(n: &BigInt, p: u64) -> u64 {
  let r = n.mod_floor(&BigInt::from(p));
  r.to_u64().expect("residue fits in u64")
}

impl CoefficientRing {
  pub fn prime_field(p: u64) -> Result<Self, CoefficientError> {
    if is_prime(p) {
      Ok(CoefficientRing::PrimeField(p))
    } else {
      Err(CoefficientError::NotPrime(p))
    }
  }

  /// Characteristic `p` for prime fields, `None` otherwise.
  pub fn characteristic(&self) -> Option<u64> {
    match self {
      CoefficientRing::PrimeField(p) => Some(*p),
      _ => None,
    }
  }

  pub fn is_rational_type(&self) -> bool {
    !matches!(self, CoefficientRing::PrimeField(_))
  }

  pub fn zero(&self) -> Scalar {
    self.from_i64(0)
  }

  pub fn one(&self) -> Scalar {
    self.from_i64(1)
  }

  pub fn from_i64(&self, n: i64) -> Scalar {
    match self {
      CoefficientRing::PrimeField(p) => Scalar::Residue(n.rem_euclid(*p as i64) as u64),
      _ => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
    }
  }

  /// Maps an integer into the ring.
  pub fn from_bigint(&self, n: &BigInt) -> Scalar {
    match self {
      CoefficientRing::PrimeField(p) => Scalar::Residue(bigint_mod(n, *p)),
      _ => Scalar::Rational(BigRational::from_integer(n.clone())),
    }
  }

  /// Maps a rational into the ring, failing when it is not an element.
  pub fn from_rational(&self, q: &BigRational) -> Result<Scalar, CoefficientError> {
    match self {
      CoefficientRing::Rationals => Ok(Scalar::Rational(q.clone())),
      CoefficientRing::PrimeField(p) => reduce_mod_p(&Scalar::Rational(q.clone()), *p),
      CoefficientRing::Integers | CoefficientRing::Localization(_) => {
        let s = Scalar::Rational(q.clone());
        if self.contains(&s) {
          Ok(s)
        } else {
          Err(CoefficientError::NotInRing(s.to_string(), self.to_string()))
        }
      }
    }
  }

  pub fn contains(&self, x: &Scalar) -> bool {
    match (self, x) {
      (CoefficientRing::PrimeField(p), Scalar::Residue(r)) => r < p,
      (CoefficientRing::Rationals, Scalar::Rational(_)) => true,
      (CoefficientRing::Integers, Scalar::Rational(q)) => q.denom().is_one(),
      (CoefficientRing::Localization(ps), Scalar::Rational(q)) => ps.strip(q.denom()).is_one(),
      _ => false,
    }
  }

  pub fn is_zero(&self, x: &Scalar) -> bool {
    match x {
      Scalar::Rational(q) => q.is_zero(),
      Scalar::Residue(r) => *r == 0,
    }
  }

  pub fn is_one(&self, x: &Scalar) -> bool {
    match x {
      Scalar::Rational(q) => q.is_one(),
      Scalar::Residue(r) => *r == 1,
    }
  }

  pub fn add(&self, x: &Scalar, y: &Scalar) -> Scalar {
    match (x, y) {
      (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
      (Scalar::Residue(a), Scalar::Residue(b)) => {
        let p = self.characteristic().expect("residues live in a prime field");
        Scalar::Residue(((*a as u128 + *b as u128) % p as u128) as u64)
      }
      _ => panic!("mixed scalar kinds in {self}"),
    }
  }

  pub fn neg(&self, x: &Scalar) -> Scalar {
    match x {
      Scalar::Rational(a) => Scalar::Rational(-a),
      Scalar::Residue(a) => {
        let p = self.characteristic().expect("residues live in a prime field");
        Scalar::Residue(if *a == 0 { 0 } else { p - a })
      }
    }
  }

  pub fn sub(&self, x: &Scalar, y: &Scalar) -> Scalar {
    self.add(x, &self.neg(y))
  }

  pub fn mul(&self, x: &Scalar, y: &Scalar) -> Scalar {
    match (x, y) {
      (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
      (Scalar::Residue(a), Scalar::Residue(b)) => {
        let p = self.characteristic().expect("residues live in a prime field");
        Scalar::Residue(((*a as u128 * *b as u128) % p as u128) as u64)
      }
      _ => panic!("mixed scalar kinds in {self}"),
    }
  }

  pub fn is_unit(&self, x: &Scalar) -> bool {
    match (self, x) {
      (_, x) if self.is_zero(x) => false,
      (CoefficientRing::Rationals | CoefficientRing::PrimeField(_), _) => true,
      (CoefficientRing::Integers, Scalar::Rational(q)) => q.denom().is_one() && q.numer().abs().is_one(),
      (CoefficientRing::Localization(ps), Scalar::Rational(q)) => {
        ps.strip(q.numer()).is_one() && ps.strip(q.denom()).is_one()
      }
      _ => false,
    }
  }

  pub fn inv(&self, x: &Scalar) -> Result<Scalar, CoefficientError> {
    if !self.is_unit(x) {
      return Err(CoefficientError::NotAUnit(x.to_string(), self.to_string()));
    }
    Ok(match x {
      Scalar::Rational(q) => Scalar::Rational(q.recip()),
      Scalar::Residue(a) => {
        let p = self.characteristic().expect("residues live in a prime field");
        Scalar::Residue(mod_pow(*a, p - 2, p))
      }
    })
  }

  /// Parses a coefficient literal (`-3`, `5/7`) into the ring.
  pub fn parse_scalar(&self, s: &str) -> Result<Scalar, CoefficientError> {
    let q = parse_rational(s)?;
    self.from_rational(&q)
  }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational, CoefficientError> {
  let t = s.trim();
  let err = || CoefficientError::Parse(s.to_string());
  match t.split_once('/') {
    Some((n, d)) => {
      let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
      let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
      if d.is_zero() {
        return Err(err());
      }
      Ok(BigRational::new(n, d))
    }
    None => Ok(BigRational::from_integer(BigInt::from_str(t).map_err(|_| err())?)),
  }
}

impl fmt::Display for CoefficientRing {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match self {
      CoefficientRing::Rationals => write!(f, "Q"),
      CoefficientRing::PrimeField(p) => write!(f, "Fp:{p}"),
      CoefficientRing::Integers => write!(f, "Z"),
      CoefficientRing::Localization(ps) => {
        write!(f, "Zloc:")?;
        for (i, p) in ps.primes().iter().enumerate() {
          if i > 0 {
            write!(f, ",")?;
          }
          write!(f, "{p}")?;
        }
        Ok(())
      }
    }
  }
}

impl FromStr for CoefficientRing {
  type Err = CoefficientError;

  fn from_str(s: &str) -> Result<Self, Self::Err> {
    let t = s.trim();
    let bad = || CoefficientError::Selector(s.to_string());
    match t {
      "Q" => Ok(CoefficientRing::Rationals),
      "Z" => Ok(CoefficientRing::Integers),
      _ => {
        if let Some(p) = t.strip_prefix("Fp:") {
          CoefficientRing::prime_field(p.trim().parse().map_err(|_| bad())?)
        } else if let Some(list) = t.strip_prefix("Zloc:") {
          let primes = list
            .split(',')
            .filter(|x| !x.trim().is_empty())
            .map(|x| x.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
          Ok(CoefficientRing::Localization(PrimeSet::new(primes)?))
        } else {
          Err(bad())
        }
      }
    }
  }
}

impl Serialize for CoefficientRing {
  fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&self.to_string())
  }
}

impl<'de> Deserialize<'de> for CoefficientRing {
  fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
  }
}

fn prime_factors(n: &BigInt) -> Vec<u64> {
  let mut n: BigUint = n.abs().to_biguint().expect("absolute value is non-negative");
  let mut out = Vec::new();
  let mut d = 2u64;
  while !n.is_one() && !n.is_zero() {
    let bd = BigUint::from(d);
    if &bd * &bd > n {
      out.push(n.to_u64().expect("remaining prime factor exceeds u64"));
      break;
    }
    if (&n % &bd).is_zero() {
      out.push(d);
      while (&n % &bd).is_zero() {
        n /= &bd;
      }
    }
    d += if d == 2 { 1 } else { 2 };
  }
  out
}

/// Primes dividing the denominator (in lowest terms) of any of the given
/// rationals. Residues carry no denominators and are ignored.
pub fn primes_of_denominators<'a>(xs: impl IntoIterator<Item = &'a Scalar>) -> PrimeSet {
  let mut all = Vec::new();
  for x in xs {
    if let Scalar::Rational(q) = x {
      if !q.denom().is_one() {
        all.extend(prime_factors(q.denom()));
      }
    }
  }
  PrimeSet::new(all).expect("factors are prime")
}

/// Image of a rational (or localised) scalar under `Z_P -> F_p`.
pub fn reduce_mod_p(x: &Scalar, p: u64) -> Result<Scalar, CoefficientError> {
  if !is_prime(p) {
    return Err(CoefficientError::NotPrime(p));
  }
  match x {
    Scalar::Residue(r) => Ok(Scalar::Residue(r % p)),
    Scalar::Rational(q) => {
      let den = bigint_mod(q.denom(), p);
      if den == 0 {
        return Err(CoefficientError::DenominatorDivisible(x.to_string(), p));
      }
      let num = bigint_mod(q.numer(), p);
      let inv = mod_pow(den, p - 2, p);
      Ok(Scalar::Residue(((num as u128 * inv as u128) % p as u128) as u64))
    }
  }
}
