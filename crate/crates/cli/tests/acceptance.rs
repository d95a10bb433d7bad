//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints a PASS or FAIL line even when output is captured.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use fibring::chain::{load_resolution, presentation_complex, verify_complex, ChainComplex};
use fibring::coefficients::{primes_of_denominators, CoefficientRing};
use fibring::fibring::{
  cobound_holds, error_matrices, extract_primes, flip_cobound, load_certificate, search_certificate,
  sikorav_verdict, soundness_residual, sphere_characters, verify_certificate, Certificate, CertificateJson,
  SearchBudget, Verdict, VerdictKind,
};
use fibring::groupring::{GrMatrix, Group, GroupRing, GroupRingElement};
use fibring::novikov::{NovikovMatrix, NovikovRing};
use fibring::oracle::brown_sigma;
use fibring::presentation::{
  fox_fundamental_identity_holds, free_reduce, parse_character, parse_presentation, Budget, Character,
  Letter, Presentation, Word,
};
use fibring_cli::{run_check, run_sphere, Assumptions, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
  ($cond:expr, $($fmt:tt)+) => {
    if !$cond {
      return Err(format!($($fmt)+));
    }
  };
}

fn corpus(name: &str) -> PathBuf {
  PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus")).join(name)
}

fn presentation(name: &str) -> Presentation {
  parse_presentation(&std::fs::read_to_string(corpus(name)).unwrap()).unwrap()
}

fn load(grp: &str, ring: CoefficientRing, res: Option<&str>) -> ChainComplex {
  let g = Group::new(presentation(grp), Budget::default()).unwrap();
  let ctx = GroupRing::new(Arc::new(g), ring);
  match res {
    Some(r) => load_resolution(&ctx, &std::fs::read_to_string(corpus(r)).unwrap()).unwrap(),
    None => presentation_complex(&ctx),
  }
}

fn chr(c: &ChainComplex, text: &str) -> Character {
  parse_character(text, c.ctx().group().presentation()).unwrap()
}

fn verdict(c: &ChainComplex, phi: &Character, n: usize) -> Verdict {
  sikorav_verdict(c, phi, n, &SearchBudget::default()).unwrap()
}

fn kind_name(k: VerdictKind) -> String {
  format!("{k:?}")
}

const ONE_RELATOR: [&str; 16] = [
  "amalgam_a2b2.grp",
  "bs12.grp",
  "bs13.grp",
  "bs1m2.grp",
  "bs22.grp",
  "bs23.grp",
  "bs33.grp",
  "comm_a_b2.grp",
  "klein.grp",
  "klein_alt.grp",
  "surface2.grp",
  "torus25.grp",
  "torus34.grp",
  "trefoil.grp",
  "z2.grp",
  "z2_free_z.grp",
];

/// A handful of characters per group: multiples of the generator of
/// `Hom(G, Z)` when it is cyclic, otherwise an even spread of the primitive
/// characters with coordinates in `[-1, 1]`.
fn sample_characters(p: &Presentation) -> Vec<Character> {
  if p.first_betti_number() == 1 {
    let base = sphere_characters(p, 6).unwrap().remove(0);
    return (1..=3)
      .map(|k| Character::from_vector(&base.values().iter().map(|v| k * v).collect::<Vec<_>>(), p).unwrap())
      .collect();
  }
  let all = sphere_characters(p, 1).unwrap();
  let step = all.len().div_ceil(6);
  all.into_iter().step_by(step).collect()
}

/// Sums of `terms` random words of length at most `len` with coefficients in
/// `[-2, 2]`.
fn random_element(rng: &mut ChaCha8Rng, ctx: &GroupRing, terms: usize, len: usize) -> GroupRingElement {
  let k = ctx.generators().len();
  let mut x = GroupRingElement::zero(ctx);
  for _ in 0..terms {
    let n = rng.gen_range(0..=len);
    let w = Word((0..n).map(|_| Letter::new(rng.gen_range(0..k), rng.gen_bool(0.5))).collect());
    x = x.add(&GroupRingElement::monomial(ctx, &w, ctx.ring().from_i64(rng.gen_range(-2..=2))));
  }
  x
}

fn random_row(rng: &mut ChaCha8Rng, ctx: &GroupRing, n: usize) -> GrMatrix {
  GrMatrix::from_rows(ctx, n, vec![(0..n).map(|_| random_element(rng, ctx, 3, 3)).collect()])
}

/// Certified instances used by the soundness, flip and prime checks.
fn certified_instances() -> Vec<(String, ChainComplex, Certificate)> {
  let mut out = Vec::new();
  let cases: [(&str, Option<&str>, usize, &[&str]); 7] = [
    ("z2.grp", None, 1, &["a=1,b=0", "a=0,b=1", "a=1,b=1", "a=1,b=-1"]),
    ("klein.grp", None, 1, &["a=0,t=1"]),
    ("trefoil.grp", None, 1, &["y=2,x=3"]),
    ("torus25.grp", None, 1, &["y=2,x=5"]),
    ("bs12.grp", None, 1, &["a=0,t=1"]),
    ("surface2.grp", None, 1, &["a=1,b=0,c=0,d=0"]),
    ("z3.grp", Some("z3_koszul.res"), 2, &["a=1,b=0,c=0", "a=1,b=1,c=-1"]),
  ];
  for (grp, res, degree, chars) in cases {
    let c = load(grp, CoefficientRing::Rationals, res);
    for text in chars {
      let phi = chr(&c, text);
      for phi in [phi.clone(), phi.negate()] {
        if let Some(cert) =
          search_certificate(&c, &phi, degree, &SearchBudget::default()).unwrap().certificate()
        {
          out.push((
            format!("{grp} [{}]", phi.format(c.ctx().group().presentation())),
            c.clone(),
            cert.clone(),
          ));
        }
      }
    }
  }
  out
}

fn criterion_1() -> Outcome {
  let mut checked = 0;
  for ring in [CoefficientRing::Rationals, CoefficientRing::prime_field(2).unwrap()] {
    let mut expect =
      |grp: &str, res: Option<&str>, n: usize, chars: Vec<String>, want: VerdictKind| -> Outcome {
        let c = load(grp, ring.clone(), res);
        for text in chars {
          let phi = chr(&c, &text);
          let v = verdict(&c, &phi, n);
          ensure!(v.verdict == want, "{grp} [{text}] over {ring}: got {:?}, want {:?}", v.verdict, want);
          if want == VerdictKind::NotFibred && grp.starts_with("bs") {
            ensure!(
              v.plus.certified != v.minus.certified,
              "{grp} [{text}]: exactly one direction should certify"
            );
          }
          for d in [&v.plus, &v.minus] {
            if let Some(cert) = &d.certificate {
              ensure!(
                verify_certificate(&c, cert).unwrap(),
                "{grp} [{text}]: certificate fails re-verification"
              );
              let json = serde_json::to_string(&CertificateJson::new(&c, cert, true)).unwrap();
              let (c2, cert2) = load_certificate(&serde_json::from_str(&json).unwrap()).unwrap();
              ensure!(verify_certificate(&c2, &cert2).unwrap(), "{grp} [{text}]: reloaded certificate fails");
            }
          }
          checked += 1;
        }
        Ok(String::new())
      };
    let grid = |grp: &str, g: i64| -> Vec<String> {
      let p = presentation(grp);
      sphere_characters(&p, g).unwrap().iter().map(|c| c.format(&p)).collect()
    };
    expect("z2.grp", None, 1, grid("z2.grp", 2), VerdictKind::FibredFPn { degree: 1 })?;
    expect("klein.grp", None, 1, vec!["a=0,t=1".into()], VerdictKind::FibredFPn { degree: 1 })?;
    expect("trefoil.grp", None, 1, vec!["y=2,x=3".into()], VerdictKind::FibredFPn { degree: 1 })?;
    expect("bs12.grp", None, 1, vec!["a=0,t=1".into()], VerdictKind::NotFibred)?;
    expect("f2.grp", None, 1, grid("f2.grp", 2), VerdictKind::NotFibred)?;
    expect(
      "z3.grp",
      Some("z3_koszul.res"),
      3,
      vec!["a=1,b=-1,c=0".into()],
      VerdictKind::FibredFPn { degree: 3 },
    )?;
  }
  Ok(format!("{checked} verdicts over Q and F2"))
}

fn criterion_2() -> Outcome {
  let (mut groups, mut directions) = (0, 0);
  for grp in ONE_RELATOR {
    let c = load(grp, CoefficientRing::Rationals, None);
    let p = c.ctx().group().presentation().clone();
    let chars = sample_characters(&p);
    ensure!(chars.len() >= 3, "{grp}: only {} characters", chars.len());
    for phi in chars {
      let (m, _) = brown_sigma(&p, &phi).map_err(|e| format!("{grp}: {e}"))?;
      let v = verdict(&c, &phi, 1);
      let label = phi.format(&p);
      ensure!(
        v.plus.certified == m.in_sigma_plus,
        "{grp} [{label}]: search {} vs oracle {}",
        v.plus.certified,
        m.in_sigma_plus
      );
      ensure!(
        v.minus.certified == m.in_sigma_minus,
        "{grp} [-{label}]: search {} vs oracle {}",
        v.minus.certified,
        m.in_sigma_minus
      );
      ensure!(v.is_fibred() == m.kernel_finitely_generated(), "{grp} [{label}]: verdict {:?}", v.verdict);
      directions += 2;
    }
    groups += 1;
  }
  Ok(format!("{groups} groups, {directions} directions agree with the oracle"))
}

/// Left multiplies `z` by a power of a generator so that its valuation is
/// nonnegative.
fn lift_valuation(z: &GrMatrix, phi: &Character) -> GrMatrix {
  let v = z.valuation(phi).unwrap_or(0);
  if v >= 0 {
    return z.clone();
  }
  let j = (0..phi.values().len()).find(|&j| phi.value(j) != 0).unwrap();
  let step = phi.value(j);
  let m = (-v + step.abs() - 1) / step.abs() * step.signum();
  let g = z.ctx().group().normal_form(&Word::from_syllables(&[(j, m)]));
  z.map(|x| x.left_shift(&g))
}

fn criterion_3() -> Outcome {
  let instances = certified_instances();
  let mut rng = ChaCha8Rng::seed_from_u64(3);
  let mut cycles = 0;
  while cycles < 100 {
    let (name, c, cert) = &instances[cycles % instances.len()];
    let i = rng.gen_range(0..=cert.degree);
    let ctx = c.ctx();
    let z = if i == 0 {
      random_row(&mut rng, ctx, c.rank(0))
    } else {
      random_row(&mut rng, ctx, c.rank(i + 1)).mul(&c.boundary(i + 1))
    };
    if z.is_zero() {
      continue;
    }
    let z = lift_valuation(&z, &cert.phi);
    ensure!(i == 0 || z.mul(&c.boundary(i)).is_zero(), "{name}: sample in degree {i} is not a cycle");
    let vz = z.valuation(&cert.phi).unwrap();
    for k in 1..=5 {
      let r = soundness_residual(c, cert, &z, i, k).unwrap();
      if let Some(vr) = r.valuation(&cert.phi) {
        ensure!(
          vr >= vz + k as i64 && vr >= k as i64,
          "{name}: degree {i}, K = {k}: valuation {vr} below {}",
          vz + k as i64
        );
      }
    }
    cycles += 1;
  }
  Ok(format!("{cycles} cycles on {} certificates, K = 1..5", instances.len()))
}

fn criterion_4() -> Outcome {
  const KAPPA: i64 = 3;
  let instances = certified_instances();
  let mut rng = ChaCha8Rng::seed_from_u64(4);
  let mut flips = 0;
  for (name, c, cert) in &instances {
    let minus = NovikovRing::new(cert.ctx().clone(), cert.phi.negate());
    for t in 0..20 {
      let i = 1 + t % cert.degree;
      let dual = c.boundary(i).conjugate_transpose();
      let z = random_row(&mut rng, c.ctx(), c.rank(i - 1)).mul(&dual);
      let zn = NovikovMatrix::exact(&minus, &z);
      let w = flip_cobound(c, cert, &zn, i, KAPPA).map_err(|e| format!("{name}: degree {i}: {e}"))?;
      ensure!(cobound_holds(c, cert, &w, &zn, i, KAPPA), "{name}: degree {i}: preimage rejected");
      // recheck with plain group ring arithmetic
      let wg = w.to_group_ring(&minus, w.precision()).map_err(|e| e.to_string())?;
      let diff = wg.mul(&dual).sub(&z).truncate(KAPPA, minus.phi());
      ensure!(diff.is_zero(), "{name}: degree {i}: w d^* - z does not vanish below level {KAPPA}");
      flips += 1;
    }
  }
  Ok(format!("{flips} cocycles on {} certificates at kappa = {KAPPA}", instances.len()))
}

fn criterion_5() -> Outcome {
  let instances = certified_instances();
  for (name, c, cert) in &instances {
    let report = extract_primes(c, cert).map_err(|e| format!("{name}: {e}"))?;
    let needed = primes_of_denominators(cert.s.iter().flat_map(|m| m.scalars()));
    ensure!(needed.primes().iter().all(|&p| report.primes.contains(p)), "{name}: missing primes");
    ensure!(report.localized_verified, "{name}: fails over {}", report.localized_ring);
    ensure!(report.reductions.len() == 3, "{name}: {} reductions", report.reductions.len());
    for r in &report.reductions {
      ensure!(!report.primes.contains(r.prime) && r.verified, "{name}: reduction mod {} fails", r.prime);
    }
  }

  // a certificate that genuinely needs 1/2
  let c = load("z2.grp", CoefficientRing::Rationals, None);
  let phi = chr(&c, "a=1,b=0");
  let mut cert =
    search_certificate(&c, &phi, 1, &SearchBudget::default()).unwrap().certificate().unwrap().clone();
  let half = GroupRingElement::parse(c.ctx(), "1/2*a^2").unwrap();
  let entry = cert.s[1].get(0, 0).add(&half);
  cert.s[1].set(0, 0, entry);
  cert.e = error_matrices(&c, &cert.s);
  ensure!(verify_certificate(&c, &cert).unwrap(), "constructed certificate does not verify");
  let report = extract_primes(&c, &cert).map_err(|e| e.to_string())?;
  ensure!(report.primes.contains(2), "2 missing from {:?}", report.primes);
  ensure!(report.localized_verified, "constructed certificate fails over {}", report.localized_ring);
  for p in [3, 5] {
    ensure!(
      report.reductions.iter().any(|r| r.prime == p && r.verified),
      "constructed certificate fails mod {p}"
    );
  }
  Ok(format!("{} corpus certificates plus one with denominator 2", instances.len()))
}

fn criterion_6() -> Outcome {
  let mut rng = ChaCha8Rng::seed_from_u64(6);
  let mut words = 0;
  for grp in ONE_RELATOR.iter().chain(&["z3.grp", "perfect.grp"]) {
    let p = presentation(grp);
    for r in &p.relators {
      ensure!(fox_fundamental_identity_holds(r, p.num_generators()), "{grp}: Fox identity fails");
      words += 1;
    }
  }
  for _ in 0..200 {
    let n = rng.gen_range(0..=14);
    let w = free_reduce(&Word((0..n).map(|_| Letter::new(rng.gen_range(0..3), rng.gen_bool(0.5))).collect()));
    ensure!(fox_fundamental_identity_holds(&w, 3), "Fox identity fails on a random word");
    words += 1;
  }

  let mut complexes = 0;
  for grp in ONE_RELATOR.iter().chain(&["z3.grp", "f2.grp"]) {
    ensure!(verify_complex(&load(grp, CoefficientRing::Rationals, None)), "{grp}: d d != 0");
    complexes += 1;
  }
  for (grp, res) in [("z2.grp", "z2_koszul.res"), ("z3.grp", "z3_koszul.res")] {
    ensure!(verify_complex(&load(grp, CoefficientRing::Rationals, Some(res))), "{res}: d d != 0");
    complexes += 1;
  }

  let mut inverses = 0;
  for (grp, text) in [("bs12.grp", "a=0,t=1"), ("z2.grp", "a=1,b=-1"), ("trefoil.grp", "y=2,x=3")] {
    let c = load(grp, CoefficientRing::Rationals, None);
    let phi = chr(&c, text);
    let ctx = c.ctx();
    let n = NovikovRing::new(ctx.clone(), phi.clone());
    for _ in 0..40 {
      // c g + (terms strictly above the level of g)
      let g = ctx.group().normal_form(&Word(
        (0..rng.gen_range(0..=3)).map(|_| Letter::new(rng.gen_range(0..2), rng.gen_bool(0.5))).collect(),
      ));
      let v = phi.eval(&g);
      let coeff = [-3, -1, 1, 2][rng.gen_range(0..4)];
      let rest = random_element(&mut rng, ctx, 4, 4).left_shift(&g).tail(v, &phi);
      let x = n.exact(GroupRingElement::monomial(ctx, &g, ctx.ring().from_i64(coeff)).add(&rest));
      let inv = n.invert_capped(&x, 5 - v.min(0)).map_err(|e| e.to_string())?;
      let one = n.mul(&x, &inv, 5).map_err(|e| e.to_string())?;
      ensure!(one.head().is_one(), "{grp}: x * x^-1 = {} at precision 5", one.head());
      let left = n.mul(&inv, &x, 5).map_err(|e| e.to_string())?;
      ensure!(left.head().is_one(), "{grp}: x^-1 * x = {} at precision 5", left.head());
      inverses += 1;
    }
  }

  let c = load("bs12.grp", CoefficientRing::Rationals, None);
  let (ctx, phi) = (c.ctx(), chr(&c, "a=0,t=1"));
  for _ in 0..100 {
    let (x, y, z) = (
      random_element(&mut rng, ctx, 4, 4),
      random_element(&mut rng, ctx, 4, 4),
      random_element(&mut rng, ctx, 4, 4),
    );
    ensure!(x.mul(&y).mul(&z) == x.mul(&y.mul(&z)), "associativity fails");
    ensure!(
      x.mul(&y).involution() == y.involution().mul(&x.involution()),
      "involution is not an anti-homomorphism"
    );
    let k = rng.gen_range(-3..=3);
    ensure!(x.truncate(k, &phi).add(&x.tail(k, &phi)) == x, "truncation does not split");
    ensure!(x.mul_truncated(&y, &phi, k) == x.mul(&y).truncate(k, &phi), "truncated product differs");
    let (px, py) = (x.tail(0, &phi), y.tail(0, &phi));
    ensure!(px.mul(&py).is_positive_support(&phi), "positive support not closed under products");
  }
  Ok(format!("{words} Fox identities, {complexes} complexes, {inverses} inverses, 100 ring-law samples"))
}

fn problem(grp: &str) -> Problem {
  Problem {
    presentation: corpus(grp),
    resolution: None,
    field: "Q".into(),
    degree: 1,
    budget: SearchBudget::default(),
  }
}

fn without_timings(text: &str) -> serde_json::Value {
  let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
  v.as_object_mut().unwrap().remove("timings");
  v
}

fn criterion_7() -> Outcome {
  let none = Assumptions::default();
  for (grp, text) in [("trefoil.grp", "y=2,x=3"), ("bs12.grp", "a=0,t=1"), ("z2.grp", "a=1,b=1")] {
    let a = run_check(&problem(grp), text, &none, true).map_err(|e| e.to_string())?;
    let b = run_check(&problem(grp), text, &none, true).map_err(|e| e.to_string())?;
    ensure!(a.deterministic_json() == b.deterministic_json(), "{grp}: check output differs between runs");
  }
  for grp in ["z2.grp", "bs12.grp"] {
    let a = run_sphere(&problem(grp), 2).map_err(|e| e.to_string())?;
    let b = run_sphere(&problem(grp), 2).map_err(|e| e.to_string())?;
    ensure!(a.deterministic_json() == b.deterministic_json(), "{grp}: sphere output differs between runs");
  }

  let dir = std::env::temp_dir().join(format!("fibring-acceptance-{}", std::process::id()));
  std::fs::create_dir_all(&dir).unwrap();
  let mut outputs = Vec::new();
  for run in 0..2 {
    let out = dir.join(format!("run{run}.json"));
    let status = Command::new(env!("CARGO_BIN_EXE_fibring"))
      .args(["check", "--presentation"])
      .arg(corpus("trefoil.grp"))
      .args(["--char", "y=2,x=3", "--out"])
      .arg(&out)
      .output()
      .map_err(|e| e.to_string())?;
    ensure!(status.status.code() == Some(0), "binary exited with {:?}", status.status.code());
    outputs.push(without_timings(&std::fs::read_to_string(&out).unwrap()));
  }
  std::fs::remove_dir_all(&dir).ok();
  ensure!(outputs[0] == outputs[1], "binary reports differ between runs");
  let lib = run_check(&problem("trefoil.grp"), "y=2,x=3", &none, false).map_err(|e| e.to_string())?;
  ensure!(outputs[0] == without_timings(&lib.to_json()), "binary and library reports differ");
  Ok("check, sphere and binary reports identical across runs".into())
}

fn scaled(phi: &Character, k: i64, p: &Presentation) -> Character {
  Character::from_vector(&phi.values().iter().map(|v| k * v).collect::<Vec<_>>(), p).unwrap()
}

fn criterion_8() -> Outcome {
  let mut checked = 0;
  for grp in
    ["z2.grp", "klein.grp", "trefoil.grp", "bs12.grp", "bs13.grp", "f2.grp", "torus25.grp", "comm_a_b2.grp"]
  {
    let c = load(grp, CoefficientRing::Rationals, None);
    let p = c.ctx().group().presentation().clone();
    let chars = sphere_characters(&p, 2).unwrap();
    let chars: Vec<Character> =
      if chars.is_empty() { sample_characters(&p).into_iter().take(1).collect() } else { chars };
    for phi in chars.iter().take(4) {
      let base = verdict(&c, phi, 1);
      let label = phi.format(&p);
      for k in [2, 3] {
        let v = verdict(&c, &scaled(phi, k, &p), 1);
        ensure!(
          v.verdict == base.verdict,
          "{grp} [{label}] x{k}: {} vs {}",
          kind_name(v.verdict),
          kind_name(base.verdict)
        );
        ensure!(
          (v.plus.certified, v.minus.certified) == (base.plus.certified, base.minus.certified),
          "{grp} [{label}] x{k}: directions differ"
        );
      }
      let anti = verdict(&c, &phi.negate(), 1);
      ensure!(
        anti.verdict == base.verdict,
        "{grp} [-{label}]: {} vs {}",
        kind_name(anti.verdict),
        kind_name(base.verdict)
      );
      ensure!(
        (anti.plus.certified, anti.minus.certified) == (base.minus.certified, base.plus.certified),
        "{grp} [-{label}]: directions not swapped"
      );
      checked += 1;
    }
  }
  Ok(format!("{checked} characters, scales 2 and 3 and the antipode"))
}

fn main() {
  let criteria: [Criterion; 8] = [
    ("corpus verdicts", criterion_1),
    ("oracle equivalence", criterion_2),
    ("soundness residual", criterion_3),
    ("flip", criterion_4),
    ("prime extraction", criterion_5),
    ("algebraic identities", criterion_6),
    ("determinism", criterion_7),
    ("scale and antipodal invariance", criterion_8),
  ];
  let mut failed = 0;
  for (i, (name, f)) in criteria.iter().enumerate() {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
      Err(
        e.downcast_ref::<String>()
          .cloned()
          .or(e.downcast_ref::<&str>().map(|s| s.to_string()))
          .unwrap_or_default(),
      )
    });
    let secs = start.elapsed().as_secs_f64();
    match result {
      Ok(detail) => println!("criterion {} ({name}): PASS [{detail}; {secs:.1}s]", i + 1),
      Err(why) => {
        failed += 1;
        println!("criterion {} ({name}): FAIL [{why}; {secs:.1}s]", i + 1);
      }
    }
  }
  if failed > 0 {
    std::process::exit(1);
  }
}
