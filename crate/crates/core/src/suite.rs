//! Seeded randomized suites behind the command line self test. Every
//! case derives its own generator from the suite seed and the case
//! index, so a single case replays without rerunning the batch.

use crate::affine::Affine;
use crate::fgab::{FgGroup, ShortExact};
use crate::homalg::{ext_group, six_term, ExtPresentation};
use crate::phantom::{composite_stagewise_check, CocycleEntry, EmRep, PhantomRep};
use crate::purity::is_pure;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index))
}

/// Random canonical group: free rank up to 2, at most three invariant
/// factors forming a divisibility chain with every factor at most 16.
pub fn random_group(rng: &mut impl Rng) -> FgGroup {
    let free_rank = rng.gen_range(0..=2usize);
    let torsion = rng.gen_range(0..=3usize);
    let mut factors = Vec::new();
    let mut d: i64 = rng.gen_range(2..=4);
    for _ in 0..torsion {
        if d > 16 {
            break;
        }
        factors.push(BigInt::from(d));
        d *= rng.gen_range(1..=3i64);
    }
    FgGroup::new(free_rank, factors).expect("factors form a chain")
}

fn random_class(ext: &ExtPresentation, rng: &mut impl Rng) -> crate::fgab::Element {
    let g = ext.group();
    let coords: Vec<BigInt> = (0..g.dim())
        .map(|i| match g.gen_order(i) {
            Some(d) => {
                let bound = i64::try_from(d).expect("small ext order");
                BigInt::from(rng.gen_range(0..bound.max(1)))
            }
            None => BigInt::from(rng.gen_range(-3..=3i64)),
        })
        .collect();
    g.element(coords)
}

/// A random extension together with the class it was realized from.
pub struct SesSample {
    pub ses: ShortExact,
    pub ext: ExtPresentation,
    pub class: crate::fgab::Element,
}

pub fn random_ses(rng: &mut impl Rng) -> SesSample {
    let a = random_group(rng);
    let b = random_group(rng);
    let ext = ext_group(&a, &b);
    let class = random_class(&ext, rng);
    let ses = ext.realize(&class);
    SesSample { ses, ext, class }
}

/// Outcome of one seeded suite; `failures` lists the offending cases.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub cases: u64,
    pub passed: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed == self.cases
    }

    fn collect(name: &str, seed: u64, outcomes: Vec<Option<String>>) -> SuiteReport {
        let cases = outcomes.len() as u64;
        let failures: Vec<String> = outcomes.into_iter().flatten().collect();
        SuiteReport {
            name: name.into(),
            seed,
            cases,
            passed: cases - failures.len() as u64,
            failures,
        }
    }
}

/// Hom/Ext six-term exactness on random extensions for n in 2..=12.
pub fn six_term_suite(seed: u64, cases: u64) -> SuiteReport {
    let outcomes = (0..cases)
        .map(|i| {
            let mut rng = case_rng(seed, i);
            let sample = random_ses(&mut rng);
            for n in 2..=12i64 {
                match six_term(&sample.ses, &BigInt::from(n)) {
                    Ok(st) if st.is_exact() => {}
                    Ok(_) => return Some(format!("case {i}: not exact at n = {n}")),
                    Err(e) => return Some(format!("case {i}: n = {n}: {e}")),
                }
            }
            None
        })
        .collect();
    SuiteReport::collect("six-term-exactness", seed, outcomes)
}

/// Four-way purity agreement, each equal to vanishing of the class.
pub fn purity_suite(seed: u64, cases: u64) -> SuiteReport {
    let outcomes = (0..cases)
        .map(|i| {
            let mut rng = case_rng(seed, i);
            let sample = random_ses(&mut rng);
            let report = match is_pure(&sample.ses, seed ^ i) {
                Ok(r) => r,
                Err(e) => return Some(format!("case {i}: {e}")),
            };
            if report.verdicts.iter().any(|v| v.pure != report.pure) {
                return Some(format!("case {i}: methods disagree"));
            }
            let split = sample.class == sample.ext.zero_class();
            if report.pure != split || report.split != split {
                return Some(format!(
                    "case {i}: purity {} but the class vanishing says {}",
                    report.pure, split
                ));
            }
            None
        })
        .collect();
    SuiteReport::collect("purity-agreement", seed, outcomes)
}

/// Realization round trip: class_of inverts realize, compatibly with
/// Baer sums.
pub fn roundtrip_suite(seed: u64, cases: u64) -> SuiteReport {
    let outcomes = (0..cases)
        .map(|i| {
            let mut rng = case_rng(seed, i);
            let a = random_group(&mut rng);
            let b = random_group(&mut rng);
            let ext = ext_group(&a, &b);
            let u = random_class(&ext, &mut rng);
            let v = random_class(&ext, &mut rng);
            if ext.class_of(&ext.realize(&u)) != u {
                return Some(format!("case {i}: round trip moved the class"));
            }
            let w = ext.baer_sum(&u, &v);
            if ext.class_of(&ext.realize(&w)) != w {
                return Some(format!("case {i}: round trip moved the Baer sum"));
            }
            if ext.baer_sum(&u, &ext.zero_class()) != u {
                return Some(format!("case {i}: zero class is not neutral"));
            }
            None
        })
        .collect();
    SuiteReport::collect("extension-roundtrip", seed, outcomes)
}

/// Random phantom pairs certify stage by stage at the given truncation.
pub fn composite_suite(seed: u64, cases: u64, truncation: u64) -> SuiteReport {
    let fam = Affine::new(1, 0);
    let outcomes = (0..cases)
        .map(|i| {
            let mut rng = case_rng(seed, i);
            let l = truncation.max(2);
            let entries: Vec<Option<CocycleEntry>> = (0..l)
                .map(|k| {
                    if k == 0 || rng.gen_bool(0.3) {
                        None
                    } else {
                        let coord = rng.gen_range(1..l);
                        let need = fam.eval(coord).saturating_sub(k);
                        Some(CocycleEntry {
                            coord,
                            val: need + rng.gen_range(0..3u64),
                        })
                    }
                })
                .collect();
            let f = match PhantomRep::from_entries(2, fam, entries) {
                Ok(f) => f,
                Err(e) => return Some(format!("case {i}: bad representative: {e}")),
            };
            let g = if rng.gen_bool(0.5) {
                EmRep::canonical(2, fam, l)
            } else {
                EmRep::honest(2, fam, rng.gen_range(0..3u64))
            };
            let g = match g {
                Ok(g) => g,
                Err(e) => return Some(format!("case {i}: bad receptor map: {e}")),
            };
            match composite_stagewise_check(&f, &g, l) {
                Ok(cert) if cert.all_hold() => None,
                Ok(_) => Some(format!("case {i}: certificate has a failing clause")),
                Err(e) => Some(format!("case {i}: {e}")),
            }
        })
        .collect();
    SuiteReport::collect("composite-vanishing", seed, outcomes)
}

/// The full battery behind `selftest`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SelfTest {
    pub seed: u64,
    pub cases: u64,
    pub suites: Vec<SuiteReport>,
    pub all_ok: bool,
}

pub fn run_selftest(seed: u64, cases: u64) -> SelfTest {
    let suites = vec![
        six_term_suite(seed, cases),
        purity_suite(seed, cases),
        roundtrip_suite(seed, cases),
        composite_suite(seed, cases.min(50), 12),
    ];
    let all_ok = suites.iter().all(SuiteReport::ok);
    SelfTest {
        seed,
        cases,
        suites,
        all_ok,
    }
}
