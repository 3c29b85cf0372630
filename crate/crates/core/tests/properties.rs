//! Randomized invariants: the structural laws every run must satisfy,
//! with proptest shrinking the counterexample when one shows up.

use num_bigint::BigInt;
use num_traits::Zero;
use phext::fgab::{direct_sum_full, present, FgGroup};
use phext::homalg::{ext_group, hom_group, six_term};
use phext::mat::{kernel, solve, IntMat};
use phext::padic::PadicInt;
use phext::suite::{random_group, random_ses};
use phext::towers::DirectTower;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_matrix() -> impl Strategy<Value = IntMat> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(-6i64..=6, rows * cols)
            .prop_map(move |v| IntMat::from_fn(rows, cols, |i, j| BigInt::from(v[i * cols + j])))
    })
}

fn seeded_group(seed: u64) -> FgGroup {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_group(&mut rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The kernel matrix really spans the kernel: A k = 0 column by
    /// column, and every vector A annihilates is solvable over k.
    #[test]
    fn kernel_columns_are_annihilated(a in small_matrix()) {
        let k = kernel(&a);
        prop_assert!(a.mul(&k).is_zero());
    }

    /// solve finds an exact preimage for anything already in the column
    /// space.
    #[test]
    fn solve_recovers_images(a in small_matrix(), coeffs in proptest::collection::vec(-4i64..=4, 4)) {
        let x: Vec<BigInt> = (0..a.cols()).map(|j| BigInt::from(coeffs[j])).collect();
        let b = a.mul_vec(&x);
        let y = solve(&a, &b).expect("image vectors are solvable");
        prop_assert_eq!(a.mul_vec(&y), b);
    }

    /// Presentations always canonicalize to a divisibility chain with
    /// every factor at least 2, and the relations all die in the quotient.
    #[test]
    fn presentations_canonicalize(m in small_matrix()) {
        let pres = present(m.rows(), &m);
        let factors = pres.group.invariant_factors();
        for w in factors.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        for d in factors {
            prop_assert!(d >= &BigInt::from(2));
        }
        for j in 0..m.cols() {
            let image = pres.project_elem(&m.col(j));
            prop_assert_eq!(&image, &pres.group.zero());
        }
    }

    /// Projecting any lift returns the element unchanged.
    #[test]
    fn lift_then_project_is_the_identity(m in small_matrix(), seed in 0u64..1024) {
        let pres = present(m.rows(), &m);
        if pres.group.is_finite() {
            let elems = pres.group.elements();
            let pick = &elems[(seed as usize) % elems.len()];
            let lifted = pres.lift_elem(pick);
            prop_assert_eq!(&pres.project_elem(&lifted), pick);
        }
    }

    /// For finite groups, Hom and Ext have the same canonical form, and
    /// both are symmetric in their arguments.
    #[test]
    fn hom_and_ext_agree_on_finite_groups(sa in 0u64..5000, sb in 5000u64..10000) {
        let a = seeded_group(sa).torsion_part();
        let b = seeded_group(sb).torsion_part();
        let hom = hom_group(&a, &b);
        let ext = ext_group(&a, &b);
        prop_assert_eq!(hom.group(), ext.group());
        let hom_flip = hom_group(&b, &a);
        prop_assert_eq!(hom.group(), hom_flip.group());
    }

    /// Hom out of a direct sum splits into a direct sum of Homs.
    #[test]
    fn hom_is_additive_in_the_source(sa in 0u64..5000, sb in 5000u64..10000, sc in 10000u64..15000) {
        let a = seeded_group(sa);
        let b = seeded_group(sb);
        let c = seeded_group(sc);
        let ds = direct_sum_full(&a, &b);
        let joined = hom_group(&ds.sum, &c);
        let left = hom_group(&a, &c);
        let right = hom_group(&b, &c);
        let split = direct_sum_full(left.group(), right.group());
        prop_assert_eq!(joined.group(), &split.sum);
    }

    /// Every randomly realized extension yields an exact six term
    /// sequence at every n.
    #[test]
    fn six_term_stays_exact(seed in 0u64..2000, n in 2u64..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample = random_ses(&mut rng);
        let six = six_term(&sample.ses, &BigInt::from(n)).unwrap();
        prop_assert!(six.is_exact());
    }

    /// The class named by realize is the class read back, wherever the
    /// sample landed.
    #[test]
    fn realized_classes_read_back(seed in 0u64..2000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample = random_ses(&mut rng);
        let ext = ext_group(sample.ses.quotient(), sample.ses.sub());
        prop_assert_eq!(ext.class_of(&sample.ses), sample.class);
    }

    /// Truncating a symbolic tower materializes exactly the stages the
    /// rule prescribes.
    #[test]
    fn truncation_matches_the_rule(level in 1u64..=8) {
        let t = DirectTower::prufer(2).unwrap();
        let cut = t.truncate(level).unwrap();
        for k in 0..level {
            prop_assert_eq!(cut.stage(k).unwrap(), t.stage(k).unwrap());
        }
        prop_assert!(cut.stage(level).is_err());
    }

    /// Truncated p-adic arithmetic is a commutative ring at every
    /// precision: laws hold exactly on the carried digits.
    #[test]
    fn padic_arithmetic_laws(xd in proptest::collection::vec(0u64..3, 6),
                             yd in proptest::collection::vec(0u64..3, 6),
                             zd in proptest::collection::vec(0u64..3, 6)) {
        let p = 3;
        let x = PadicInt::from_digits(p, xd).unwrap();
        let y = PadicInt::from_digits(p, yd).unwrap();
        let z = PadicInt::from_digits(p, zd).unwrap();
        prop_assert_eq!(x.add(&y), y.add(&x));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert!(x.sub(&x).is_zero_at_precision());
    }

    /// Multiplying by p shifts valuations up by exactly one as long as
    /// precision is left to see it.
    #[test]
    fn shifting_raises_valuation(xd in proptest::collection::vec(0u64..2, 8)) {
        let x = PadicInt::from_digits(2, xd).unwrap();
        let shifted = x.shift_up(1);
        match (x.valuation(), shifted.valuation()) {
            (phext::padic::Valuation::Exact(v), phext::padic::Valuation::Exact(w)) => {
                prop_assert_eq!(w, v + 1);
            }
            (_, w) => {
                // running out of digits can only weaken to a lower bound
                prop_assert!(matches!(w, phext::padic::Valuation::AtLeast(_)));
            }
        }
    }
}
