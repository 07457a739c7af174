//! Randomized property tests on small presentations, semirings and parsers.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use titsweyl::*;

fn monomial(n: usize) -> impl Strategy<Value = Monomial> {
    (0u8..2, proptest::collection::vec(0i32..3, n)).prop_map(|(s, e)| Monomial::new(s, e))
}

fn relation(n: usize) -> impl Strategy<Value = Relation> {
    (proptest::collection::vec(monomial(n), 0..3), proptest::collection::vec(monomial(n), 0..3))
        .prop_map(|(a, b)| Relation::new(a, b))
}

fn presentation() -> impl Strategy<Value = Presentation> {
    (1usize..6).prop_flat_map(|n| {
        (0u64..1 << n, 1u8..3, proptest::collection::vec(relation(n), 0..4)).prop_filter_map(
            "invalid presentation",
            move |(inv, m, rels)| {
                let names = (0..n).map(|i| format!("x{i}")).collect();
                Presentation::new(names, GenSet(inv), m, rels).ok()
            },
        )
    })
}

fn keys(v: &[PrimePoint]) -> BTreeSet<GenSet> {
    v.iter().map(|p| p.vars).collect()
}

fn axioms<S: Semiring>(s: &S, seed: u64) -> std::result::Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b, c) = (s.sample(&mut rng), s.sample(&mut rng), s.sample(&mut rng));
    prop_assert_eq!(s.add(&a, &b), s.add(&b, &a));
    prop_assert_eq!(s.mul(&a, &b), s.mul(&b, &a));
    prop_assert_eq!(s.add(&s.add(&a, &b), &c), s.add(&a, &s.add(&b, &c)));
    prop_assert_eq!(s.mul(&s.mul(&a, &b), &c), s.mul(&a, &s.mul(&b, &c)));
    prop_assert_eq!(s.mul(&a, &s.add(&b, &c)), s.add(&s.mul(&a, &b), &s.mul(&a, &c)));
    prop_assert_eq!(s.add(&a, &s.zero()), a.clone());
    prop_assert_eq!(s.mul(&a, &s.one()), a.clone());
    prop_assert_eq!(s.mul(&a, &s.zero()), s.zero());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn primes_match_subset_scan(b in presentation()) {
        let fast = enumerate_primes(&b, DEFAULT_CAP).unwrap();
        prop_assert_eq!(keys(&fast), keys(&enumerate_primes_brute(&b)));
    }

    #[test]
    fn spectra_are_sober(b in presentation()) {
        let s = spectrum(&b, DEFAULT_CAP).unwrap();
        prop_assert!(s.is_sober());
        prop_assert!(sobriety_check(&s.space()));
    }

    #[test]
    fn inverted_generators_never_vanish(b in presentation()) {
        for p in enumerate_primes(&b, DEFAULT_CAP).unwrap() {
            prop_assert!(p.vars.iter().all(|g| !b.inverted.contains(g)));
        }
    }

    #[test]
    fn presentation_json_round_trips(b in presentation()) {
        let j = serde_json::to_string(&b.to_json()).unwrap();
        let back = Presentation::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        prop_assert_eq!(back, b);
    }

    #[test]
    fn tensor_with_f1_keeps_primes(b in presentation()) {
        let f1 = mk_free(0, GenSet::EMPTY, 1).unwrap();
        let t = tensor(&b, &f1, None).unwrap();
        prop_assert_eq!(keys(&enumerate_primes(&t, DEFAULT_CAP).unwrap()), keys(&enumerate_primes(&b, DEFAULT_CAP).unwrap()));
    }

    #[test]
    fn semiring_axioms(seed in any::<u64>()) {
        axioms(&Naturals, seed)?;
        axioms(&Boolean, seed)?;
        axioms(&Tropical, seed)?;
        axioms(&ZMod(6), seed)?;
        axioms(&Integers, seed)?;
    }

    #[test]
    fn family_render_round_trips(a in -5i64..6, b in 1i64..4, e in 1i32..3) {
        let text = format!(
            "params: s, t\nconstraints: s*t = {a}, t != 0\nmatrix: [[s^{e}, t], [{b}, s - t]]\nloci:\n  z {{ s = 0 }}\n"
        );
        let f = parse_family(&text).unwrap();
        prop_assert_eq!(parse_family(&f.render()).unwrap(), f);
    }
}
