use std::collections::BTreeSet;

use linkweyl::spectrum::{
    enumerate_spectrum, fekete_homogenize, rigidity_check, ModelOrbitSet, Rigidity, SpectrumConfig,
};
use linkweyl::{rat, Error, Rational};
use proptest::prelude::*;

/// Every ordered k-tuple of orbit values, then every lattice translate in the window.
fn brute_force(values: &[Rational], k: usize, pi: &Rational, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut sums = vec![Rational::from_integer(0.into())];
    for _ in 0..k {
        sums = sums.iter().flat_map(|s| values.iter().map(move |v| s + v)).collect();
    }
    let mut out = BTreeSet::new();
    for s in sums {
        let mut x = s.clone();
        while &x > lo {
            x -= pi;
        }
        while &x <= hi {
            if &x >= lo {
                out.insert(x.clone());
            }
            x += pi;
        }
    }
    out.into_iter().collect()
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn orbit_case() -> impl Strategy<Value = (Vec<Rational>, usize, Rational)> {
    (proptest::collection::vec(small_rational(), 1..4), 1usize..=4, (1i64..=9, 1i64..=4).prop_map(|(n, d)| rat(n, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_brute_force((values, k, pi) in orbit_case()) {
        let (lo, hi) = (rat(-10, 1), rat(10, 1));
        let cfg = SpectrumConfig::new(k, pi.clone(), lo.clone(), hi.clone()).unwrap();
        let got = enumerate_spectrum(&ModelOrbitSet::new(values.clone()), &cfg).unwrap();
        prop_assert_eq!(got, brute_force(&values, k, &pi, &lo, &hi));
    }

    #[test]
    fn shift_translates_by_k_s((values, k, pi) in orbit_case(), s in small_rational()) {
        let orbits = ModelOrbitSet::new(values);
        let ks = &s * Rational::from_integer((k as i64).into());
        let (lo, hi) = (rat(-8, 1), rat(8, 1));
        let base = enumerate_spectrum(&orbits, &SpectrumConfig::new(k, pi.clone(), lo.clone(), hi.clone()).unwrap()).unwrap();
        let moved_cfg = SpectrumConfig::new(k, pi, &lo + &ks, &hi + &ks).unwrap();
        let moved = enumerate_spectrum(&orbits.shifted(&s), &moved_cfg).unwrap();
        let translated: Vec<Rational> = base.iter().map(|x| x + &ks).collect();
        prop_assert_eq!(moved, translated);
    }

    #[test]
    fn permutation_and_union((values, k, pi) in orbit_case(), extra in proptest::collection::vec(small_rational(), 1..3)) {
        let cfg = SpectrumConfig::new(k, pi, rat(-6, 1), rat(6, 1)).unwrap();
        let mut reversed = values.clone();
        reversed.reverse();
        let a = enumerate_spectrum(&ModelOrbitSet::new(values.clone()), &cfg).unwrap();
        prop_assert_eq!(&a, &enumerate_spectrum(&ModelOrbitSet::new(reversed), &cfg).unwrap());
        let b = enumerate_spectrum(&ModelOrbitSet::new(extra.clone()), &cfg).unwrap();
        let u: BTreeSet<Rational> =
            enumerate_spectrum(&ModelOrbitSet::new(values).union(&ModelOrbitSet::new(extra)), &cfg).unwrap().into_iter().collect();
        prop_assert!(a.iter().chain(&b).all(|x| u.contains(x)));
    }

    #[test]
    fn fekete_bracket_contains_sampled_infimum(
        alpha in small_rational(),
        beta in (0i64..20, 1i64..5).prop_map(|(n, d)| rat(n, d)),
        len in 1i64..30,
    ) {
        let c: Vec<Rational> = (1..=len)
            .map(|m| &alpha * Rational::from_integer(m.into()) + &beta)
            .collect();
        let f = fekete_homogenize(&c).unwrap();
        let inf = c.iter().enumerate().map(|(i, v)| v / Rational::from_integer((i as i64 + 1).into())).min().unwrap();
        prop_assert!(f.bracket.0 <= inf && inf <= f.bracket.1);
        prop_assert_eq!(f.estimate, inf);
    }
}

#[test]
fn rigidity_rejects_non_members_and_tight_gaps() {
    let levels = vec![rat(0, 1), rat(1, 1)];
    assert!(matches!(
        rigidity_check(&levels, &[rat(0, 1), rat(1, 2)], &rat(1, 10)),
        Err(Error::SpectralityViolated { index: 1 })
    ));
    assert!(matches!(rigidity_check(&levels, &[rat(0, 1)], &rat(1, 1)), Err(Error::InsufficientSeparation { .. })));
    assert_eq!(rigidity_check(&levels, &[rat(1, 1)], &rat(1, 2)).unwrap(), Rigidity::Constant);
}
