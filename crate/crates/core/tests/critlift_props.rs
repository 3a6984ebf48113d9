mod common;

use common::{order_by_order, positive_lift, random_perturbed_chain};
use linkweyl::critlift::{certify_morse, hensel_lift, leading_branch, BranchSelector, LiftConfig};
use linkweyl::linkfam::{build_chain_potential, BulkParameter, CircleLinkS2};
use linkweyl::{rat, Exponent, LaurentPotential, NovikovSeries, UnitaryPoint};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn chain2() -> LaurentPotential {
    let link = CircleLinkS2::from_areas(2, Exponent::new(1, 8), Exponent::new(1, 4)).unwrap();
    build_chain_potential(&link, &BulkParameter::new(rat(1, 1), &link).unwrap()).unwrap()
}

#[test]
fn exact_leading_point_is_unchanged() {
    let w = chain2();
    let z0 = UnitaryPoint::from_rationals(&[rat(1, 1), rat(1, 1)]).unwrap();
    for n in [1i64, 3, 10] {
        let cert = hensel_lift(&w, &z0, &LiftConfig::new(Exponent::from_int(n), 5).unwrap()).unwrap();
        assert_eq!(cert.point, z0);
        assert_eq!(cert.residual_valuations.len(), 1);
    }
}

#[test]
fn injected_perturbation_matches_oracle() {
    let mut w = chain2();
    let b = Exponent::new(1, 4);
    let delta = Exponent::new(1, 12);
    w.add_term(vec![1, 0], NovikovSeries::monomial(rat(3, 2), &b + &delta)).unwrap();
    let z0 = leading_branch(&w, &BranchSelector::Positive).unwrap();
    let target = b.times(6);
    let cert = hensel_lift(&w, &z0, &positive_lift(target)).unwrap();
    let certified = cert.certified_precision.finite().unwrap().clone();
    assert_eq!(certified, b.times(5));
    let oracle = order_by_order(&w, &z0.leading(), &certified);
    for (lifted, exact) in cert.point.coords().iter().zip(&oracle) {
        assert!(lifted.eq_mod(exact, &certified), "{lifted} vs {exact}");
        let correction = lifted.sub(&NovikovSeries::constant(lifted.coefficient(&Exponent::zero())));
        assert!(correction.valuation().map_or(true, |v| v >= &delta));
    }
    assert!(certify_morse(&w, &cert.point).unwrap().morse);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn schedule_independent_and_quadratic(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let case = random_perturbed_chain(&mut rng);
        let w = &case.potential;
        let z0 = leading_branch(w, &BranchSelector::Positive).unwrap();
        let n = case.b.times(3);
        let two_n = case.b.times(6);
        let direct = hensel_lift(w, &z0, &positive_lift(two_n.clone())).unwrap();
        let half = hensel_lift(w, &z0, &positive_lift(n)).unwrap();
        let staged = hensel_lift(w, &half.point, &positive_lift(two_n)).unwrap();
        let p = direct.certified_precision.finite().unwrap().clone();
        prop_assert!(direct.point.eq_mod(&staged.point, &p));

        // residual gap above the Hessian's leading valuation doubles per step
        let hmin = case.b.clone();
        let gaps: Vec<Exponent> = direct.residual_valuations.iter().filter_map(|r| r.finite().map(|v| v - &hmin)).collect();
        let target_gap = direct.checked_precision.finite().unwrap() - &hmin;
        for pair in gaps.windows(2) {
            if pair[1] < target_gap {
                prop_assert!(pair[1] >= pair[0].times(2), "{:?}", gaps);
            }
        }
        for c in direct.point.coords() {
            let lead = NovikovSeries::constant(c.coefficient(&Exponent::zero()));
            let corr = c.sub(&lead);
            prop_assert!(corr.valuation().map_or(true, |v| v >= &case.delta));
        }
        prop_assert!(certify_morse(w, &direct.point).unwrap().morse);
    }
}
