use linkweyl::critlift::{leading_solutions, BranchSelector, LiftConfig};
use linkweyl::linkfam::{build_chain_potential, critical_data, reflect, BulkParameter, CircleLinkS2};
use linkweyl::{rat, Exponent};
use proptest::prelude::*;

fn areas() -> impl Strategy<Value = (usize, Exponent, Exponent)> {
    (1usize..=12, 1i64..40, 1i64..40, 1i64..30).prop_map(|(k, num_a, gap, den)| {
        let a = Exponent::new(num_a, den);
        let b = &a + &Exponent::new(gap, den);
        (k, a, b)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn det_valuation_is_k_times_b((k, a, b) in areas(), c_num in -5i64..=5, c_den in 1i64..5) {
        prop_assume!(c_num != 0);
        let link = CircleLinkS2::from_areas(k, a, b.clone()).unwrap();
        let bulk = BulkParameter::new(rat(c_num, c_den), &link).unwrap();
        let w = build_chain_potential(&link, &bulk).unwrap();
        // z₁² = c₀², z_k² = c₀⁻², middle z_j² = 1: always rational
        let target = b.times(2);
        let cfg = LiftConfig::new(target, 10).unwrap().with_branch(BranchSelector::Positive);
        let cert = critical_data(&link, &bulk, &cfg).unwrap();
        prop_assert!(cert.morse);
        prop_assert_eq!(cert.det_valuation, Some(b.times(k as i64)));
        prop_assert_eq!(reflect(&w).unwrap(), w);
    }
}

#[test]
fn unit_c0_has_all_sign_branches() {
    for k in 1..=6 {
        let link = CircleLinkS2::from_areas(k, Exponent::new(1, 10), Exponent::new(1, 5)).unwrap();
        let w = build_chain_potential(&link, &BulkParameter::new(rat(1, 1), &link).unwrap()).unwrap();
        let pts = leading_solutions(&w).unwrap();
        assert_eq!(pts.len(), 1 << k);
    }
}
