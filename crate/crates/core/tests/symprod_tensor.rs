mod common;

use common::tensor::{lift, restrict, tensor_idempotent, tensor_mul};
use linkweyl::symprodqh::{semisimplicity_check, symk_idempotents, SymQHElement};
use linkweyl::{rat, Exponent, NovikovSeries};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = NovikovSeries> {
    (-4i64..=4, 1i64..4, -3i64..4, 1i64..3)
        .prop_map(|(c, d, e, f)| NovikovSeries::monomial(rat(c, d), Exponent::new(e, f)))
}

fn pair() -> impl Strategy<Value = (usize, Exponent, Vec<NovikovSeries>, Vec<NovikovSeries>)> {
    (1usize..=6, 1i64..4, 1i64..3).prop_flat_map(|(k, n, d)| {
        (
            Just(k),
            Just(Exponent::new(n, d)),
            proptest::collection::vec(coeff(), k + 1),
            proptest::collection::vec(coeff(), k + 1),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetric_product_matches_tensor_product((k, omega, a, b) in pair()) {
        let x = SymQHElement::new(k, omega.clone(), a).unwrap();
        let y = SymQHElement::new(k, omega.clone(), b).unwrap();
        let sym = x.multiply(&y).unwrap();
        let full = tensor_mul(k, &omega, &lift(&x), &lift(&y));
        let back = restrict(k, &full).expect("product of invariants is invariant");
        prop_assert_eq!(sym.coeffs(), &back[..]);
    }
}

#[test]
fn idempotents_match_tensor_construction() {
    for omega in [Exponent::from_int(1), Exponent::new(2, 3)] {
        for k in 1..=8 {
            let es = symk_idempotents(k, &omega).unwrap();
            assert_eq!(es.len(), k + 1);
            for (j, e) in es.iter().enumerate() {
                let t = tensor_idempotent(k, &omega, j);
                assert_eq!(restrict(k, &t).unwrap(), e.coeffs(), "k={k} j={j}");
                assert_eq!(tensor_mul(k, &omega, &t, &t), t, "k={k} j={j}");
                assert_eq!(e.valuation(), Some(omega.times(k as i64).scale(&rat(-1, 2))));
            }
        }
    }
}

#[test]
fn invariant_algebra_is_semisimple() {
    for k in 1..=8 {
        let r = semisimplicity_check(k, &Exponent::from_int(1)).unwrap();
        assert!(r.is_semisimple(), "k={k}: {r:?}");
    }
}
