mod common;

use common::leibniz;
use linkweyl::cliffordtrace::{check_trace, CliffordAlgebraModel, CliffordElement};
use linkweyl::matrix::Matrix;
use linkweyl::{rat, Exponent, NovikovSeries};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn entry() -> impl Strategy<Value = NovikovSeries> {
    (-6i64..=6, 1i64..4, 0i64..6, 1i64..4)
        .prop_map(|(c, d, e, f)| NovikovSeries::monomial(rat(c, d), Exponent::new(e, f)))
}

fn symmetric(n: usize, diagonal: bool) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(entry(), n * n).prop_map(move |v| {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            v[i * n + i].clone()
                        } else if diagonal {
                            NovikovSeries::zero()
                        } else {
                            v[i.min(j) * n + i.max(j)].clone()
                        }
                    })
                    .collect()
            })
            .collect()
    })
}

fn element(n: usize) -> impl Strategy<Value = CliffordElement> {
    proptest::collection::vec(entry(), 1usize << n).prop_map(move |v| {
        let mut x = CliffordElement::zero(n);
        for (mask, c) in v.into_iter().enumerate() {
            let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            x = x.add(&CliffordElement::basis(n, &subset, c).unwrap()).unwrap();
        }
        x
    })
}

fn algebra_and_triple() -> impl Strategy<Value = (Matrix, CliffordElement, CliffordElement, CliffordElement)> {
    (1usize..=4).prop_flat_map(|n| (symmetric(n, false), element(n), element(n), element(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_is_associative((form, a, b, c) in algebra_and_triple()) {
        let alg = CliffordAlgebraModel::new(form).unwrap();
        let left = alg.product(&alg.product(&a, &b).unwrap(), &c).unwrap();
        let right = alg.product(&a, &alg.product(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn trace_equals_determinant(form in (1usize..=4).prop_flat_map(|n| prop_oneof![symmetric(n, true), symmetric(n, false)])) {
        let alg = CliffordAlgebraModel::new(form.clone()).unwrap();
        prop_assert_eq!(alg.trace_z(), leibniz(&form));
    }

    #[test]
    fn scaling_shifts_both_valuations(form in (1usize..=3).prop_flat_map(|n| symmetric(n, false)), e in 1i64..5, c in 1i64..4) {
        let n = form.len() as i64;
        let u = NovikovSeries::monomial(rat(c, 1), Exponent::new(e, 2));
        let scaled: Matrix = form.iter().map(|r| r.iter().map(|x| x.mul(&u)).collect()).collect();
        let z0 = CliffordAlgebraModel::new(form).unwrap().trace_z();
        let z1 = CliffordAlgebraModel::new(scaled).unwrap().trace_z();
        if let Some(v0) = z0.valuation() {
            prop_assert_eq!(z1.valuation().cloned(), Some(v0 + &Exponent::new(e * n, 2)));
        }
    }
}

#[test]
fn five_generators_match_determinant() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for diagonal in [true, false] {
        for _ in 0..3 {
            let form = symmetric(5, diagonal).new_tree(&mut runner).unwrap().current();
            let report = check_trace(form.clone()).unwrap();
            assert_eq!(report.z, leibniz(&form));
        }
    }
}

#[test]
fn chain_hessian_trace() {
    // diag(2T^B, 2T^B) at the all-plus point of the two-circle chain with c0 = 1
    let b = NovikovSeries::monomial(rat(2, 1), Exponent::new(1, 4));
    let form = vec![vec![b.clone(), NovikovSeries::zero()], vec![NovikovSeries::zero(), b]];
    let report = check_trace(form).unwrap();
    assert!(report.leading_match);
    assert_eq!(report.val_z, Some(Exponent::new(1, 2)));
    assert_eq!(report.z.leading_coefficient(), Some(&rat(4, 1)));
}
