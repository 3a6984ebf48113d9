//! Shared oracles for integration tests.
#![allow(dead_code)]

pub mod tensor;

use linkweyl::critlift::{BranchSelector, LiftConfig};
use linkweyl::linkfam::{build_chain_potential, BulkParameter, CircleLinkS2};
use linkweyl::matrix::Matrix;
use linkweyl::qpoly::rational_pow;
use linkweyl::{rat, Exponent, LaurentPotential, NovikovSeries, Precision, Rational};
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::Rng;

/// Solves `a x = b` over ℚ by Gauss-Jordan elimination.
pub fn solve_rational(a: &[Vec<Rational>], b: &[Rational]) -> Vec<Rational> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.iter().zip(b).map(|(r, v)| r.iter().chain([v]).cloned().collect()).collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero()).expect("invertible leading Hessian");
        m.swap(col, p);
        let piv = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &piv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..=n {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n].clone()).collect()
}

/// `z_i ∂_i W (z)` modulo `T^cap`, monomial by monomial.
pub fn gradient(w: &LaurentPotential, z: &[NovikovSeries], cap: &Exponent) -> Vec<NovikovSeries> {
    let p = Precision::Finite(cap.clone());
    let inv: Vec<NovikovSeries> = z.iter().map(|x| x.invert(cap).unwrap()).collect();
    let mut g = vec![NovikovSeries::zero(); z.len()];
    for (m, c) in w.terms() {
        let mut v = c.truncate(&p);
        for (j, &e) in m.iter().enumerate() {
            let base = if e >= 0 { &z[j] } else { &inv[j] };
            for _ in 0..e.abs() {
                v = v.mul_trunc(base, &p);
            }
        }
        for (i, &mi) in m.iter().enumerate() {
            if mi != 0 {
                g[i] = g[i].add(&v.scale(&rat(mi, 1)));
            }
        }
    }
    g.into_iter().map(|x| x.truncate(&p)).collect()
}

/// Critical point near the rational leading solution `z0`, built by killing
/// the lowest residual exponent with the leading Hessian, one exponent at a
/// time. Returns coordinates known modulo `T^precision`.
pub fn order_by_order(w: &LaurentPotential, z0: &[Rational], precision: &Exponent) -> Vec<NovikovSeries> {
    let n = z0.len();
    let hmin = w.terms().values().filter_map(|c| c.valuation().cloned()).min().unwrap();
    // leading Hessian: Σ m_i m_j [T^hmin]c_m z0^m
    let mut h0 = vec![vec![Rational::zero(); n]; n];
    for (m, c) in w.terms() {
        let lead = c.coefficient(&hmin);
        if lead.is_zero() {
            continue;
        }
        let mut v = lead;
        for (j, &e) in m.iter().enumerate() {
            v *= rational_pow(&z0[j], e);
        }
        for i in 0..n {
            for j in 0..n {
                h0[i][j] += &v * Rational::from_integer((m[i] * m[j]).into());
            }
        }
    }
    let cap = &hmin + precision;
    let mut z: Vec<NovikovSeries> = z0.iter().map(|x| NovikovSeries::constant(x.clone())).collect();
    for _ in 0..10_000 {
        let g = gradient(w, &z, &cap);
        let Some(v) = g.iter().filter_map(|x| x.valuation().cloned()).min() else {
            return z.into_iter().map(|x| x.truncate(&Precision::Finite(precision.clone()))).collect();
        };
        let e = &v - &hmin;
        assert!(e.is_positive(), "leading order not solved");
        let rhs: Vec<Rational> = g.iter().map(|x| -x.coefficient(&v)).collect();
        let delta = solve_rational(&h0, &rhs);
        for i in 0..n {
            z[i] = z[i].add(&NovikovSeries::monomial(&z0[i] * &delta[i], e.clone()));
        }
    }
    panic!("order-by-order lift did not terminate");
}

pub struct PerturbedChain {
    pub k: usize,
    pub b: Exponent,
    pub delta: Exponent,
    pub potential: LaurentPotential,
}

/// Chain potential with one extra monomial of valuation `B + δ`, `0 < δ < B`.
pub fn random_perturbed_chain(rng: &mut StdRng) -> PerturbedChain {
    let k = rng.gen_range(1..=4);
    let bd = rng.gen_range(2..=12i64);
    let b = Exponent::new(rng.gen_range(1..bd), bd);
    let a = b.scale(&rat(rng.gen_range(1..=4), 5));
    let link = CircleLinkS2::from_areas(k, a, b.clone()).unwrap();
    let c0 = [rat(1, 1), rat(2, 1), rat(-1, 2), rat(3, 1)][rng.gen_range(0..4)].clone();
    let bulk = BulkParameter::new(c0, &link).unwrap();
    let mut w = build_chain_potential(&link, &bulk).unwrap();
    let q = rng.gen_range(2..=8i64);
    let delta = b.scale(&rat(rng.gen_range(1..q), q));
    let mut m = vec![0i64; k];
    while m.iter().all(|&e| e == 0) {
        m = (0..k).map(|_| rng.gen_range(-1..=1)).collect();
    }
    let mut eps = rat(0, 1);
    while eps.is_zero() {
        eps = rat(rng.gen_range(-5..=5), rng.gen_range(1..=3));
    }
    w.add_term(m, NovikovSeries::monomial(eps, &b + &delta)).unwrap();
    PerturbedChain { k, b, delta, potential: w }
}

pub fn positive_lift(target: Exponent) -> LiftConfig {
    LiftConfig::new(target, 64).unwrap().with_branch(BranchSelector::Positive)
}

/// Leibniz expansion, independent of the elimination code.
pub fn leibniz(m: &Matrix) -> NovikovSeries {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    let n = m.len();
    let mut acc = NovikovSeries::zero();
    for p in perms(n) {
        let inv = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let mut t = NovikovSeries::constant(rat(if inv % 2 == 0 { 1 } else { -1 }, 1));
        for (i, &pi) in p.iter().enumerate() {
            t = t.mul(&m[i][pi]);
        }
        acc = acc.add(&t);
    }
    acc
}
