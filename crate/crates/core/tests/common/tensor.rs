//! Arithmetic in the full tensor basis of `QH(P¹)^{⊗k}`.

use linkweyl::symprodqh::SymQHElement;
use linkweyl::{rat, Exponent, NovikovSeries};

/// Element of QH(P¹)^{⊗k} in the basis `H^{⊗S}`, indexed by bitmask `S`.
pub type Tensor = Vec<NovikovSeries>;

pub fn tensor_mul(k: usize, omega: &Exponent, x: &Tensor, y: &Tensor) -> Tensor {
    let mut out = vec![NovikovSeries::zero(); 1 << k];
    for (s, a) in x.iter().enumerate() {
        for (t, b) in y.iter().enumerate() {
            let overlap = (s & t).count_ones() as i64;
            let c = a.mul(b).mul(&NovikovSeries::t_pow(omega.times(overlap)));
            out[s ^ t] = out[s ^ t].add(&c);
        }
    }
    out
}

pub fn lift(x: &SymQHElement) -> Tensor {
    let k = x.k();
    (0..1usize << k).map(|s| x.coeffs()[s.count_ones() as usize].clone()).collect()
}

/// Reads symmetric coordinates back, checking the tensor is symmetric.
pub fn restrict(k: usize, t: &Tensor) -> Option<Vec<NovikovSeries>> {
    let mut coeffs: Vec<Option<NovikovSeries>> = vec![None; k + 1];
    for (s, c) in t.iter().enumerate() {
        let l = s.count_ones() as usize;
        match &coeffs[l] {
            None => coeffs[l] = Some(c.clone()),
            Some(prev) if prev != c => return None,
            _ => {}
        }
    }
    coeffs.into_iter().collect()
}

/// `Σ_{|P| = j} ⊗_i (e₊ if i ∈ P else e₋)`, built factor by factor.
pub fn tensor_idempotent(k: usize, omega: &Exponent, j: usize) -> Tensor {
    let half = NovikovSeries::constant(rat(1, 2));
    let h = NovikovSeries::monomial(rat(1, 2), omega.scale(&rat(-1, 2)));
    let mut out = vec![NovikovSeries::zero(); 1 << k];
    for p in 0..1usize << k {
        if p.count_ones() as usize != j {
            continue;
        }
        let mut t = vec![NovikovSeries::zero(); 1 << k];
        t[0] = NovikovSeries::one();
        for i in 0..k {
            let b = if p & (1 << i) != 0 { h.clone() } else { h.neg() };
            let mut next = vec![NovikovSeries::zero(); 1 << k];
            for (s, c) in t.iter().enumerate() {
                if c.is_exact_zero() || s & (1 << i) != 0 {
                    continue;
                }
                next[s] = next[s].add(&c.mul(&half));
                next[s | (1 << i)] = next[s | (1 << i)].add(&c.mul(&b));
            }
            t = next;
        }
        for (s, c) in t.into_iter().enumerate() {
            out[s] = out[s].add(&c);
        }
    }
    out
}
