//! Quantum cohomology of P¹ and the symmetric-invariant part of its k-th
//! tensor power, with their idempotents, valuations and grading.
//!
//! `QH(P¹) = Λ[H]/(H² − T^ω)`. The invariant algebra has basis
//! `m_l = Σ_{|S| = l} H^{⊗S}` (sum over the `C(k, l)` placements).

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::determinant;
use crate::novikov::{rat, Exponent, NovikovSeries, Rational};

fn check_omega(omega: &Exponent) -> Result<()> {
    if !omega.is_positive() {
        return Err(Error::NonPositiveOmega(omega.clone()));
    }
    Ok(())
}

/// `a + b·H` with `H² = T^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QHP1Element {
    pub a: NovikovSeries,
    pub b: NovikovSeries,
    pub omega: Exponent,
}

impl QHP1Element {
    pub fn new(a: NovikovSeries, b: NovikovSeries, omega: Exponent) -> Result<Self> {
        check_omega(&omega)?;
        Ok(QHP1Element { a, b, omega })
    }

    pub fn one(omega: Exponent) -> Result<Self> {
        Self::new(NovikovSeries::one(), NovikovSeries::zero(), omega)
    }

    pub fn h(omega: Exponent) -> Result<Self> {
        Self::new(NovikovSeries::zero(), NovikovSeries::one(), omega)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.omega != other.omega {
            return Err(Error::OmegaMismatch(self.omega.clone(), other.omega.clone()));
        }
        Ok(QHP1Element { a: self.a.add(&other.a), b: self.b.add(&other.b), omega: self.omega.clone() })
    }

    pub fn valuation(&self) -> Option<Exponent> {
        [self.a.valuation(), self.b.valuation()].into_iter().flatten().min().cloned()
    }
}

pub fn qh1_multiply(x: &QHP1Element, y: &QHP1Element) -> Result<QHP1Element> {
    if x.omega != y.omega {
        return Err(Error::OmegaMismatch(x.omega.clone(), y.omega.clone()));
    }
    let q = NovikovSeries::t_pow(x.omega.clone());
    Ok(QHP1Element {
        a: x.a.mul(&y.a).add(&x.b.mul(&y.b).mul(&q)),
        b: x.a.mul(&y.b).add(&x.b.mul(&y.a)),
        omega: x.omega.clone(),
    })
}

/// `e_± = ½(1 ± T^{−ω/2} H)`.
pub fn qh1_idempotents(omega: &Exponent) -> Result<(QHP1Element, QHP1Element)> {
    check_omega(omega)?;
    let half = rat(1, 2);
    let b = NovikovSeries::monomial(half.clone(), omega.scale(&rat(-1, 2)));
    let a = NovikovSeries::constant(half);
    Ok((
        QHP1Element { a: a.clone(), b: b.clone(), omega: omega.clone() },
        QHP1Element { a, b: b.neg(), omega: omega.clone() },
    ))
}

/// Element of the invariant algebra in the basis `m_0, …, m_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymQHElement {
    k: usize,
    omega: Exponent,
    coeffs: Vec<NovikovSeries>,
}

pub fn binomial(n: usize, r: usize) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    (0..r).fold(BigInt::from(1), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

impl SymQHElement {
    pub fn new(k: usize, omega: Exponent, coeffs: Vec<NovikovSeries>) -> Result<Self> {
        check_omega(&omega)?;
        if coeffs.len() != k + 1 {
            return Err(Error::DimensionMismatch { expected: k + 1, found: coeffs.len() });
        }
        Ok(SymQHElement { k, omega, coeffs })
    }

    pub fn zero(k: usize, omega: Exponent) -> Result<Self> {
        Self::new(k, omega, vec![NovikovSeries::zero(); k + 1])
    }

    /// `m_l`.
    pub fn basis(k: usize, omega: Exponent, l: usize) -> Result<Self> {
        let mut x = Self::zero(k, omega)?;
        if l > k {
            return Err(Error::DimensionMismatch { expected: k + 1, found: l + 1 });
        }
        x.coeffs[l] = NovikovSeries::one();
        Ok(x)
    }

    pub fn one(k: usize, omega: Exponent) -> Result<Self> {
        Self::basis(k, omega, 0)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn omega(&self) -> &Exponent {
        &self.omega
    }

    pub fn coeffs(&self) -> &[NovikovSeries] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact_zero())
    }

    pub fn valuation(&self) -> Option<Exponent> {
        self.coeffs.iter().filter_map(|c| c.valuation()).min().cloned()
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.omega != other.omega {
            return Err(Error::OmegaMismatch(self.omega.clone(), other.omega.clone()));
        }
        if self.k != other.k {
            return Err(Error::DimensionMismatch { expected: self.k + 1, found: other.k + 1 });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect();
        Ok(SymQHElement { k: self.k, omega: self.omega.clone(), coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect();
        Ok(SymQHElement { k: self.k, omega: self.omega.clone(), coeffs })
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = vec![NovikovSeries::zero(); self.k + 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_exact_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if y.is_exact_zero() {
                    continue;
                }
                let xy = x.mul(y);
                for (l, c) in structure_constants(self.k, &self.omega, i, j) {
                    out[l] = out[l].add(&xy.mul(&c));
                }
            }
        }
        Ok(SymQHElement { k: self.k, omega: self.omega.clone(), coeffs: out })
    }
}

/// `m_i · m_j = Σ_t C(k−l, t) C(l, i−t) T^{tω} m_l` with `l = i + j − 2t`,
/// `t` the overlap of the two placements.
pub fn structure_constants(k: usize, omega: &Exponent, i: usize, j: usize) -> Vec<(usize, NovikovSeries)> {
    let lo = (i + j).saturating_sub(k);
    (lo..=i.min(j))
        .map(|t| {
            let l = i + j - 2 * t;
            let c = binomial(k - l, t) * binomial(l, i - t);
            (l, NovikovSeries::monomial(Rational::from_integer(c), omega.times(t as i64)))
        })
        .filter(|(_, c)| !c.is_exact_zero())
        .collect()
}

/// The `k + 1` symmetrisations of `e₊^{⊗j} ⊗ e₋^{⊗(k−j)}`, `j = 0..k`.
pub fn symk_idempotents(k: usize, omega: &Exponent) -> Result<Vec<SymQHElement>> {
    check_omega(omega)?;
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let scale = Rational::new(BigInt::from(1), BigInt::from(2).pow(k as u32));
    let mut out = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let coeffs = (0..=k)
            .map(|l| {
                // signed count of placements: a plus factors inside the support of H^{⊗S}
                let mut kc = BigInt::zero();
                for a in 0..=l.min(j) {
                    let term = binomial(l, a) * binomial(k - l, j - a);
                    if (l - a) % 2 == 0 {
                        kc += term;
                    } else {
                        kc -= term;
                    }
                }
                let c = &scale * Rational::from_integer(kc);
                NovikovSeries::monomial(c, omega.scale(&rat(-(l as i64), 2)))
            })
            .collect();
        out.push(SymQHElement { k, omega: omega.clone(), coeffs });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "degree", rename_all = "snake_case")]
pub enum Grading {
    Homogeneous(#[serde(serialize_with = "ser_rational")] Rational),
    Mixed,
    Zero,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// `deg(T^e) = −4e/ω`, `deg(H) = −2`.
fn degree_of_terms<'a>(omega: &Exponent, parts: impl Iterator<Item = (usize, &'a NovikovSeries)>) -> Grading {
    let mut found: Option<Rational> = None;
    for (h_power, c) in parts {
        for (e, _) in c.terms() {
            let d = rat(-4, 1) * e.value() / omega.value() - rat(2 * h_power as i64, 1);
            match &found {
                None => found = Some(d),
                Some(f) if *f != d => return Grading::Mixed,
                _ => {}
            }
        }
    }
    found.map_or(Grading::Zero, Grading::Homogeneous)
}

pub fn grading_qh1(x: &QHP1Element) -> Grading {
    degree_of_terms(&x.omega, [(0, &x.a), (1, &x.b)].into_iter())
}

pub fn grading_sym(x: &SymQHElement) -> Grading {
    degree_of_terms(&x.omega, x.coeffs.iter().enumerate())
}

#[derive(Clone, Debug, Serialize)]
pub struct SemisimplicityReport {
    pub k: usize,
    /// Determinant of the idempotents' coordinate matrix.
    pub basis_determinant: NovikovSeries,
    /// `E_i E_j = δ_ij E_i` for all pairs.
    pub diagonal: bool,
    pub complete: bool,
}

impl SemisimplicityReport {
    pub fn is_semisimple(&self) -> bool {
        self.diagonal && self.complete && !self.basis_determinant.is_zero_mod_precision()
    }
}

/// Checks that the idempotents form a basis in which multiplication is
/// diagonal, i.e. the algebra is `Λ^{k+1}`.
pub fn semisimplicity_check(k: usize, omega: &Exponent) -> Result<SemisimplicityReport> {
    let es = symk_idempotents(k, omega)?;
    let m: Vec<Vec<NovikovSeries>> = es.iter().map(|e| e.coeffs.clone()).collect();
    let floor = omega.times(k as i64 * (k as i64 + 1)) + Exponent::from_int(1);
    let basis_determinant = determinant(&m, &floor)?;
    let mut diagonal = true;
    for (i, a) in es.iter().enumerate() {
        for (j, b) in es.iter().enumerate() {
            let p = a.multiply(b)?;
            let ok = if i == j { p == *a } else { p.is_zero() };
            diagonal &= ok;
        }
    }
    let mut sum = SymQHElement::zero(k, omega.clone())?;
    for e in &es {
        sum = sum.add(e)?;
    }
    let complete = sum == SymQHElement::one(k, omega.clone())?;
    Ok(SemisimplicityReport { k, basis_determinant, diagonal, complete })
}
