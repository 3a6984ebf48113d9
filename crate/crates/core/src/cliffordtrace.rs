//! Clifford-algebra model of self-Floer cohomology at a Morse critical
//! point, its Poincaré pairing and the trace `Z`.
//!
//! Generators satisfy `e_i e_j + e_j e_i = κ·form_ij`. Elements are written
//! in the antisymmetrised (Chevalley) basis `e_I`, `I ⊆ {0..n}`; products are
//! computed in the ordered-monomial basis and converted back.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{determinant_leading, Matrix};
use crate::novikov::{rat, Exponent, NovikovSeries, Rational};

/// Subset of generators as a bitmask.
type Blade = u32;

const MAX_GENERATORS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairingSign {
    /// `⟨e_I, e_Iᶜ⟩ = 1`.
    Trivial,
    /// Sign of the shuffle `(I, Iᶜ)`.
    Wedge,
    /// Shuffle sign times `(−1)^{|I|(|I|−1)/2}`.
    WedgeReversal,
    /// `(−1)^{|I|}`.
    Alternating,
}

/// How `g^{IJ}` is read off the inverse of the pairing matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InverseIndex {
    /// `g^{IJ} = (g⁻¹)_{IJ}`.
    Direct,
    /// `g^{IJ} = (g⁻¹)_{JI}`.
    Transposed,
}

/// Extra graded sign carried by `g^{IJ}`, with `J = Iᶜ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GradedSign {
    None,
    DegI,
    DegITimesN,
    DegJTimesN,
    DegITimesDegJ,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convention {
    #[serde(serialize_with = "ser_rational")]
    pub kappa: Rational,
    pub pairing: PairingSign,
    pub inverse_index: InverseIndex,
    pub graded: GradedSign,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn parity(n: usize) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of the permutation listing `I` then its complement, each increasing.
fn shuffle_sign(i: Blade, n: usize) -> i64 {
    let mut inversions = 0;
    for a in 0..n {
        if i & (1 << a) != 0 {
            inversions += (0..a).filter(|&b| i & (1 << b) == 0).count();
        }
    }
    parity(inversions)
}

impl Convention {
    fn pairing_sign(&self, i: Blade, n: usize) -> i64 {
        let d = i.count_ones() as usize;
        match self.pairing {
            PairingSign::Trivial => 1,
            PairingSign::Wedge => shuffle_sign(i, n),
            PairingSign::WedgeReversal => shuffle_sign(i, n) * parity(d * d.saturating_sub(1) / 2),
            PairingSign::Alternating => parity(d),
        }
    }

    /// `g^{I, Iᶜ}`; the pairing matrix is a signed permutation so its inverse
    /// is its transpose.
    fn inverse_entry(&self, i: Blade, n: usize) -> i64 {
        let full = full_blade(n);
        let j = full & !i;
        let base = match self.inverse_index {
            InverseIndex::Direct => self.pairing_sign(j, n),
            InverseIndex::Transposed => self.pairing_sign(i, n),
        };
        let (di, dj) = (i.count_ones() as usize, j.count_ones() as usize);
        let graded = match self.graded {
            GradedSign::None => 1,
            GradedSign::DegI => parity(di),
            GradedSign::DegITimesN => parity(di * n),
            GradedSign::DegJTimesN => parity(dj * n),
            GradedSign::DegITimesDegJ => parity(di * dj),
        };
        base * graded
    }

    /// Every convention the calibration chooses from.
    pub fn candidates() -> Vec<Convention> {
        let kappas = [rat(1, 1), rat(-1, 1), rat(2, 1), rat(-2, 1), rat(1, 2), rat(-1, 2)];
        let pairings = [PairingSign::Trivial, PairingSign::Wedge, PairingSign::WedgeReversal, PairingSign::Alternating];
        let indices = [InverseIndex::Direct, InverseIndex::Transposed];
        let gradeds = [
            GradedSign::None,
            GradedSign::DegI,
            GradedSign::DegITimesN,
            GradedSign::DegJTimesN,
            GradedSign::DegITimesDegJ,
        ];
        let mut out = Vec::new();
        for kappa in &kappas {
            for &pairing in &pairings {
                for &inverse_index in &indices {
                    for &graded in &gradeds {
                        out.push(Convention { kappa: kappa.clone(), pairing, inverse_index, graded });
                    }
                }
            }
        }
        out
    }
}

fn calibration_forms() -> Vec<Matrix> {
    let c = |n, d| NovikovSeries::constant(rat(n, d));
    vec![vec![vec![c(3, 2)]], vec![vec![c(2, 3), c(0, 1)], vec![c(0, 1), c(5, 1)]]]
}

/// Conventions for which `Z = det(form)` holds exactly on the calibration
/// forms (one generator, and two generators with a diagonal form).
pub fn calibration_matches() -> Vec<Convention> {
    let forms = calibration_forms();
    Convention::candidates()
        .into_iter()
        .filter(|conv| {
            forms.iter().all(|f| {
                let Ok(alg) = CliffordAlgebraModel::with_convention(f.clone(), conv.clone()) else {
                    return false;
                };
                let det = determinant_leading(f, &Exponent::from_int(1)).expect("square form");
                match det.precision().finite() {
                    Some(p) => alg.trace_z().eq_mod(&det, p),
                    None => alg.trace_z() == det,
                }
            })
        })
        .collect()
}

/// The calibrated convention, computed once.
pub fn calibrated() -> &'static Convention {
    static CAL: OnceLock<Convention> = OnceLock::new();
    CAL.get_or_init(|| calibration_matches().into_iter().next().expect("some candidate convention calibrates"))
}

fn full_blade(n: usize) -> Blade {
    if n == 0 {
        0
    } else {
        (1 << n) - 1
    }
}

/// An element in the Chevalley basis.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CliffordElement {
    n: usize,
    coeffs: BTreeMap<Blade, NovikovSeries>,
}

fn blade_of(subset: &[usize], n: usize) -> Result<Blade> {
    let mut b = 0;
    for &i in subset {
        if i >= n {
            return Err(Error::AlgebraMismatch(n, i + 1));
        }
        b |= 1 << i;
    }
    Ok(b)
}

fn blade_indices(b: Blade) -> Vec<usize> {
    (0..32).filter(|i| b & (1 << i) != 0).collect()
}

fn accumulate(map: &mut BTreeMap<Blade, NovikovSeries>, b: Blade, c: NovikovSeries) {
    let merged = match map.remove(&b) {
        Some(old) => old.add(&c),
        None => c,
    };
    if !merged.is_exact_zero() {
        map.insert(b, merged);
    }
}

impl CliffordElement {
    pub fn zero(n: usize) -> Self {
        CliffordElement { n, coeffs: BTreeMap::new() }
    }

    /// `c·e_I`.
    pub fn basis(n: usize, subset: &[usize], c: NovikovSeries) -> Result<Self> {
        let mut x = Self::zero(n);
        accumulate(&mut x.coeffs, blade_of(subset, n)?, c);
        Ok(x)
    }

    pub fn unit(n: usize) -> Self {
        let mut x = Self::zero(n);
        x.coeffs.insert(0, NovikovSeries::one());
        x
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficient(&self, subset: &[usize]) -> NovikovSeries {
        blade_of(subset, self.n).ok().and_then(|b| self.coeffs.get(&b).cloned()).unwrap_or_default()
    }

    /// Nonzero coefficients keyed by increasing index lists.
    pub fn terms(&self) -> Vec<(Vec<usize>, NovikovSeries)> {
        self.coeffs.iter().map(|(b, c)| (blade_indices(*b), c.clone())).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::AlgebraMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for (b, c) in &other.coeffs {
            accumulate(&mut out.coeffs, *b, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, u: &NovikovSeries) -> Self {
        let mut out = Self::zero(self.n);
        for (b, c) in &self.coeffs {
            accumulate(&mut out.coeffs, *b, c.mul(u));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct CliffordAlgebraModel {
    n: usize,
    form: Matrix,
    convention: Convention,
    /// Ordered-basis expansion of each Chevalley element `e_I`, by blade.
    chevalley: Vec<BTreeMap<Blade, NovikovSeries>>,
    /// Products of ordered blades, built on first use.
    table: OnceLock<Vec<Vec<BTreeMap<Blade, NovikovSeries>>>>,
}

impl CliffordAlgebraModel {
    /// Algebra with the calibrated convention.
    pub fn new(form: Matrix) -> Result<Self> {
        Self::with_convention(form, calibrated().clone())
    }

    pub fn with_convention(form: Matrix, convention: Convention) -> Result<Self> {
        let n = form.len();
        if n > MAX_GENERATORS {
            return Err(Error::InvalidConfig(format!("at most {MAX_GENERATORS} generators supported, got {n}")));
        }
        for (i, row) in form.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for j in 0..i {
                if row[j] != form[j][i] {
                    return Err(Error::AsymmetricForm(i, j));
                }
            }
        }
        let mut alg = CliffordAlgebraModel { n, form, convention, chevalley: Vec::new(), table: OnceLock::new() };
        alg.chevalley = alg.build_chevalley();
        Ok(alg)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn form(&self) -> &Matrix {
        &self.form
    }

    pub fn convention(&self) -> &Convention {
        &self.convention
    }

    fn kappa_form(&self, i: usize, j: usize) -> NovikovSeries {
        self.form[i][j].scale(&self.convention.kappa)
    }

    /// Symmetric bilinear form `B(i, j) = κ·form_ij / 2`, so that `e_i e_i = B(i, i)`.
    fn half_form(&self, i: usize, j: usize) -> NovikovSeries {
        self.form[i][j].scale(&(&self.convention.kappa / rat(2, 1)))
    }

    /// `e_I · e_j` in the ordered basis.
    fn blade_times_generator(&self, blade: Blade, j: usize) -> BTreeMap<Blade, NovikovSeries> {
        let mut out = BTreeMap::new();
        if blade == 0 {
            out.insert(1 << j, NovikovSeries::one());
            return out;
        }
        let top = 31 - blade.leading_zeros() as usize;
        if j > top {
            out.insert(blade | (1 << j), NovikovSeries::one());
            return out;
        }
        let rest = blade & !(1 << top);
        if j == top {
            accumulate(&mut out, rest, self.half_form(j, j));
            return out;
        }
        // e_{I'} e_top e_j = κ f_{top j} e_{I'} − (e_{I'} e_j) e_top
        accumulate(&mut out, rest, self.kappa_form(top, j));
        for (k, c) in self.blade_times_generator(rest, j) {
            accumulate(&mut out, k | (1 << top), c.neg());
        }
        out
    }

    /// `e_I · e_J` for ordered blades.
    fn blade_product(&self, i: Blade, j: Blade) -> BTreeMap<Blade, NovikovSeries> {
        let mut acc = BTreeMap::new();
        acc.insert(i, NovikovSeries::one());
        for g in blade_indices(j) {
            let mut next = BTreeMap::new();
            for (ib, xc) in &acc {
                for (kb, c) in self.blade_times_generator(*ib, g) {
                    accumulate(&mut next, kb, xc.mul(&c));
                }
            }
            acc = next;
        }
        acc
    }

    fn table(&self) -> &[Vec<BTreeMap<Blade, NovikovSeries>>] {
        self.table.get_or_init(|| {
            let size = 1 << self.n;
            (0..size).map(|i| (0..size).map(|j| self.blade_product(i, j)).collect()).collect()
        })
    }

    fn ordered_product(
        &self,
        x: &BTreeMap<Blade, NovikovSeries>,
        y: &BTreeMap<Blade, NovikovSeries>,
    ) -> BTreeMap<Blade, NovikovSeries> {
        let table = self.table();
        let mut out = BTreeMap::new();
        for (ib, xc) in x {
            for (jb, yc) in y {
                let xy = xc.mul(yc);
                for (kb, c) in &table[*ib as usize][*jb as usize] {
                    accumulate(&mut out, *kb, xy.mul(c));
                }
            }
        }
        out
    }

    fn build_chevalley(&self) -> Vec<BTreeMap<Blade, NovikovSeries>> {
        let size = 1usize << self.n;
        let mut table: Vec<BTreeMap<Blade, NovikovSeries>> = vec![BTreeMap::new(); size];
        table[0].insert(0, NovikovSeries::one());
        // Increasing bitmask order visits every proper subset first.
        for b in 1..size as Blade {
            let idx = blade_indices(b);
            let first = idx[0];
            let rest = b & !(1 << first);
            let mut w = BTreeMap::new();
            // e_first · W_rest: prepending the smallest index keeps blades ordered.
            for (k, c) in &table[rest as usize] {
                accumulate(&mut w, k | (1 << first), c.clone());
            }
            for (r, &ir) in idx[1..].iter().enumerate() {
                let coeff = self.half_form(first, ir).scale(&rat(-parity(r), 1));
                for (k, c) in &table[(rest & !(1 << ir)) as usize] {
                    accumulate(&mut w, *k, c.mul(&coeff));
                }
            }
            table[b as usize] = w;
        }
        table
    }

    fn to_ordered(&self, x: &CliffordElement) -> BTreeMap<Blade, NovikovSeries> {
        let mut out = BTreeMap::new();
        for (b, c) in &x.coeffs {
            for (k, w) in &self.chevalley[*b as usize] {
                accumulate(&mut out, *k, w.mul(c));
            }
        }
        out
    }

    /// Triangular change of basis: each `e_I` is the ordered blade plus
    /// lower-degree corrections.
    fn from_ordered(&self, mut x: BTreeMap<Blade, NovikovSeries>) -> CliffordElement {
        let mut out = CliffordElement::zero(self.n);
        for d in (0..=self.n as u32).rev() {
            let blades: Vec<Blade> = x.keys().copied().filter(|b| b.count_ones() == d).collect();
            for b in blades {
                let c = x.remove(&b).expect("present");
                for (k, w) in &self.chevalley[b as usize] {
                    if *k != b {
                        accumulate(&mut x, *k, w.mul(&c).neg());
                    }
                }
                accumulate(&mut out.coeffs, b, c);
            }
        }
        out
    }

    fn check(&self, x: &CliffordElement) -> Result<()> {
        if x.n != self.n {
            return Err(Error::AlgebraMismatch(self.n, x.n));
        }
        Ok(())
    }

    pub fn volume(&self) -> CliffordElement {
        let mut v = CliffordElement::zero(self.n);
        v.coeffs.insert(full_blade(self.n), NovikovSeries::one());
        v
    }

    pub fn product(&self, a: &CliffordElement, b: &CliffordElement) -> Result<CliffordElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.from_ordered(self.ordered_product(&self.to_ordered(a), &self.to_ordered(b))))
    }

    /// `⟨e_I, e_J⟩ = ±δ_{J, Iᶜ}`, extended bilinearly.
    pub fn pairing(&self, a: &CliffordElement, b: &CliffordElement) -> Result<NovikovSeries> {
        self.check(a)?;
        self.check(b)?;
        let full = full_blade(self.n);
        let mut acc = NovikovSeries::zero();
        for (i, c) in &a.coeffs {
            if let Some(d) = b.coeffs.get(&(full & !i)) {
                let s = self.convention.pairing_sign(*i, self.n);
                acc = acc.add(&c.mul(d).scale(&rat(s, 1)));
            }
        }
        Ok(acc)
    }

    /// `Z = Σ_I (−1)^{|I|} g^{I Iᶜ} ⟨e_I·vol, e_{Iᶜ}·vol⟩`.
    pub fn trace_z(&self) -> NovikovSeries {
        let full = full_blade(self.n);
        let vol = self.chevalley[full as usize].clone();
        let m2: Vec<CliffordElement> =
            (0..=full).map(|b| self.from_ordered(self.ordered_product(&self.chevalley[b as usize], &vol))).collect();
        let mut z = NovikovSeries::zero();
        for i in 0..=full {
            let j = full & !i;
            let sign = parity(i.count_ones() as usize) * self.convention.inverse_entry(i, self.n);
            let p = self.pairing(&m2[i as usize], &m2[j as usize]).expect("same algebra");
            z = z.add(&p.scale(&rat(sign, 1)));
        }
        z
    }
}

pub fn clifford_product(
    alg: &CliffordAlgebraModel,
    a: &CliffordElement,
    b: &CliffordElement,
) -> Result<CliffordElement> {
    alg.product(a, b)
}

pub fn poincare_pairing(alg: &CliffordAlgebraModel, a: &CliffordElement, b: &CliffordElement) -> Result<NovikovSeries> {
    alg.pairing(a, b)
}

pub fn trace_z(alg: &CliffordAlgebraModel) -> NovikovSeries {
    alg.trace_z()
}

/// `val(Z)`, the bound on the quasimorphism defect.
pub fn defect_bound(z: &NovikovSeries) -> Result<Exponent> {
    z.valuation().cloned().ok_or(Error::DegenerateTrace)
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub z: NovikovSeries,
    pub det: NovikovSeries,
    pub val_z: Option<Exponent>,
    pub val_det: Option<Exponent>,
    /// Same valuation and same leading coefficient.
    pub leading_match: bool,
}

/// Compares `Z` with the determinant of the form.
pub fn check_trace(form: Matrix) -> Result<TraceReport> {
    let alg = CliffordAlgebraModel::new(form)?;
    let z = alg.trace_z();
    let floor = z.valuation().cloned().unwrap_or_else(Exponent::zero) + Exponent::from_int(1);
    let det = determinant_leading(alg.form(), &floor)?;
    let val_z = z.valuation().cloned();
    let val_det = det.valuation().cloned();
    let leading_match = val_z.is_some() && val_z == val_det && z.leading_coefficient() == det.leading_coefficient();
    Ok(TraceReport { z, det, val_z, val_det, leading_match })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64, d: i64) -> NovikovSeries {
        NovikovSeries::constant(rat(n, d))
    }

    fn diag(entries: &[NovikovSeries]) -> Matrix {
        let n = entries.len();
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { entries[i].clone() } else { NovikovSeries::zero() }).collect())
            .collect()
    }

    #[test]
    fn calibration_is_unique_and_frozen() {
        let m = calibration_matches();
        assert_eq!(m.len(), 1, "{m:?}");
        assert_eq!(
            calibrated(),
            &Convention {
                kappa: rat(1, 1),
                pairing: PairingSign::WedgeReversal,
                inverse_index: InverseIndex::Transposed,
                graded: GradedSign::DegI,
            }
        );
    }

    #[test]
    fn unit_and_square() {
        let alg = CliffordAlgebraModel::new(vec![vec![c(3, 1)]]).unwrap();
        let e1 = CliffordElement::basis(1, &[0], NovikovSeries::one()).unwrap();
        assert_eq!(alg.product(&CliffordElement::unit(1), &e1).unwrap(), e1);
        let sq = alg.product(&e1, &e1).unwrap();
        assert_eq!(sq, CliffordElement::basis(1, &[], c(3, 2)).unwrap());
    }

    #[test]
    fn diagonal_anticommutes() {
        let alg = CliffordAlgebraModel::new(diag(&[c(1, 1), c(2, 1)])).unwrap();
        let e1 = CliffordElement::basis(2, &[0], NovikovSeries::one()).unwrap();
        let e2 = CliffordElement::basis(2, &[1], NovikovSeries::one()).unwrap();
        let a = alg.product(&e1, &e2).unwrap();
        let b = alg.product(&e2, &e1).unwrap();
        assert_eq!(a, b.scale(&c(-1, 1)));
        assert_eq!(a, CliffordElement::basis(2, &[0, 1], NovikovSeries::one()).unwrap());
    }

    #[test]
    fn pairing_normalisation() {
        for n in 1..4 {
            let alg = CliffordAlgebraModel::new(diag(&vec![c(1, 1); n])).unwrap();
            let one = CliffordElement::unit(n);
            assert_eq!(alg.pairing(&one, &alg.volume()).unwrap(), NovikovSeries::one());
            if n >= 2 {
                let e1 = CliffordElement::basis(n, &[0], NovikovSeries::one()).unwrap();
                assert!(alg.pairing(&e1, &e1).unwrap().is_exact_zero());
            }
        }
    }

    #[test]
    fn trace_small_cases() {
        let alg = CliffordAlgebraModel::new(Vec::new()).unwrap();
        assert_eq!(alg.trace_z(), NovikovSeries::one());
        let h1 = NovikovSeries::monomial(rat(2, 1), Exponent::new(1, 3));
        let h2 = NovikovSeries::monomial(rat(-5, 1), Exponent::new(1, 2));
        let alg = CliffordAlgebraModel::new(diag(&[h1.clone(), h2.clone()])).unwrap();
        let z = alg.trace_z();
        assert_eq!(z, h1.mul(&h2));
        assert_eq!(defect_bound(&z).unwrap(), Exponent::new(5, 6));
    }

    #[test]
    fn degenerate_trace() {
        assert!(matches!(defect_bound(&NovikovSeries::zero()), Err(Error::DegenerateTrace)));
        let alg = CliffordAlgebraModel::new(diag(&[c(0, 1), c(1, 1)])).unwrap();
        assert!(defect_bound(&alg.trace_z()).is_err());
    }

    #[test]
    fn non_diagonal_report() {
        let form =
            vec![vec![c(2, 1), c(1, 1), c(0, 1)], vec![c(1, 1), c(3, 1), c(-1, 2)], vec![c(0, 1), c(-1, 2), c(1, 1)]];
        let r = check_trace(form).unwrap();
        assert!(r.leading_match);
        assert_eq!(r.z.terms(), r.det.terms());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            CliffordAlgebraModel::new(vec![vec![c(1, 1), c(2, 1)], vec![c(3, 1), c(1, 1)]]),
            Err(Error::AsymmetricForm(1, 0))
        ));
        let alg = CliffordAlgebraModel::new(diag(&[c(1, 1)])).unwrap();
        assert!(matches!(
            alg.product(&CliffordElement::unit(1), &CliffordElement::unit(2)),
            Err(Error::AlgebraMismatch(1, 2))
        ));
    }
}
