//! Laurent polynomials over Λ and their multiplicative calculus on the
//! unitary torus: evaluation, `z_i ∂_i` gradients and `z_i ∂_i z_j ∂_j` Hessians.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{determinant, Matrix};
use crate::novikov::{Exponent, NovikovSeries, Precision, Rational};

pub type Monomial = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPotential {
    num_vars: usize,
    terms: BTreeMap<Monomial, NovikovSeries>,
}

impl LaurentPotential {
    pub fn new(num_vars: usize) -> Self {
        LaurentPotential { num_vars, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, NovikovSeries)>,
    {
        let mut w = Self::new(num_vars);
        for (m, c) in terms {
            w.add_term(m, c)?;
        }
        Ok(w)
    }

    /// Adds `coeff · z^m`, merging with an existing monomial.
    pub fn add_term(&mut self, m: Monomial, coeff: NovikovSeries) -> Result<()> {
        if m.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: m.len() });
        }
        let merged = match self.terms.remove(&m) {
            Some(old) => old.add(&coeff),
            None => coeff,
        };
        if !merged.is_exact_zero() {
            self.terms.insert(m, merged);
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, NovikovSeries> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &[i64]) -> Option<&NovikovSeries> {
        self.terms.get(m)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.num_vars != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: other.num_vars });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    /// `u · W` for a scalar `u ∈ Λ`.
    pub fn scale(&self, u: &NovikovSeries) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.mul(u))).filter(|(_, c)| !c.is_exact_zero()).collect();
        LaurentPotential { num_vars: self.num_vars, terms }
    }

    /// Applies a linear change of exponent vectors (e.g. a relabelling of
    /// the torus coordinates); colliding monomials are merged.
    pub fn map_monomials<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&[i64]) -> Monomial,
    {
        let mut out = Self::new(self.num_vars);
        for (m, c) in &self.terms {
            out.add_term(f(m), c.clone())?;
        }
        Ok(out)
    }

    /// Smallest coefficient valuation (a lower bound for exact-zero-free terms).
    pub fn min_coefficient_valuation(&self) -> Option<Exponent> {
        self.terms.values().filter_map(|c| c.val_lower_bound().finite().cloned()).min()
    }

    /// Keeps the monomials whose coefficient valuation is at most `cutoff`.
    pub fn truncate_by_valuation(&self, cutoff: &Exponent) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(_, c)| c.valuation().is_some_and(|v| v <= cutoff))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        LaurentPotential { num_vars: self.num_vars, terms }
    }

    /// `Σ coeff · Π z_i^{m_i}` modulo `T^target`.
    pub fn evaluate(&self, z: &UnitaryPoint, target: &Exponent) -> Result<NovikovSeries> {
        if z.coords.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: z.coords.len() });
        }
        let tp = Precision::Finite(target.clone());
        let lowest = self.min_coefficient_valuation().unwrap_or_else(Exponent::zero);
        let cap = target - &lowest.min(Exponent::zero());
        let mut powers: BTreeMap<(usize, i64), NovikovSeries> = BTreeMap::new();
        let mut acc = NovikovSeries::zero().truncate(&tp);
        for (m, c) in &self.terms {
            let local = match c.val_lower_bound() {
                Precision::Finite(v) => target - &v,
                Precision::Infinite => continue,
            };
            let localp = Precision::Finite(local.clone().min(cap.clone()));
            let mut mono = NovikovSeries::one();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = match powers.get(&(i, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = z.coords[i].pow(e, &cap)?;
                        powers.insert((i, e), p.clone());
                        p
                    }
                };
                mono = mono.mul_trunc(&p, &localp);
            }
            acc = acc.add(&c.mul_trunc(&mono, &tp));
        }
        Ok(acc)
    }

    /// Component `i` is `z_i ∂_i W`.
    pub fn log_gradient(&self) -> Vec<LaurentPotential> {
        (0..self.num_vars).map(|i| self.log_derivative(i)).collect()
    }

    pub fn log_derivative(&self, i: usize) -> LaurentPotential {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m[i] != 0)
            .map(|(m, c)| (m.clone(), c.scale(&Rational::from_integer(BigInt::from(m[i])))))
            .collect();
        LaurentPotential { num_vars: self.num_vars, terms }
    }

    /// Entry `(i, j)` is `z_i ∂_i z_j ∂_j W`.
    pub fn log_hessian(&self) -> Vec<Vec<LaurentPotential>> {
        let grad = self.log_gradient();
        grad.iter().map(|g| (0..self.num_vars).map(|j| g.log_derivative(j)).collect()).collect()
    }

    pub fn log_hessian_at(&self, z: &UnitaryPoint, target: &Exponent) -> Result<Matrix> {
        self.log_hessian().iter().map(|row| row.iter().map(|h| h.evaluate(z, target)).collect()).collect()
    }

    /// The log-Hessian at `z` and its determinant, both modulo `T^target`.
    pub fn log_hessian_det_at(&self, z: &UnitaryPoint, target: &Exponent) -> Result<(Matrix, NovikovSeries)> {
        let h = self.log_hessian_at(z, target)?;
        let det = determinant(&h, target)?;
        Ok((h, det))
    }
}

/// A point of `(U_Λ)^k`: every coordinate has valuation 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitaryPoint {
    coords: Vec<NovikovSeries>,
}

impl UnitaryPoint {
    pub fn new(coords: Vec<NovikovSeries>) -> Result<Self> {
        for (index, c) in coords.iter().enumerate() {
            match c.valuation() {
                Some(v) if v.is_zero() => {}
                other => {
                    let valuation = match other {
                        Some(v) => v.to_string(),
                        None => format!("inf (>= {})", c.precision()),
                    };
                    return Err(Error::NotUnitary { index, valuation });
                }
            }
        }
        Ok(UnitaryPoint { coords })
    }

    /// Exact point with rational coordinates.
    pub fn from_rationals(values: &[Rational]) -> Result<Self> {
        Self::new(values.iter().map(|v| NovikovSeries::constant(v.clone())).collect())
    }

    pub fn coords(&self) -> &[NovikovSeries] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The constant terms: the point's image in `(ℚ^*)^k`.
    pub fn leading(&self) -> Vec<Rational> {
        self.coords.iter().map(|c| c.leading_coefficient().cloned().expect("unitary")).collect()
    }

    pub fn truncate(&self, prec: &Precision) -> Self {
        UnitaryPoint { coords: self.coords.iter().map(|c| c.truncate(prec)).collect() }
    }

    pub fn to_exact(&self) -> Self {
        UnitaryPoint { coords: self.coords.iter().map(|c| c.to_exact()).collect() }
    }

    /// Smallest coordinate precision.
    pub fn precision(&self) -> Precision {
        self.coords.iter().map(|c| c.precision().clone()).min().unwrap_or(Precision::Infinite)
    }

    pub fn eq_mod(&self, other: &Self, prec: &Exponent) -> bool {
        self.coords.len() == other.coords.len() && self.coords.iter().zip(&other.coords).all(|(a, b)| a.eq_mod(b, prec))
    }
}

impl Serialize for UnitaryPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitaryPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<NovikovSeries>::deserialize(d)?;
        UnitaryPoint::new(coords).map_err(de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    m: Vec<i64>,
    coeff: NovikovSeries,
}

/// JSON form: a list of `{"m": [ints], "coeff": series}`.
impl Serialize for LaurentPotential {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<TermJson> = self.terms.iter().map(|(m, c)| TermJson { m: m.clone(), coeff: c.clone() }).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPotential {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<TermJson>::deserialize(d)?;
        let n = v
            .first()
            .map(|t| t.m.len())
            .ok_or_else(|| de::Error::custom("empty potential: number of variables unknown"))?;
        if n == 0 {
            return Err(de::Error::custom("potential needs at least one variable"));
        }
        LaurentPotential::from_terms(n, v.into_iter().map(|t| (t.m, t.coeff))).map_err(de::Error::custom)
    }
}
