//! The Novikov field Λ over ℚ: finite sums `Σ a_i T^{b_i}` with rational
//! coefficients and rational exponents, carried modulo an absolute precision
//! `T^N` in the same way p-adic numbers are carried modulo `p^N`.
//!
//! A [`NovikovSeries`] stores its terms sorted by strictly increasing
//! exponent, never stores a zero coefficient, and never stores a term at or
//! beyond its precision. The exact zero is the empty series with infinite
//! precision; an empty series with finite precision `N` is "zero mod `T^N`".

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n/d` as a [`Rational`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("{s:?}: zero denominator")));
        }
        Ok(Rational::new(n, d))
    } else {
        let n = BigInt::from_str(t).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Rational::from_integer(n))
    }
}

/// An exponent of `T`: an exact rational amount of symplectic area or action.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(Rational);

impl Exponent {
    pub fn new(n: i64, d: i64) -> Self {
        Exponent(rat(n, d))
    }

    pub fn from_int(n: i64) -> Self {
        Exponent(Rational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Exponent(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Multiply by a rational scalar.
    pub fn scale(&self, r: &Rational) -> Self {
        Exponent(&self.0 * r)
    }

    pub fn times(&self, n: i64) -> Self {
        Exponent(&self.0 * Rational::from_integer(BigInt::from(n)))
    }

    pub fn parse(s: &str) -> Result<Self> {
        parse_rational(s).map(Exponent)
    }
}

impl From<Rational> for Exponent {
    fn from(r: Rational) -> Self {
        Exponent(r)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! exponent_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Exponent> for &Exponent {
            type Output = Exponent;
            fn $m(self, rhs: &Exponent) -> Exponent {
                Exponent(&self.0 $op &rhs.0)
            }
        }
        impl $tr<Exponent> for Exponent {
            type Output = Exponent;
            fn $m(self, rhs: Exponent) -> Exponent {
                Exponent(self.0 $op rhs.0)
            }
        }
        impl $tr<&Exponent> for Exponent {
            type Output = Exponent;
            fn $m(self, rhs: &Exponent) -> Exponent {
                Exponent(self.0 $op &rhs.0)
            }
        }
    };
}
exponent_binop!(Add, add, +);
exponent_binop!(Sub, sub, -);

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(-self.0)
    }
}

impl Neg for &Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent(-&self.0)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Exponent::parse(&s).map_err(de::Error::custom)
    }
}

/// Absolute precision: a series is known modulo `T^N`, or exactly.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Precision {
    Finite(Exponent),
    Infinite,
}

impl Precision {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Precision::Infinite)
    }

    pub fn finite(&self) -> Option<&Exponent> {
        match self {
            Precision::Finite(e) => Some(e),
            Precision::Infinite => None,
        }
    }

    /// `self + e`, with `∞ + e = ∞`.
    pub fn shift(&self, e: &Exponent) -> Precision {
        match self {
            Precision::Finite(p) => Precision::Finite(p + e),
            Precision::Infinite => Precision::Infinite,
        }
    }

    /// Whether an exponent lies strictly below this precision.
    pub fn admits(&self, e: &Exponent) -> bool {
        match self {
            Precision::Finite(p) => e < p,
            Precision::Infinite => true,
        }
    }
}

impl From<Exponent> for Precision {
    fn from(e: Exponent) -> Self {
        Precision::Finite(e)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Finite(e) => write!(f, "{e}"),
            Precision::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Precision {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Precision {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(Precision::Infinite);
        }
        Exponent::parse(&s).map(Precision::Finite).map_err(de::Error::custom)
    }
}

/// Result of [`NovikovSeries::val`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(Exponent),
    /// No term is known: the series is zero modulo the given precision
    /// (or exactly zero when the precision is infinite).
    Infinite {
        known_to: Precision,
    },
}

impl Valuation {
    pub fn finite(&self) -> Option<&Exponent> {
        match self {
            Valuation::Finite(e) => Some(e),
            Valuation::Infinite { .. } => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(e) => write!(f, "{e}"),
            Valuation::Infinite { known_to: Precision::Infinite } => write!(f, "inf"),
            Valuation::Infinite { known_to } => write!(f, "inf (>= {known_to})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NovikovSeries {
    terms: Vec<(Exponent, Rational)>,
    precision: Precision,
}

impl NovikovSeries {
    pub fn zero() -> Self {
        NovikovSeries { terms: Vec::new(), precision: Precision::Infinite }
    }

    /// Zero modulo `T^prec`.
    pub fn zero_mod(prec: Precision) -> Self {
        NovikovSeries { terms: Vec::new(), precision: prec }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, Exponent::zero())
    }

    /// The exact monomial `c T^e`.
    pub fn monomial(c: Rational, e: Exponent) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(e, c)] };
        NovikovSeries { terms, precision: Precision::Infinite }
    }

    /// `T^e` exactly.
    pub fn t_pow(e: Exponent) -> Self {
        Self::monomial(Rational::one(), e)
    }

    /// Builds a series from arbitrary `(coefficient, exponent)` pairs:
    /// like exponents are merged, zeros and terms beyond `precision` dropped.
    pub fn from_terms<I>(terms: I, precision: Precision) -> Self
    where
        I: IntoIterator<Item = (Rational, Exponent)>,
    {
        let mut acc: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (c, e) in terms {
            if precision.admits(&e) {
                *acc.entry(e).or_insert_with(Rational::zero) += c;
            }
        }
        Self::from_map(acc, precision)
    }

    fn from_map(acc: BTreeMap<Exponent, Rational>, precision: Precision) -> Self {
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        NovikovSeries { terms, precision }
    }

    pub fn terms(&self) -> &[(Exponent, Rational)] {
        &self.terms
    }

    pub fn precision(&self) -> &Precision {
        &self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_infinite()
    }

    /// No known term: zero, possibly only modulo the precision.
    pub fn is_zero_mod_precision(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.precision.is_infinite()
    }

    pub fn val(&self) -> Valuation {
        match self.terms.first() {
            Some((e, _)) => Valuation::Finite(e.clone()),
            None => Valuation::Infinite { known_to: self.precision.clone() },
        }
    }

    /// Smallest stored exponent.
    pub fn valuation(&self) -> Option<&Exponent> {
        self.terms.first().map(|(e, _)| e)
    }

    /// A lower bound for the true valuation: the leading exponent, or the
    /// precision when nothing is known.
    pub fn val_lower_bound(&self) -> Precision {
        match self.terms.first() {
            Some((e, _)) => Precision::Finite(e.clone()),
            None => self.precision.clone(),
        }
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.first().map(|(_, c)| c)
    }

    /// Coefficient of `T^e` (zero when absent).
    pub fn coefficient(&self, e: &Exponent) -> Rational {
        self.terms
            .binary_search_by(|(x, _)| x.cmp(e))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn max_exponent(&self) -> Option<&Exponent> {
        self.terms.last().map(|(e, _)| e)
    }

    /// Reduce modulo `T^prec` (never raises the precision).
    pub fn truncate(&self, prec: &Precision) -> Self {
        let precision = self.precision.clone().min(prec.clone());
        let terms = self.terms.iter().filter(|(e, _)| precision.admits(e)).cloned().collect();
        NovikovSeries { terms, precision }
    }

    /// Forget the precision and treat the known terms as an exact value.
    pub fn to_exact(&self) -> Self {
        NovikovSeries { terms: self.terms.clone(), precision: Precision::Infinite }
    }

    /// Agreement modulo `T^prec` of the known terms of both series.
    pub fn eq_mod(&self, other: &Self, prec: &Exponent) -> bool {
        let p = Precision::Finite(prec.clone());
        self.truncate(&p).terms == other.truncate(&p).terms
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        NovikovSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * r)).collect(),
            precision: self.precision.clone(),
        }
    }

    /// Multiply by `T^e`; the precision shifts along.
    pub fn shift(&self, e: &Exponent) -> Self {
        NovikovSeries {
            terms: self.terms.iter().map(|(x, c)| (x + e, c.clone())).collect(),
            precision: self.precision.shift(e),
        }
    }

    fn add_impl(&self, other: &Self, sign: bool) -> Self {
        let precision = self.precision.clone().min(other.precision.clone());
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            let (e, c) = match ord {
                Ordering::Less => {
                    i += 1;
                    (a[i - 1].0.clone(), a[i - 1].1.clone())
                }
                Ordering::Greater => {
                    j += 1;
                    let c = if sign { b[j - 1].1.clone() } else { -&b[j - 1].1 };
                    (b[j - 1].0.clone(), c)
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    let c = if sign { &a[i - 1].1 + &b[j - 1].1 } else { &a[i - 1].1 - &b[j - 1].1 };
                    (a[i - 1].0.clone(), c)
                }
            };
            if !precision.admits(&e) {
                break;
            }
            if !c.is_zero() {
                out.push((e, c));
            }
        }
        NovikovSeries { terms: out, precision }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_impl(other, true)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_impl(other, false)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    fn product_precision(&self, other: &Self) -> Precision {
        let side = |p: &Precision, v: Precision| match (p, v) {
            (Precision::Finite(p), Precision::Finite(v)) => Precision::Finite(p + &v),
            _ => Precision::Infinite,
        };
        side(&self.precision, other.val_lower_bound()).min(side(&other.precision, self.val_lower_bound()))
    }

    /// Product with the standard adic precision rule
    /// `min(prec_x + val y, prec_y + val x)`.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_to(other, &self.product_precision(other))
    }

    /// Product additionally reduced modulo `T^cap`, without computing the
    /// discarded terms.
    pub fn mul_trunc(&self, other: &Self, cap: &Precision) -> Self {
        self.mul_to(other, &self.product_precision(other).min(cap.clone()))
    }

    fn mul_to(&self, other: &Self, precision: &Precision) -> Self {
        let mut acc: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if !precision.admits(&e) {
                    // `other` is sorted, later terms only get larger.
                    break;
                }
                *acc.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Self::from_map(acc, precision.clone())
    }

    /// `1/x` modulo `T^target`. The result precision is further limited by the
    /// precision of `x`: relative precision is preserved.
    pub fn invert(&self, target: &Exponent) -> Result<Self> {
        let (v, c) = match self.terms.first() {
            Some((v, c)) => (v.clone(), c.clone()),
            None => return Err(Error::NotInvertible(self.precision.clone())),
        };
        let mut prec = Precision::Finite(target.clone());
        if let Precision::Finite(p) = &self.precision {
            prec = prec.min(Precision::Finite(p - &v - &v));
        }
        let c_inv = c.recip();
        let inv_v = -&v;
        // x = c T^v (1 + y), 1/x = c^{-1} T^{-v} Σ (-y)^n
        let y = NovikovSeries {
            terms: self.terms[1..].iter().map(|(e, a)| (e - &v, a * &c_inv)).collect(),
            precision: self.precision.shift(&inv_v),
        };
        let rel = match &prec {
            Precision::Finite(p) => Precision::Finite(p + &v),
            Precision::Infinite => unreachable!(),
        };
        // b_e = -Σ_a y_a b_{e-a}, exponents visited in increasing order
        let mut coeffs: BTreeMap<Exponent, Rational> = BTreeMap::new();
        let mut pending = BTreeSet::from([Exponent::zero()]);
        while let Some(e) = pending.pop_first() {
            let mut b = if e.is_zero() { Rational::one() } else { Rational::zero() };
            for (a, ya) in &y.terms {
                if a > &e {
                    break;
                }
                if let Some(prev) = coeffs.get(&(&e - a)) {
                    b -= ya * prev;
                }
            }
            for (a, _) in &y.terms {
                let next = &e + a;
                if rel.admits(&next) {
                    pending.insert(next);
                }
            }
            if !b.is_zero() {
                coeffs.insert(e, b);
            }
        }
        let sum = Self::from_map(coeffs, rel.clone());
        let mut out = sum.scale(&c_inv).shift(&inv_v);
        out.precision = out.precision.min(prec.clone());
        Ok(out.truncate(&prec))
    }

    /// `x^n` modulo `T^cap` for any integer `n` (negative powers invert).
    pub fn pow(&self, n: i64, cap: &Exponent) -> Result<Self> {
        let capp = Precision::Finite(cap.clone());
        let base = if n < 0 {
            // 1/x must be known to cap - (|n|-1)·val(1/x) for the product.
            let v = self.valuation().cloned().ok_or_else(|| Error::NotInvertible(self.precision.clone()))?;
            let extra = v.times(n.unsigned_abs() as i64 - 1);
            self.invert(&(cap + &extra))?
        } else {
            self.clone()
        };
        let mut e = n.unsigned_abs();
        let mut result = NovikovSeries::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&sq).truncate(&capp);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq).truncate(&capp);
            }
        }
        Ok(result.truncate(&capp))
    }

    /// `self / other` modulo `T^target`.
    pub fn div(&self, other: &Self, target: &Exponent) -> Result<Self> {
        let vo = other.valuation().cloned().ok_or_else(|| Error::NotInvertible(other.precision.clone()))?;
        let tp = Precision::Finite(target.clone());
        match self.val_lower_bound() {
            Precision::Infinite => Ok(NovikovSeries::zero()),
            Precision::Finite(vs) => {
                if self.terms.is_empty() {
                    return Ok(NovikovSeries::zero_mod(Precision::Finite(&vs - &vo)).truncate(&tp));
                }
                let inv = other.invert(&(target - &vs))?;
                Ok(self.mul(&inv).truncate(&tp))
            }
        }
    }
}

impl Default for NovikovSeries {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &NovikovSeries {
    type Output = NovikovSeries;
    fn add(self, rhs: &NovikovSeries) -> NovikovSeries {
        NovikovSeries::add(self, rhs)
    }
}

impl Sub for &NovikovSeries {
    type Output = NovikovSeries;
    fn sub(self, rhs: &NovikovSeries) -> NovikovSeries {
        NovikovSeries::sub(self, rhs)
    }
}

impl Mul for &NovikovSeries {
    type Output = NovikovSeries;
    fn mul(self, rhs: &NovikovSeries) -> NovikovSeries {
        NovikovSeries::mul(self, rhs)
    }
}

impl Neg for &NovikovSeries {
    type Output = NovikovSeries;
    fn neg(self) -> NovikovSeries {
        NovikovSeries::neg(self)
    }
}

impl fmt::Display for NovikovSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let unit = a.is_one();
            match (e.is_zero(), unit) {
                (true, _) => write!(f, "{a}")?,
                (false, true) => write!(f, "T^({e})")?,
                (false, false) => write!(f, "{a}*T^({e})")?,
            }
        }
        if let Precision::Finite(p) = &self.precision {
            write!(f, " + O(T^({p}))")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SeriesItem {
    Term { c: String, e: String },
    Prec { prec: String },
}

/// JSON form: an array of `{"c": "p/q", "e": "p/q"}` terms followed by one
/// `{"prec": "p/q" | "inf"}` entry. A missing `prec` entry means exact.
impl Serialize for NovikovSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len() + 1))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&SeriesItem::Term { c: c.to_string(), e: e.to_string() })?;
        }
        seq.serialize_element(&SeriesItem::Prec { prec: self.precision.to_string() })?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for NovikovSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<SeriesItem>::deserialize(d)?;
        let mut precision = Precision::Infinite;
        let mut terms = Vec::new();
        let mut seen_prec = false;
        for item in items {
            match item {
                SeriesItem::Term { c, e } => {
                    let c = parse_rational(&c).map_err(de::Error::custom)?;
                    let e = Exponent::parse(&e).map_err(de::Error::custom)?;
                    terms.push((c, e));
                }
                SeriesItem::Prec { prec } => {
                    if seen_prec {
                        return Err(de::Error::custom("duplicate prec entry"));
                    }
                    seen_prec = true;
                    if prec.trim() != "inf" {
                        precision = Precision::Finite(Exponent::parse(&prec).map_err(de::Error::custom)?);
                    }
                }
            }
        }
        if let Precision::Finite(p) = &precision {
            if let Some((_, e)) = terms.iter().find(|(_, e)| e >= p) {
                return Err(de::Error::custom(format!("term exponent {e} not below precision {p}")));
            }
        }
        Ok(NovikovSeries::from_terms(terms, precision))
    }
}

/// Serde helper: a rational as its `p/q` string.
pub mod rational_str {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(de::Error::custom)
    }
}
