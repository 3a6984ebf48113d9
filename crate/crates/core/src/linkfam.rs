//! The k-circle chain link on S² and its bulk-deformed disc potential, plus
//! the truncation test for product links.

use serde::{Deserialize, Serialize};

use crate::critlift::{hensel_lift, leading_analysis, leading_branch, CriticalCertificate, LiftConfig};
use crate::error::{Error, Result};
use crate::laurent::{LaurentPotential, Monomial, UnitaryPoint};
use crate::novikov::{Exponent, NovikovSeries, Precision, Rational};

/// `k` disjoint circles on S² cutting it into two discs of area `B` and
/// `k − 1` annuli of area `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleLinkS2 {
    k: usize,
    a: Exponent,
    b: Exponent,
    total_area: Exponent,
}

impl CircleLinkS2 {
    pub fn new(k: usize, a: Exponent, b: Exponent, total_area: Exponent) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("a link needs at least one circle".into()));
        }
        if !a.is_positive() || a >= b {
            return Err(Error::NotEtaMonotone { annulus: a, disc: b });
        }
        let found = a.times(k as i64 - 1) + b.times(2);
        if found != total_area {
            return Err(Error::AreasInconsistent { found, total: total_area });
        }
        Ok(CircleLinkS2 { k, a, b, total_area })
    }

    /// Link whose sphere area is whatever the given annuli and discs add up to.
    pub fn from_areas(k: usize, a: Exponent, b: Exponent) -> Result<Self> {
        let total = a.times(k as i64 - 1) + b.times(2);
        Self::new(k, a, b, total)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn annulus_area(&self) -> &Exponent {
        &self.a
    }

    pub fn disc_area(&self) -> &Exponent {
        &self.b
    }

    pub fn total_area(&self) -> &Exponent {
        &self.total_area
    }
}

/// The bulk parameter `c` with `val(c) = (B − A)/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BulkParameter {
    c0: Rational,
    base_val: Exponent,
    higher_terms: Option<NovikovSeries>,
}

impl BulkParameter {
    pub fn new(c0: Rational, link: &CircleLinkS2) -> Result<Self> {
        if num_traits::Zero::is_zero(&c0) {
            return Err(Error::InvalidBulk("leading coefficient c0 must be nonzero".into()));
        }
        let base_val = (link.disc_area() - link.annulus_area()).scale(&Rational::new(1.into(), 2.into()));
        Ok(BulkParameter { c0, base_val, higher_terms: None })
    }

    /// Adds a tail to `c`; every term must lie strictly above the base valuation.
    pub fn with_higher_terms(mut self, tail: NovikovSeries) -> Result<Self> {
        if tail.val_lower_bound() <= Precision::Finite(self.base_val.clone()) {
            return Err(Error::InvalidBulk(format!("tail must have valuation above {}", self.base_val)));
        }
        self.higher_terms = Some(tail);
        Ok(self)
    }

    pub fn c0(&self) -> &Rational {
        &self.c0
    }

    pub fn base_val(&self) -> &Exponent {
        &self.base_val
    }

    pub fn value(&self) -> NovikovSeries {
        let lead = NovikovSeries::monomial(self.c0.clone(), self.base_val.clone());
        match &self.higher_terms {
            Some(t) => lead.add(t),
            None => lead,
        }
    }
}

fn unit_vector(k: usize, i: usize, e: i64) -> Monomial {
    let mut m = vec![0; k];
    m[i] = e;
    m
}

/// `T^B z₁ + T^B z_k⁻¹ + c² T^A Σ_{j<k} (z_j⁻¹ + z_{j+1})`.
pub fn build_chain_potential(link: &CircleLinkS2, bulk: &BulkParameter) -> Result<LaurentPotential> {
    let k = link.k();
    let disc = NovikovSeries::t_pow(link.disc_area().clone());
    let c = bulk.value();
    let annulus = c.mul(&c).mul(&NovikovSeries::t_pow(link.annulus_area().clone()));
    let mut w = LaurentPotential::new(k);
    w.add_term(unit_vector(k, 0, 1), disc.clone())?;
    w.add_term(unit_vector(k, k - 1, -1), disc)?;
    for j in 0..k - 1 {
        w.add_term(unit_vector(k, j, -1), annulus.clone())?;
        w.add_term(unit_vector(k, j + 1, 1), annulus.clone())?;
    }
    Ok(w)
}

/// The relabelling `z_j ↦ z_{k+1−j}⁻¹`.
pub fn reflect(w: &LaurentPotential) -> Result<LaurentPotential> {
    w.map_monomials(|m| m.iter().rev().map(|e| -e).collect())
}

/// Lifts the chosen leading branch of the chain potential and certifies it.
pub fn critical_data(link: &CircleLinkS2, bulk: &BulkParameter, cfg: &LiftConfig) -> Result<CriticalCertificate> {
    let w = build_chain_potential(link, bulk)?;
    critical_data_for(&w, cfg)
}

/// Same as [`critical_data`] for an already assembled potential (for
/// instance the chain potential plus extra monomials).
pub fn critical_data_for(w: &LaurentPotential, cfg: &LiftConfig) -> Result<CriticalCertificate> {
    let z0 = leading_branch(w, &cfg.branch_selector)?;
    hensel_lift(w, &z0, cfg)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TruncationOutcome {
    Unobstructed {
        points: Vec<UnitaryPoint>,
        irrational_branches: bool,
    },
    Obstructed {
        order: Exponent,
    },
    /// The truncated leading system has a positive-dimensional solution set
    /// (or nothing survived the truncation).
    Degenerate {
        reason: String,
    },
}

impl TruncationOutcome {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, TruncationOutcome::Obstructed { .. })
    }
}

/// Keeps the monomials of `W` with coefficient valuation `≤ cutoff` and asks
/// whether the leading gradient system of what remains has a unitary solution.
pub fn truncation_obstruction(w: &LaurentPotential, cutoff: &Exponent) -> TruncationOutcome {
    let truncated = w.truncate_by_valuation(cutoff);
    let Some(order) = truncated.min_coefficient_valuation() else {
        return TruncationOutcome::Degenerate { reason: format!("no monomial of valuation at most {cutoff}") };
    };
    match leading_analysis(&truncated) {
        Ok(sol) if sol.points.is_empty() && !sol.irrational_branches => TruncationOutcome::Obstructed { order },
        Ok(sol) => {
            let points = sol.points.iter().filter_map(|p| UnitaryPoint::from_rationals(p).ok()).collect();
            TruncationOutcome::Unobstructed { points, irrational_branches: sol.irrational_branches }
        }
        Err(e) => TruncationOutcome::Degenerate { reason: e.to_string() },
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtraTerm {
    pub m: Monomial,
    pub coeff: NovikovSeries,
}

/// JSON configuration for a chain link; `total_area` defaults to the sum of
/// the annulus and disc areas.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub k: usize,
    #[serde(rename = "A")]
    pub a: Exponent,
    #[serde(rename = "B")]
    pub b: Exponent,
    #[serde(default = "default_c0", with = "crate::novikov::rational_str")]
    pub c0: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_area: Option<Exponent>,
    #[serde(default)]
    pub extra_terms: Vec<ExtraTerm>,
}

fn default_c0() -> Rational {
    Rational::from_integer(1.into())
}

impl ChainConfig {
    pub fn link(&self) -> Result<CircleLinkS2> {
        match &self.total_area {
            Some(t) => CircleLinkS2::new(self.k, self.a.clone(), self.b.clone(), t.clone()),
            None => CircleLinkS2::from_areas(self.k, self.a.clone(), self.b.clone()),
        }
    }

    /// Chain potential with the extra monomials added.
    pub fn potential(&self) -> Result<LaurentPotential> {
        let link = self.link()?;
        let bulk = BulkParameter::new(self.c0.clone(), &link)?;
        let mut w = build_chain_potential(&link, &bulk)?;
        for t in &self.extra_terms {
            w.add_term(t.m.clone(), t.coeff.clone())?;
        }
        Ok(w)
    }
}
