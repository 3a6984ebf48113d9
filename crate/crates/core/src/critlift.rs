//! Critical points of Laurent potentials over Λ.
//!
//! The leading-order gradient system is solved exactly over ℚ, then a
//! rational solution is lifted through the adic filtration by Newton
//! iteration in multiplicative coordinates: `z ← z·(1 + u)` with
//! `Hess(z) u = −∇(z)`. Only rational leading solutions are lifted.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{LaurentPotential, UnitaryPoint};
use crate::matrix::{determinant_leading, inverse, solve, Matrix};
use crate::novikov::{Exponent, NovikovSeries, Precision, Rational};
use crate::qpoly::{solve_on_torus, QPoly, TorusSolutions};

/// How to pick one leading solution among several.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum BranchSelector {
    /// Lexicographically smallest coordinate tuple.
    #[default]
    LexSmallest,
    LexLargest,
    /// The first solution (in lexicographic order) with all coordinates positive.
    Positive,
    /// Index into the sorted solution list.
    Index(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftConfig {
    target_precision: Exponent,
    max_steps: usize,
    pub branch_selector: BranchSelector,
}

impl LiftConfig {
    pub fn new(target_precision: Exponent, max_steps: usize) -> Result<Self> {
        if !target_precision.is_positive() {
            return Err(Error::InvalidConfig(format!("target precision {target_precision} must be positive")));
        }
        if max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be at least 1".into()));
        }
        Ok(LiftConfig { target_precision, max_steps, branch_selector: BranchSelector::default() })
    }

    pub fn with_branch(mut self, branch: BranchSelector) -> Self {
        self.branch_selector = branch;
        self
    }

    pub fn target_precision(&self) -> &Exponent {
        &self.target_precision
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalCertificate {
    pub point: UnitaryPoint,
    #[serde(skip)]
    pub hessian: Matrix,
    pub det: NovikovSeries,
    pub det_valuation: Option<Exponent>,
    pub morse: bool,
    pub reason: Option<String>,
    /// The gradient at `point` vanishes modulo `T^checked_precision`.
    pub checked_precision: Precision,
    /// `point` agrees with the true critical point modulo this precision.
    pub certified_precision: Precision,
    /// Residual valuation (capped at the target) before each Newton step.
    pub residual_valuations: Vec<Precision>,
}

/// The leading-order gradient system: for each component `z_i ∂_i W`, the
/// coefficients of its lowest-valuation monomials, as a polynomial over ℚ.
pub fn leading_system(w: &LaurentPotential) -> Vec<QPoly> {
    w.log_gradient()
        .iter()
        .map(|g| {
            let lowest = g.terms().values().filter_map(|c| c.valuation().cloned()).min();
            let terms = g.terms().iter().filter_map(|(m, c)| match (&lowest, c.valuation()) {
                (Some(l), Some(v)) if v == l => Some((m.clone(), c.leading_coefficient().cloned().unwrap())),
                _ => None,
            });
            QPoly::from_terms(w.num_vars(), terms)
        })
        .collect()
}

/// All rational solutions of the leading system, with a flag recording
/// whether some branch needed an extension of ℚ.
pub fn leading_analysis(w: &LaurentPotential) -> Result<TorusSolutions> {
    solve_on_torus(&leading_system(w), w.num_vars())
}

pub fn leading_solutions(w: &LaurentPotential) -> Result<Vec<UnitaryPoint>> {
    leading_analysis(w)?.points.iter().map(|p| UnitaryPoint::from_rationals(p)).collect()
}

pub fn select_branch(points: &[Vec<Rational>], selector: &BranchSelector) -> Result<Vec<Rational>> {
    let mut sorted = points.to_vec();
    sorted.sort();
    let count = sorted.len();
    let pick = match selector {
        BranchSelector::LexSmallest => sorted.first().cloned(),
        BranchSelector::LexLargest => sorted.last().cloned(),
        BranchSelector::Positive => {
            sorted.iter().find(|p| p.iter().all(|x| num_traits::Signed::is_positive(x))).or(sorted.first()).cloned()
        }
        BranchSelector::Index(i) => {
            return sorted.get(*i).cloned().ok_or(Error::BranchOutOfRange { index: *i, count });
        }
    };
    pick.ok_or(Error::NoLeadingSolution)
}

/// Leading solutions, then the configured branch; distinguishes "no
/// solution" from "only irrational solutions".
pub fn leading_branch(w: &LaurentPotential, selector: &BranchSelector) -> Result<UnitaryPoint> {
    let analysis = leading_analysis(w)?;
    if analysis.points.is_empty() {
        return Err(if analysis.irrational_branches {
            Error::RequiresExtensionField
        } else {
            Error::NoLeadingSolution
        });
    }
    UnitaryPoint::from_rationals(&select_branch(&analysis.points, selector)?)
}

fn check_dims(w: &LaurentPotential, z: &UnitaryPoint) -> Result<()> {
    if z.dim() != w.num_vars() {
        return Err(Error::DimensionMismatch { expected: w.num_vars(), found: z.dim() });
    }
    Ok(())
}

fn gradient_at(w: &LaurentPotential, z: &UnitaryPoint, prec: &Exponent) -> Result<Vec<NovikovSeries>> {
    w.log_gradient().iter().map(|g| g.evaluate(z, prec)).collect()
}

fn residual_valuation(g: &[NovikovSeries], cap: &Exponent) -> Precision {
    g.iter().map(|x| x.val_lower_bound()).min().unwrap_or(Precision::Infinite).min(Precision::Finite(cap.clone()))
}

fn min_valuation(m: &Matrix) -> Option<Exponent> {
    m.iter().flatten().filter_map(|x| x.valuation().cloned()).min()
}

fn max_valuation(m: &Matrix) -> Option<Exponent> {
    m.iter().flatten().filter_map(|x| x.valuation().cloned()).max()
}

/// Log-Hessian at `z` evaluated far enough that its determinant's leading
/// term is visible (when the point's own precision allows it).
fn hessian_with_leading_det(
    w: &LaurentPotential,
    z: &UnitaryPoint,
    start: &Exponent,
) -> Result<(Matrix, NovikovSeries)> {
    let n = w.num_vars() as i64;
    let mut prec = start.clone();
    let mut last: Option<(Matrix, NovikovSeries)> = None;
    for _ in 0..8 {
        let h = w.log_hessian_at(z, &prec)?;
        let det = determinant_leading(&h, &prec)?;
        if !det.is_zero_mod_precision() {
            return Ok((h, det));
        }
        if let Some((_, prev)) = &last {
            if prev.precision() >= det.precision() {
                return Ok((h, det));
            }
        }
        let spread = match (min_valuation(&h), max_valuation(&h)) {
            (Some(lo), Some(hi)) => (hi - lo).times(n),
            _ => Exponent::zero(),
        };
        prec = prec.times(2).max(&prec + &spread) + Exponent::from_int(1);
        last = Some((h, det));
    }
    Ok(last.expect("at least one attempt"))
}

/// Default precision for checking criticality at a point: the point's own
/// precision shifted by the lowest coefficient valuation, or, for an exact
/// point, past every exponent that can appear in the gradient.
fn default_check_precision(w: &LaurentPotential, z: &UnitaryPoint) -> Exponent {
    let lowest = w.min_coefficient_valuation().unwrap_or_else(Exponent::zero);
    match z.precision() {
        Precision::Finite(p) => p + lowest,
        Precision::Infinite => {
            let top = w.terms().values().filter_map(|c| c.max_exponent().cloned()).max().unwrap_or_else(Exponent::zero);
            let zmax = z.coords().iter().filter_map(|c| c.max_exponent().cloned()).max().unwrap_or_else(Exponent::zero);
            let deg = w.terms().keys().flat_map(|m| m.iter().map(|e| e.abs())).max().unwrap_or(0).max(1);
            top.max(Exponent::zero()) + zmax.times(2 * deg) + Exponent::from_int(1)
        }
    }
}

fn exactly_critical(w: &LaurentPotential, z: &UnitaryPoint) -> Result<bool> {
    if z.precision() != Precision::Infinite {
        return Ok(false);
    }
    let grad = gradient_at(w, z, &default_check_precision(w, z))?;
    Ok(grad.iter().all(|g| g.is_zero_mod_precision()))
}

fn certify_at(w: &LaurentPotential, z: &UnitaryPoint, check: &Exponent) -> Result<CriticalCertificate> {
    check_dims(w, z)?;
    let grad = gradient_at(w, z, check)?;
    let critical = grad.iter().all(|g| g.is_zero_mod_precision());
    let (hessian, det) = hessian_with_leading_det(w, z, check)?;
    let det_valuation = det.valuation().cloned();
    let mut reason = None;
    if !critical {
        let v = residual_valuation(&grad, check);
        reason = Some(format!("gradient does not vanish: residual valuation {v}"));
    } else if det_valuation.is_none() {
        reason = Some(format!("Hessian determinant vanishes modulo T^{}", det.precision()));
    }
    let morse = reason.is_none();
    let certified_precision = if morse {
        certified(&hessian, check).unwrap_or_else(|| z.precision())
    } else {
        Precision::Finite(Exponent::zero())
    };
    Ok(CriticalCertificate {
        point: z.clone(),
        hessian,
        det,
        det_valuation,
        morse,
        reason,
        checked_precision: Precision::Finite(check.clone()),
        certified_precision,
        residual_valuations: Vec::new(),
    })
}

/// `check + min val(H⁻¹)`: how far a point with residual `≡ 0 mod T^check`
/// is pinned down.
fn certified(h: &Matrix, check: &Exponent) -> Option<Precision> {
    let lo = min_valuation(h)?;
    let hi = max_valuation(h)?;
    let n = h.len() as i64;
    let wp = check + &(hi - lo.clone()).times(2 * n) + lo.times(-n).max(Exponent::zero()) + Exponent::from_int(1);
    let inv = inverse(h, &wp).ok()?;
    let iv = min_valuation(&inv)?;
    Some(Precision::Finite(check + &iv))
}

/// Morse certificate at `z`: the gradient must vanish to the point's
/// precision and the log-Hessian determinant must have a nonzero leading term.
pub fn certify_morse(w: &LaurentPotential, z: &UnitaryPoint) -> Result<CriticalCertificate> {
    check_dims(w, z)?;
    certify_at(w, z, &default_check_precision(w, z))
}

/// Same as [`certify_morse`] but with an explicit precision for the gradient check.
pub fn certify_morse_to(w: &LaurentPotential, z: &UnitaryPoint, precision: &Exponent) -> Result<CriticalCertificate> {
    certify_at(w, z, precision)
}

/// Newton lift of a leading-order solution to a critical point modulo
/// `T^target`.
pub fn hensel_lift(w: &LaurentPotential, z0: &UnitaryPoint, cfg: &LiftConfig) -> Result<CriticalCertificate> {
    check_dims(w, z0)?;
    let target = cfg.target_precision().clone();
    let n = w.num_vars() as i64;
    let mut z = z0.to_exact();

    let (h0, det0) = hessian_with_leading_det(w, &z, &target)?;
    let Some(dv) = det0.valuation().cloned() else {
        return Err(Error::NonMorse(format!("log-Hessian determinant vanishes modulo T^{}", det0.precision())));
    };
    let hmin = min_valuation(&h0).expect("nonzero determinant has nonzero entries");
    // val(H⁻¹) >= (n-1)·hmin - val(det)
    let inv_bound = hmin.times(n - 1) - &dv;
    let g0 = gradient_at(w, &z, &target)?;
    let gv = match residual_valuation(&g0, &target) {
        Precision::Finite(v) => v,
        Precision::Infinite => target.clone(),
    };
    let needed = &target - &hmin;
    let mut slack = (-&inv_bound - &hmin).max(Exponent::zero())
        + (-&gv).max(Exponent::zero())
        + hmin.clone().max(-&hmin).max(Exponent::new(1, 8));

    let mut residuals = Vec::new();
    let mut steps = 0;
    loop {
        let wp = &target + &slack;
        let grad = gradient_at(w, &z, &wp)?;
        let rv = residual_valuation(&grad, &target);
        if residuals.len() == steps {
            residuals.push(rv.clone());
        }
        if grad.iter().all(|g| g.truncate(&Precision::Finite(target.clone())).is_zero_mod_precision()) {
            break;
        }
        if steps >= cfg.max_steps() {
            return Err(Error::LiftStalled { target, steps });
        }
        let order = rv.finite().cloned().unwrap_or_else(|| target.clone());
        let h = w.log_hessian_at(&z, &wp)?;
        let rhs: Vec<NovikovSeries> = grad.iter().map(|g| g.neg()).collect();
        let u = match solve(&h, &rhs, &wp) {
            Ok(u) => u,
            Err(Error::NotInvertible(_)) => {
                return Err(Error::NonMorse(format!("log-Hessian singular at step {steps}")))
            }
            Err(e) => return Err(e),
        };
        if u.iter().any(|ui| ui.valuation().is_some_and(|v| !v.is_positive())) {
            return Err(Error::Obstructed { order });
        }
        let need = Precision::Finite(needed.clone());
        if u.iter().any(|ui| ui.precision() < &need) {
            // Not enough working precision to resolve this correction.
            slack = slack.times(2);
            continue;
        }
        let coords: Vec<NovikovSeries> = z
            .coords()
            .iter()
            .zip(&u)
            .map(|(zi, ui)| {
                let u = ui.truncate(&need).to_exact();
                zi.add(&zi.mul_trunc(&u, &Precision::Finite(wp.clone())))
                    .truncate(&Precision::Finite(wp.clone()))
                    .to_exact()
            })
            .collect();
        z = UnitaryPoint::new(coords)?;
        steps += 1;
    }

    let mut cert = certify_at(w, &z, &target)?;
    if !cert.morse {
        return Err(Error::NonMorse(cert.reason.unwrap_or_default()));
    }
    if steps > 0 || !exactly_critical(w, &z)? {
        cert.point = z.truncate(&cert.certified_precision);
    }
    cert.residual_valuations = residuals;
    Ok(cert)
}
