//! Scans over link families: the chain-link Hessian valuations and the
//! idempotent valuations of the undeformed symmetric product, as exact tables.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cliffordtrace::defect_bound;
use crate::critlift::{BranchSelector, LiftConfig};
use crate::error::{Error, Result};
use crate::linkfam::{critical_data, BulkParameter, CircleLinkS2};
use crate::novikov::{Exponent, Rational};
use crate::symprodqh::symk_idempotents;

/// Inclusive range of link sizes; empty when `start > end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct KRange {
    pub start: usize,
    pub end: usize,
}

impl From<(usize, usize)> for KRange {
    fn from((start, end): (usize, usize)) -> Self {
        KRange { start, end }
    }
}

impl From<KRange> for (usize, usize) {
    fn from(r: KRange) -> Self {
        (r.start, r.end)
    }
}

impl KRange {
    pub fn new(start: usize, end: usize) -> Self {
        KRange { start, end }
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }

    pub fn is_empty(&self) -> bool {
        self.start > self.end
    }
}

/// How the annulus area `A_k` follows from `B_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnulusRule {
    /// `(k − 1) A_k + 2 B_k = total`. With `None` the total is `omega`.
    TotalArea(Option<Exponent>),
    /// `A_k = r · B_k`.
    Ratio(Exponent),
}

impl Default for AnnulusRule {
    fn default() -> Self {
        AnnulusRule::TotalArea(None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AreaSchedule {
    /// `B_k = beta / (k + shift)^power`.
    PowerLaw {
        beta: Exponent,
        #[serde(default = "Exponent::zero")]
        shift: Exponent,
        power: u32,
        #[serde(default)]
        annulus: AnnulusRule,
    },
    /// `B_k = b` for every `k`.
    Constant {
        b: Exponent,
        #[serde(default)]
        annulus: AnnulusRule,
    },
}

impl AreaSchedule {
    fn disc(&self, k: usize) -> Result<Exponent> {
        match self {
            AreaSchedule::PowerLaw { beta, shift, power, .. } => {
                let base = Rational::from_integer((k as i64).into()) + shift.value();
                if !base.is_positive() {
                    return Err(Error::InvalidConfig(format!("k + shift = {base} must be positive")));
                }
                let mut denom = Rational::one();
                for _ in 0..*power {
                    denom *= &base;
                }
                Ok(beta.scale(&denom.recip()))
            }
            AreaSchedule::Constant { b, .. } => Ok(b.clone()),
        }
    }

    fn annulus(&self) -> &AnnulusRule {
        match self {
            AreaSchedule::PowerLaw { annulus, .. } | AreaSchedule::Constant { annulus, .. } => annulus,
        }
    }

    /// The link at size `k`; any invariant violation is reported with `k`.
    pub fn link(&self, k: usize, omega: &Exponent) -> Result<CircleLinkS2> {
        let at_k = |e: Error| Error::Schedule { k, source: Box::new(e) };
        let b = self.disc(k).map_err(at_k)?;
        let link = match self.annulus() {
            AnnulusRule::TotalArea(total) => {
                let total = total.clone().unwrap_or_else(|| omega.clone());
                // a single circle has no annulus; its area only has to be admissible
                let a = if k <= 1 {
                    b.scale(&Rational::new(1.into(), 2.into()))
                } else {
                    (&total - &b.times(2)).scale(&Rational::new(1.into(), (k as i64 - 1).into()))
                };
                CircleLinkS2::new(k, a, b, total)
            }
            AnnulusRule::Ratio(r) => CircleLinkS2::from_areas(k, b.scale(r.value()), b),
        };
        link.map_err(at_k)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub k_range: KRange,
    pub area_schedule: AreaSchedule,
    #[serde(default = "one", with = "crate::novikov::rational_str")]
    pub c0: Rational,
    /// Area of the sphere.
    #[serde(default = "unit_area")]
    pub omega: Exponent,
    #[serde(default)]
    pub output_format: OutputFormat,
}

fn one() -> Rational {
    Rational::one()
}

fn unit_area() -> Exponent {
    Exponent::from_int(1)
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_range.start == 0 {
            return Err(Error::InvalidConfig("k_range must start at 1 or above".into()));
        }
        if !self.omega.is_positive() {
            return Err(Error::NonPositiveOmega(self.omega.clone()));
        }
        if self.c0.is_zero() {
            return Err(Error::InvalidBulk("c0 must be nonzero".into()));
        }
        Ok(())
    }
}

/// One row of the Weyl scan. `val_z` is the valuation of the Hessian
/// determinant at the lifted critical point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeylRow {
    pub k: usize,
    #[serde(rename = "A")]
    pub a: Exponent,
    #[serde(rename = "B")]
    pub b: Exponent,
    pub val_z: Exponent,
    pub val_z_over_k: Exponent,
    pub defect_bound: Exponent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NobulkRow {
    pub k: usize,
    pub idempotent_count: usize,
    pub val_e: Exponent,
    pub val_e_over_k: Exponent,
}

fn per_k(e: &Exponent, k: usize) -> Exponent {
    e.scale(&Rational::new(1.into(), (k as i64).into()))
}

/// Chain-link critical data for every `k` in range. Stops at the first `k`
/// whose areas break the link invariants.
pub fn weyl_scan(cfg: &ScanConfig) -> Result<Vec<WeylRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for k in cfg.k_range.iter() {
        let link = cfg.area_schedule.link(k, &cfg.omega)?;
        let b = link.disc_area().clone();
        let bulk = BulkParameter::new(cfg.c0.clone(), &link)?;
        let lift = LiftConfig::new(b.times(k as i64 + 1), 64)?.with_branch(BranchSelector::Positive);
        let cert = critical_data(&link, &bulk, &lift)?;
        if !cert.morse {
            return Err(Error::NonMorse(cert.reason.unwrap_or_default()));
        }
        let bound = defect_bound(&cert.det)?;
        rows.push(WeylRow {
            k,
            a: link.annulus_area().clone(),
            b,
            val_z: bound.clone(),
            val_z_over_k: per_k(&bound, k),
            defect_bound: bound,
        });
    }
    Ok(rows)
}

/// Idempotent valuations of the invariant part of `QH(P¹)^{⊗k}`.
pub fn nobulk_scan(k_range: KRange, omega: &Exponent) -> Result<Vec<NobulkRow>> {
    let mut rows = Vec::new();
    for k in k_range.iter() {
        let es = symk_idempotents(k, omega)?;
        let vals: Vec<Exponent> =
            es.iter().map(|e| e.valuation().ok_or(Error::DegenerateTrace)).collect::<Result<_>>()?;
        let val_e = vals.iter().min().cloned().expect("k + 1 idempotents");
        rows.push(NobulkRow { k, idempotent_count: es.len(), val_e_over_k: per_k(&val_e, k), val_e });
    }
    Ok(rows)
}

/// A row with a fixed column order for CSV output.
pub trait ReportRow: Serialize {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

impl ReportRow for WeylRow {
    const HEADER: &'static [&'static str] = &["k", "A", "B", "val_Z", "val_Z_over_k", "defect_bound"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.a.to_string(),
            self.b.to_string(),
            self.val_z.to_string(),
            self.val_z_over_k.to_string(),
            self.defect_bound.to_string(),
        ]
    }
}

impl ReportRow for NobulkRow {
    const HEADER: &'static [&'static str] = &["k", "idempotent_count", "val_e", "val_e_over_k"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.idempotent_count.to_string(),
            self.val_e.to_string(),
            self.val_e_over_k.to_string(),
        ]
    }
}

pub fn to_csv<R: ReportRow>(rows: &[R]) -> String {
    let mut out = R::HEADER.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.fields().join(","));
        out.push('\n');
    }
    out
}

pub fn to_json<R: ReportRow>(rows: &[R]) -> Result<String> {
    serde_json::to_string_pretty(rows).map_err(|e| Error::Parse(e.to_string()))
}

pub fn render<R: ReportRow>(rows: &[R], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(to_csv(rows)),
        OutputFormat::Json => to_json(rows).map(|mut s| {
            s.push('\n');
            s
        }),
    }
}
