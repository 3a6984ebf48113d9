//! Model action spectra of symmetric products, Fekete homogenisation and the
//! discrete spectral-rigidity check.

use std::collections::BTreeSet;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::novikov::Rational;

/// Largest number of points a window enumeration may produce.
pub const MAX_SPECTRUM_POINTS: usize = 1_000_000;

/// Action per unit period of each orbit class; stored sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ModelOrbitSet {
    values: Vec<Rational>,
}

impl ModelOrbitSet {
    pub fn new<I: IntoIterator<Item = Rational>>(values: I) -> Self {
        let set: BTreeSet<Rational> = values.into_iter().collect();
        ModelOrbitSet { values: set.into_iter().collect() }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Every value translated by `s`.
    pub fn shifted(&self, s: &Rational) -> Self {
        ModelOrbitSet::new(self.values.iter().map(|v| v + s))
    }

    pub fn union(&self, other: &Self) -> Self {
        ModelOrbitSet::new(self.values.iter().chain(&other.values).cloned())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumConfig {
    k: usize,
    pi_generator: Rational,
    lo: Rational,
    hi: Rational,
}

impl SpectrumConfig {
    pub fn new(k: usize, pi_generator: Rational, lo: Rational, hi: Rational) -> Result<Self> {
        if !pi_generator.is_positive() {
            return Err(Error::InvalidConfig(format!("generator of Π must be positive, got {pi_generator}")));
        }
        if lo > hi {
            return Err(Error::InvalidConfig(format!("empty window [{lo}, {hi}]")));
        }
        Ok(SpectrumConfig { k, pi_generator, lo, hi })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pi_generator(&self) -> &Rational {
        &self.pi_generator
    }

    pub fn window(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }
}

/// All sums of `k` orbit values (periods summing to `k`).
fn period_sums(orbits: &ModelOrbitSet, k: usize) -> BTreeSet<Rational> {
    let mut sums = BTreeSet::from([Rational::zero()]);
    for _ in 0..k {
        sums = sums.iter().flat_map(|s| orbits.values.iter().map(move |v| s + v)).collect();
    }
    sums
}

/// `{Σ p_i v_{j_i} : Σ p_i = k} + Π_k`, intersected with the window.
pub fn enumerate_spectrum(orbits: &ModelOrbitSet, cfg: &SpectrumConfig) -> Result<Vec<Rational>> {
    if orbits.is_empty() && cfg.k >= 1 {
        return Err(Error::NoOrbits);
    }
    let pi = &cfg.pi_generator;
    let mut out = BTreeSet::new();
    for s in period_sums(orbits, cfg.k) {
        let first = ((&cfg.lo - &s) / pi).ceil().to_integer();
        let last = ((&cfg.hi - &s) / pi).floor().to_integer();
        if last < first {
            continue;
        }
        let count = (&last - &first).to_usize().unwrap_or(usize::MAX);
        if count >= MAX_SPECTRUM_POINTS || out.len() + count >= MAX_SPECTRUM_POINTS {
            return Err(Error::InvalidConfig(format!("window holds more than {MAX_SPECTRUM_POINTS} points")));
        }
        let mut n = first;
        while n <= last {
            out.insert(&s + pi * Rational::from_integer(n.clone()));
            n += 1;
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeketeEstimate {
    /// `min_{m ≤ M} c_m / m`.
    pub estimate: Rational,
    /// `[min c_m/m, c_M/M]`.
    pub bracket: (Rational, Rational),
    /// Index attaining the minimum.
    pub argmin: usize,
}

/// Homogenisation of a subadditive sequence `c_1, …, c_M`.
pub fn fekete_homogenize(c: &[Rational]) -> Result<FeketeEstimate> {
    let big_m = c.len();
    if big_m == 0 {
        return Err(Error::InvalidConfig("empty sequence".into()));
    }
    for m in 1..=big_m {
        for n in m..=big_m - m {
            if c[m + n - 1] > &c[m - 1] + &c[n - 1] {
                return Err(Error::SubadditivityViolation { m, n });
            }
        }
    }
    let (argmin, estimate) = c
        .iter()
        .enumerate()
        .map(|(i, v)| (i + 1, v / Rational::from_integer((i as i64 + 1).into())))
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("nonempty");
    let upper = &c[big_m - 1] / Rational::from_integer((big_m as i64).into());
    Ok(FeketeEstimate { estimate: estimate.clone(), bracket: (estimate, upper), argmin })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Rigidity {
    Constant,
    /// First index whose sample differs from the previous one.
    Violation {
        index: usize,
    },
}

/// Smallest distance between consecutive distinct points of a sorted set.
pub fn spectrum_gap(spectrum: &[Rational]) -> Option<Rational> {
    spectrum.windows(2).filter(|w| w[0] != w[1]).map(|w| (&w[1] - &w[0]).abs()).min()
}

/// A path moving by at most `step_bound` per sample and confined to a set
/// whose gaps exceed the bound cannot change value.
pub fn rigidity_check(spectrum: &[Rational], samples: &[Rational], step_bound: &Rational) -> Result<Rigidity> {
    let mut sorted = spectrum.to_vec();
    sorted.sort();
    sorted.dedup();
    if let Some(gap) = spectrum_gap(&sorted) {
        if gap <= *step_bound {
            return Err(Error::InsufficientSeparation { gap: gap.to_string(), step: step_bound.to_string() });
        }
    }
    for (index, s) in samples.iter().enumerate() {
        if sorted.binary_search(s).is_err() {
            return Err(Error::SpectralityViolated { index });
        }
    }
    Ok(samples
        .windows(2)
        .position(|w| w[0] != w[1])
        .map_or(Rigidity::Constant, |i| Rigidity::Violation { index: i + 1 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novikov::rat;

    fn cfg(k: usize, pi: Rational, lo: i64, hi: i64) -> SpectrumConfig {
        SpectrumConfig::new(k, pi, rat(lo, 1), rat(hi, 1)).unwrap()
    }

    #[test]
    fn zero_orbit_gives_lattice() {
        let o = ModelOrbitSet::new([rat(0, 1)]);
        let s = enumerate_spectrum(&o, &cfg(3, rat(1, 2), -1, 1)).unwrap();
        assert_eq!(s, vec![rat(-1, 1), rat(-1, 2), rat(0, 1), rat(1, 2), rat(1, 1)]);
    }

    #[test]
    fn single_value_scales_by_k() {
        let o = ModelOrbitSet::new([rat(1, 3)]);
        let s = enumerate_spectrum(&o, &cfg(4, rat(5, 1), -6, 7)).unwrap();
        assert_eq!(s, vec![rat(4, 3) - rat(5, 1), rat(4, 3), rat(4, 3) + rat(5, 1)]);
    }

    #[test]
    fn two_classes_two_periods() {
        let o = ModelOrbitSet::new([rat(0, 1), rat(1, 1)]);
        let s = enumerate_spectrum(&o, &cfg(2, rat(100, 1), -5, 5)).unwrap();
        assert_eq!(s, vec![rat(0, 1), rat(1, 1), rat(2, 1)]);
        assert!(matches!(
            enumerate_spectrum(&ModelOrbitSet::default(), &cfg(1, rat(1, 1), 0, 1)),
            Err(Error::NoOrbits)
        ));
    }

    #[test]
    fn config_validation() {
        assert!(SpectrumConfig::new(1, rat(0, 1), rat(0, 1), rat(1, 1)).is_err());
        assert!(SpectrumConfig::new(1, rat(1, 1), rat(2, 1), rat(1, 1)).is_err());
        let o = ModelOrbitSet::new([rat(0, 1)]);
        assert!(enumerate_spectrum(&o, &cfg(1, rat(1, 1_000_000), 0, 10)).is_err());
    }

    #[test]
    fn fekete_examples() {
        let lin: Vec<Rational> = (1..=10).map(|m| rat(3 * m, 1)).collect();
        let f = fekete_homogenize(&lin).unwrap();
        assert_eq!(f.estimate, rat(3, 1));
        assert_eq!(f.bracket, (rat(3, 1), rat(3, 1)));
        let aff: Vec<Rational> = (1..=50).map(|m| rat(3 * m + 5, 1)).collect();
        let f = fekete_homogenize(&aff).unwrap();
        assert!(&f.estimate - rat(3, 1) <= rat(5, 50));
        assert!(matches!(
            fekete_homogenize(&[rat(1, 1), rat(3, 1)]),
            Err(Error::SubadditivityViolation { m: 1, n: 1 })
        ));
    }

    #[test]
    fn rigidity_examples() {
        let levels = vec![rat(0, 1), rat(7, 10), rat(13, 10)];
        let step = rat(1, 5);
        assert_eq!(rigidity_check(&levels, &vec![rat(7, 10); 3], &step).unwrap(), Rigidity::Constant);
        assert_eq!(rigidity_check(&levels, &[rat(0, 1), rat(7, 10)], &step).unwrap(), Rigidity::Violation { index: 1 });
        assert_eq!(rigidity_check(&levels, &[], &step).unwrap(), Rigidity::Constant);
        assert!(matches!(rigidity_check(&levels, &[rat(1, 2)], &step), Err(Error::SpectralityViolated { index: 0 })));
        assert!(matches!(rigidity_check(&levels, &[], &rat(3, 5)), Err(Error::InsufficientSeparation { .. })));
    }
}
