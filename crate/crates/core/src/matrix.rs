//! Dense linear algebra over the Novikov field with precision tracking.

use crate::error::{Error, Result};
use crate::novikov::{Exponent, NovikovSeries, Precision};

pub type Matrix = Vec<Vec<NovikovSeries>>;

fn check_square(m: &Matrix) -> Result<usize> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
    }
    Ok(n)
}

fn min_known_valuation(m: &Matrix) -> Option<Exponent> {
    m.iter().flatten().filter_map(|x| x.valuation().cloned()).min()
}

fn max_known_valuation(m: &Matrix) -> Option<Exponent> {
    m.iter().flatten().filter_map(|x| x.valuation().cloned()).max()
}

/// Fraction-free (Bareiss) elimination at a fixed working precision.
fn bareiss(m: &Matrix, wp: &Exponent) -> Result<NovikovSeries> {
    let n = m.len();
    if n == 0 {
        return Ok(NovikovSeries::one());
    }
    let cap = Precision::Finite(wp.clone());
    let mut a: Matrix = m.iter().map(|r| r.iter().map(|x| x.truncate(&cap)).collect()).collect();
    let mut negate = false;
    let mut prev = NovikovSeries::one();
    for k in 0..n {
        let pivot = (k..n).filter_map(|r| a[r][k].valuation().map(|v| (v.clone(), r))).min();
        let Some((_, r)) = pivot else {
            // The whole column is zero to the known precision.
            let p = (k..n).map(|r| a[r][k].precision().clone()).min().unwrap_or(Precision::Infinite);
            if p.is_infinite() {
                return Ok(NovikovSeries::zero());
            }
            let rest = min_known_valuation(&a[k..].to_vec()).unwrap_or_else(Exponent::zero);
            let rest = if rest.is_negative() { rest.times((n - k - 1) as i64) } else { Exponent::zero() };
            let pv = prev.valuation().cloned().unwrap_or_else(Exponent::zero);
            return Ok(NovikovSeries::zero_mod(p.shift(&rest).shift(&-pv)));
        };
        if r != k {
            a.swap(r, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].mul_trunc(&a[k][k], &cap).sub(&a[i][k].mul_trunc(&a[k][j], &cap));
                a[i][j] = num.div(&prev, wp)?;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { det.neg() } else { det })
}

/// Determinant modulo `T^target` by fraction-free elimination.
///
/// The working precision is raised until the result is known to `target`,
/// or until the precision of the entries stops it from improving.
pub fn determinant(m: &Matrix, target: &Exponent) -> Result<NovikovSeries> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(NovikovSeries::one());
    }
    // Intermediate Bareiss numerators are products of two minors.
    let spread = match (min_known_valuation(m), max_known_valuation(m)) {
        (Some(lo), Some(hi)) => (&hi - &lo) + lo.times(-1).max(Exponent::zero()) + hi.max(Exponent::zero()),
        _ => Exponent::zero(),
    };
    let mut slack = spread.times(2 * n as i64) + Exponent::from_int(1);
    let want = Precision::Finite(target.clone());
    let mut best: Option<NovikovSeries> = None;
    for _ in 0..6 {
        let det = bareiss(m, &(target + &slack))?;
        if det.precision() >= &want {
            return Ok(det.truncate(&want));
        }
        if best.as_ref().is_none_or(|b| b.precision() < det.precision()) {
            best = Some(det);
        }
        slack = slack.times(2);
    }
    Ok(best.expect("at least one attempt"))
}

/// Determinant computed far enough to expose its leading term, when the
/// entries allow it. `floor` is the smallest precision tried.
pub fn determinant_leading(m: &Matrix, floor: &Exponent) -> Result<NovikovSeries> {
    let n = check_square(m)?;
    let mut target = floor.clone();
    let step = match (min_known_valuation(m), max_known_valuation(m)) {
        (Some(lo), Some(hi)) => (hi.times(n as i64) - lo.times(n as i64)).max(Exponent::zero()) + Exponent::from_int(1),
        _ => Exponent::from_int(1),
    };
    if let Some(lo) = min_known_valuation(m) {
        target = target.max(lo.times(n as i64) + &step);
    }
    let mut last: Option<NovikovSeries> = None;
    for _ in 0..8 {
        let det = determinant(m, &target)?;
        if !det.is_zero_mod_precision() || det.is_exact() {
            return Ok(det);
        }
        if let Some(prev) = &last {
            if prev.precision() >= det.precision() {
                return Ok(det);
            }
        }
        last = Some(det);
        target = &target + &step;
    }
    Ok(last.expect("at least one attempt"))
}

/// Solves `a x = b` by Gaussian elimination with minimal-valuation pivots,
/// all arithmetic reduced modulo `T^wp`.
pub fn solve(a: &Matrix, b: &[NovikovSeries], wp: &Exponent) -> Result<Vec<NovikovSeries>> {
    let n = check_square(a)?;
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    let cap = Precision::Finite(wp.clone());
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| row.iter().chain(std::iter::once(rhs)).map(|x| x.truncate(&cap)).collect())
        .collect();
    for k in 0..n {
        let pivot = (k..n).filter_map(|r| m[r][k].valuation().map(|v| (v.clone(), r))).min();
        let Some((_, r)) = pivot else {
            return Err(Error::NotInvertible(m[k][k].precision().clone()));
        };
        m.swap(r, k);
        for i in k + 1..n {
            if m[i][k].is_zero_mod_precision() {
                continue;
            }
            let factor = m[i][k].div(&m[k][k], wp)?;
            for j in k..=n {
                let t = factor.mul_trunc(&m[k][j], &cap);
                m[i][j] = m[i][j].sub(&t);
            }
        }
    }
    let mut x = vec![NovikovSeries::zero(); n];
    for i in (0..n).rev() {
        let mut acc = m[i][n].clone();
        for j in i + 1..n {
            acc = acc.sub(&m[i][j].mul_trunc(&x[j], &cap));
        }
        x[i] = acc.div(&m[i][i], wp)?;
    }
    Ok(x)
}

/// Inverse matrix modulo `T^wp`.
pub fn inverse(a: &Matrix, wp: &Exponent) -> Result<Matrix> {
    let n = check_square(a)?;
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<NovikovSeries> =
            (0..n).map(|i| if i == j { NovikovSeries::one() } else { NovikovSeries::zero() }).collect();
        cols.push(solve(a, &e, wp)?);
    }
    Ok((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

pub fn mat_vec(a: &Matrix, x: &[NovikovSeries], cap: &Precision) -> Vec<NovikovSeries> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(NovikovSeries::zero(), |acc, (aij, xj)| acc.add(&aij.mul_trunc(xj, cap)))
                .truncate(cap)
        })
        .collect()
}
