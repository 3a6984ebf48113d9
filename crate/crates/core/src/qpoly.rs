//! Sparse multivariate Laurent polynomials over ℚ, with just enough
//! elimination theory (resultants, rational roots) to find the rational
//! points of a zero-dimensional system on the torus `(ℚ^*)^k`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::novikov::Rational;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, Rational>,
}

impl QPoly {
    pub fn zero(nvars: usize) -> Self {
        QPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<i64>, Rational)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Vec<i64>, c: Rational) {
        debug_assert_eq!(m.len(), self.nvars);
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Variables with a nonzero exponent in some term.
    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, _)| i)).collect()
    }

    /// Whether the polynomial is a monomial multiple of a constant, i.e. it has no zero on the torus.
    pub fn is_unit_on_torus(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn substitute(&self, var: usize, value: &Rational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m[var];
            let mut m2 = m.clone();
            m2[var] = 0;
            out.add_term(m2, c * rational_pow(value, e));
        }
        out
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(m, c)| m.iter().zip(point).fold(c.clone(), |acc, (&e, x)| acc * rational_pow(x, e)))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Multiply by a monomial so every exponent is nonnegative and each
    /// variable's minimum exponent is zero. Torus zeros are unchanged.
    pub fn normalized(&self) -> Self {
        if self.terms.is_empty() {
            return self.clone();
        }
        let mins: Vec<i64> = (0..self.nvars).map(|i| self.terms.keys().map(|m| m[i]).min().unwrap_or(0)).collect();
        let terms =
            self.terms.iter().map(|(m, c)| (m.iter().zip(&mins).map(|(e, lo)| e - lo).collect(), c.clone())).collect();
        QPoly { nvars: self.nvars, terms }
    }

    pub fn degree_in(&self, var: usize) -> i64 {
        self.terms.keys().map(|m| m[var]).max().unwrap_or(0)
    }

    /// Coefficients of `x_var^d`, d = 0..=deg, for a normalized polynomial.
    fn coefficients_in(&self, var: usize) -> Vec<QPoly> {
        let deg = self.degree_in(var).max(0) as usize;
        let mut out = vec![QPoly::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let d = m2[var] as usize;
            m2[var] = 0;
            out[d].add_term(m2, c.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.iter().zip(b).map(|(x, y)| x + y).collect(), ca * cb);
            }
        }
        out
    }

    fn leading(&self) -> Option<(&Vec<i64>, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Exact division of polynomials with nonnegative exponents.
    fn div_exact(&self, d: &Self) -> Self {
        let (dm, dc) = d.leading().expect("division by zero polynomial");
        let mut r = self.clone();
        let mut q = Self::zero(self.nvars);
        while let Some((rm, rc)) = r.leading() {
            let qm: Vec<i64> = rm.iter().zip(dm).map(|(a, b)| a - b).collect();
            assert!(qm.iter().all(|&e| e >= 0), "inexact polynomial division");
            let qc = rc / dc;
            let step = QPoly::from_terms(self.nvars, [(qm, qc)]);
            r = r.sub(&step.mul(d));
            q = q.add(&step);
        }
        q
    }

    /// Resultant with respect to `var` (Sylvester determinant, computed by
    /// fraction-free elimination). Both inputs are normalized first.
    pub fn resultant(&self, other: &Self, var: usize) -> Self {
        let a = self.normalized().coefficients_in(var);
        let b = other.normalized().coefficients_in(var);
        let (m, n) = (a.len() - 1, b.len() - 1);
        let size = m + n;
        if size == 0 {
            return QPoly::constant(self.nvars, Rational::one());
        }
        let zero = QPoly::zero(self.nvars);
        let mut s = vec![vec![zero.clone(); size]; size];
        for i in 0..n {
            for (j, c) in a.iter().rev().enumerate() {
                s[i][i + j] = c.clone();
            }
        }
        for i in 0..m {
            for (j, c) in b.iter().rev().enumerate() {
                s[n + i][i + j] = c.clone();
            }
        }
        poly_det(s, self.nvars)
    }
}

fn poly_det(mut a: Vec<Vec<QPoly>>, nvars: usize) -> QPoly {
    let n = a.len();
    let mut negate = false;
    let mut prev = QPoly::constant(nvars, Rational::one());
    for k in 0..n {
        let Some(r) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return QPoly::zero(nvars);
        };
        if r != k {
            a.swap(r, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = num.div_exact(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        QPoly::zero(nvars).sub(&d)
    } else {
        d
    }
}

pub fn rational_pow(x: &Rational, e: i64) -> Rational {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

const ROOT_SEARCH_LIMIT: u64 = 1_000_000_000_000;

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n.abs();
    let v = n.to_u64().filter(|&v| v <= ROOT_SEARCH_LIMIT).ok_or_else(|| Error::RootSearchTooLarge(n.to_string()))?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            small.push(BigInt::from(d));
            if d * d != v {
                large.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

/// Nonzero rational roots of `Σ c_d x^d` (coefficients indexed by degree),
/// sorted, plus the degree of the part without the `x^m` factor so callers
/// can tell whether irrational roots exist.
pub fn nonzero_rational_roots(coeffs: &[Rational]) -> Result<(Vec<Rational>, usize)> {
    let start = coeffs.iter().position(|c| !c.is_zero());
    let end = coeffs.iter().rposition(|c| !c.is_zero());
    let (Some(start), Some(end)) = (start, end) else {
        return Ok((Vec::new(), 0));
    };
    let c = &coeffs[start..=end];
    let degree = c.len() - 1;
    if degree == 0 {
        return Ok((Vec::new(), 0));
    }
    let lcm = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let a0 = &ints[0];
    let an = &ints[degree];
    let ps = divisors(a0)?;
    let qs = divisors(an)?;
    let mut roots = BTreeSet::new();
    for q in &qs {
        for p in &ps {
            for sign in [1, -1] {
                let cand = Rational::new(p * BigInt::from(sign), q.clone());
                let val =
                    ints.iter().rev().fold(Rational::zero(), |acc, k| acc * &cand + Rational::from_integer(k.clone()));
                if val.is_zero() {
                    roots.insert(cand);
                }
            }
        }
    }
    Ok((roots.into_iter().collect(), degree))
}

/// Rational points of a polynomial system on `(ℚ^*)^nvars`.
#[derive(Debug, Clone, Default)]
pub struct TorusSolutions {
    pub points: Vec<Vec<Rational>>,
    /// Some univariate factor met during the search had roots outside ℚ.
    pub irrational_branches: bool,
}

pub fn solve_on_torus(eqs: &[QPoly], nvars: usize) -> Result<TorusSolutions> {
    let eqs: Vec<QPoly> = eqs.iter().filter(|e| !e.is_zero()).cloned().collect();
    if eqs.iter().any(|e| e.variables().is_empty() || e.is_unit_on_torus()) {
        return Ok(TorusSolutions::default());
    }
    // Equations sharing no variables are solved separately.
    let mut parent: Vec<usize> = (0..nvars).collect();
    fn root(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for e in &eqs {
        let vars: Vec<usize> = e.variables().into_iter().collect();
        for w in vars.windows(2) {
            let (a, b) = (root(&mut parent, w[0]), root(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let used: BTreeSet<usize> = eqs.iter().flat_map(|e| e.variables()).collect();
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in used.iter().copied() {
        let r = root(&mut parent, v);
        blocks.entry(r).or_default().push(v);
    }

    let mut irrational = false;
    let mut parts = Vec::new();
    for vars in blocks.values() {
        let local: Vec<QPoly> = eqs
            .iter()
            .filter(|e| e.variables().iter().next().is_some_and(|v| vars.contains(v)))
            .map(|e| {
                QPoly::from_terms(
                    vars.len(),
                    e.terms().iter().map(|(m, c)| (vars.iter().map(|&v| m[v]).collect(), c.clone())),
                )
            })
            .collect();
        let mut sol = TorusSolutions::default();
        search(local, vec![None; vars.len()], &mut sol, 0)?;
        irrational |= sol.irrational_branches;
        sol.points.sort();
        sol.points.dedup();
        parts.push((vars, sol.points));
    }
    if parts.iter().any(|(_, pts)| pts.is_empty()) {
        return Ok(TorusSolutions { points: Vec::new(), irrational_branches: irrational });
    }
    if used.len() < nvars {
        return Err(Error::NotZeroDimensional);
    }
    let mut points = vec![vec![Rational::zero(); nvars]];
    for (vars, pts) in &parts {
        points = points
            .iter()
            .flat_map(|base| {
                pts.iter().map(move |p| {
                    let mut q = base.clone();
                    for (&v, x) in vars.iter().zip(p) {
                        q[v] = x.clone();
                    }
                    q
                })
            })
            .collect();
    }
    points.sort();
    Ok(TorusSolutions { points, irrational_branches: irrational })
}

const MAX_ELIMINATIONS: usize = 24;

fn search(
    eqs: Vec<QPoly>,
    assignment: Vec<Option<Rational>>,
    sol: &mut TorusSolutions,
    eliminations: usize,
) -> Result<()> {
    let mut eqs: Vec<QPoly> = eqs.into_iter().filter(|e| !e.is_zero()).map(|e| e.normalized()).collect();
    eqs.sort();
    eqs.dedup();
    if eqs.iter().any(|e| e.variables().is_empty() || e.is_unit_on_torus()) {
        return Ok(());
    }
    let free: Vec<usize> = (0..assignment.len()).filter(|&i| assignment[i].is_none()).collect();
    if free.is_empty() {
        sol.points.push(assignment.into_iter().map(|v| v.expect("assigned")).collect());
        return Ok(());
    }
    let used: BTreeSet<usize> = eqs.iter().flat_map(|e| e.variables()).collect();
    if let Some(&loose) = free.iter().find(|v| !used.contains(v)) {
        // A variable the equations never constrain: if the rest is solvable
        // the solution set is positive-dimensional.
        let mut trial = TorusSolutions::default();
        let mut a = assignment.clone();
        a[loose] = Some(Rational::one());
        search(eqs, a, &mut trial, eliminations)?;
        if trial.points.is_empty() {
            sol.irrational_branches |= trial.irrational_branches;
            return Ok(());
        }
        return Err(Error::NotZeroDimensional);
    }

    let univariate = eqs
        .iter()
        .filter_map(|e| {
            let vars = e.variables();
            (vars.len() == 1).then(|| (*vars.iter().next().unwrap(), e))
        })
        .min_by_key(|(v, e)| e.degree_in(*v));
    if let Some((var, eq)) = univariate {
        let deg = eq.degree_in(var) as usize;
        let mut coeffs = vec![Rational::zero(); deg + 1];
        for (m, c) in eq.terms() {
            coeffs[m[var] as usize] += c;
        }
        let (roots, d) = nonzero_rational_roots(&coeffs)?;
        if roots.len() < d {
            sol.irrational_branches = true;
        }
        for r in roots {
            let next: Vec<QPoly> = eqs.iter().map(|e| e.substitute(var, &r)).collect();
            let mut a = assignment.clone();
            a[var] = Some(r);
            search(next, a, sol, eliminations)?;
        }
        return Ok(());
    }

    if eliminations >= MAX_ELIMINATIONS {
        return Err(Error::NotZeroDimensional);
    }
    // No univariate equation: adjoin the resultant that leaves the fewest variables.
    let mut best: Option<QPoly> = None;
    for &v in &free {
        let with_v: Vec<&QPoly> = eqs.iter().filter(|e| e.variables().contains(&v)).collect();
        for i in 0..with_v.len() {
            for j in i + 1..with_v.len() {
                let r = with_v[i].resultant(with_v[j], v).normalized();
                if r.is_zero() || eqs.contains(&r) {
                    continue;
                }
                let better = best.as_ref().map_or(true, |b| r.variables().len() < b.variables().len());
                if better {
                    best = Some(r);
                }
            }
        }
    }
    match best {
        Some(r) => {
            eqs.push(r);
            search(eqs, assignment, sol, eliminations + 1)
        }
        None => Err(Error::NotZeroDimensional),
    }
}
