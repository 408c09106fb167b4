//! Exact spherical-design checks.
//!
//! Every sum is taken in big-integer rational arithmetic. A point is
//! `W / sqrt(n)` with `n = |W|^2`, so a degree-`t` monomial evaluates to an
//! integer over `n^{t/2}`. For even `t` that is rational. For odd `t` we write
//! `n = k^2 r` with `r` squarefree and collect the rational coefficient of
//! each `1/sqrt(r)`; square roots of distinct squarefree integers are linearly
//! independent over the rationals, so the sum vanishes iff every coefficient
//! does.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::SCHEMA;
use crate::pointset::PointSet;

/// Default highest index checked by [`design_strength`].
pub const DEFAULT_T_MAX: u32 = 10;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial { exponents }
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| {
                if k == 1 {
                    format!("x{i}")
                } else {
                    format!("x{i}^{k}")
                }
            })
            .collect();
        if factors.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", factors.join("*"))
        }
    }
}

/// All monomials of total degree `t` in `n` variables, ordered with the
/// exponent vectors descending lexicographically (`x0^t` first).
pub fn monomials_of_degree(t: u32, n: usize) -> Vec<Monomial> {
    fn rec(t: u32, n: usize, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == n {
            prefix.push(t);
            out.push(Monomial::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for k in (0..=t).rev() {
            prefix.push(k);
            rec(t - k, n, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(t, n, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// A polynomial with rational coefficients in `x0..x_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    pub vars: usize,
    pub terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Polynomial {
    pub fn zero(vars: usize) -> Self {
        Polynomial {
            vars,
            terms: BTreeMap::new(),
        }
    }

    /// Builds from `(integer coefficient, exponents)` pairs.
    pub fn from_terms(vars: usize, terms: &[(i64, Vec<u32>)]) -> Self {
        let mut p = Polynomial::zero(vars);
        for (c, e) in terms {
            p.add_term(BigRational::from_integer(BigInt::from(*c)), e.clone());
        }
        p
    }

    fn add_term(&mut self, c: BigRational, exps: Vec<u32>) {
        debug_assert_eq!(exps.len(), self.vars);
        let entry = self
            .terms
            .entry(exps.clone())
            .or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degrees.next() {
            None => true,
            Some(first) => degrees.all(|d| d == first),
        }
    }

    /// Formal Laplacian `sum_i d^2/dx_i^2`.
    pub fn laplacian(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.vars);
        for (exps, c) in &self.terms {
            for i in 0..self.vars {
                let k = exps[i];
                if k >= 2 {
                    let mut e = exps.clone();
                    e[i] -= 2;
                    let factor = BigInt::from(k as i64 * (k as i64 - 1));
                    out.add_term(c * BigRational::from_integer(factor), e);
                }
            }
        }
        out
    }

    pub fn is_harmonic(&self) -> bool {
        self.laplacian().is_zero()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in self.terms.iter().rev() {
            let m = Monomial::new(exps.clone());
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
            first = false;
        }
        Ok(())
    }
}

fn unit(vars: usize, pairs: &[(usize, u32)]) -> Vec<u32> {
    let mut e = vec![0; vars];
    for &(i, k) in pairs {
        e[i] += k;
    }
    e
}

/// The listed families `Phi_k(S^d)` for `k = 1..=4`, unfiltered.
/// Variables are `x0..x_d`.
pub fn phi_family(k: u32, d: usize) -> Result<Vec<Polynomial>> {
    let n = d + 1;
    let mono = |pairs: &[(usize, u32)]| unit(n, pairs);
    let mut out = Vec::new();
    match k {
        1 => {
            for i in 0..n {
                out.push(Polynomial::from_terms(n, &[(1, mono(&[(i, 1)]))]));
            }
        }
        2 => {
            for i in 0..n {
                for j in i + 1..n {
                    out.push(Polynomial::from_terms(n, &[(1, mono(&[(i, 1), (j, 1)]))]));
                }
            }
            for i in 0..d {
                out.push(Polynomial::from_terms(
                    n,
                    &[(1, mono(&[(i, 2)])), (-1, mono(&[(i + 1, 2)]))],
                ));
            }
        }
        3 => {
            for i in 0..n {
                for j in i + 1..n {
                    for l in j + 1..n {
                        out.push(Polynomial::from_terms(
                            n,
                            &[(1, mono(&[(i, 1), (j, 1), (l, 1)]))],
                        ));
                    }
                }
            }
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    out.push(Polynomial::from_terms(
                        n,
                        &[(1, mono(&[(i, 3)])), (-3, mono(&[(i, 1), (j, 2)]))],
                    ));
                }
            }
        }
        4 => {
            for i in 0..n {
                for j in i + 1..n {
                    out.push(Polynomial::from_terms(
                        n,
                        &[(1, mono(&[(i, 3), (j, 1)])), (-1, mono(&[(i, 1), (j, 3)]))],
                    ));
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    out.push(Polynomial::from_terms(
                        n,
                        &[
                            (1, mono(&[(i, 4)])),
                            (-6, mono(&[(i, 2), (j, 2)])),
                            (1, mono(&[(j, 4)])),
                        ],
                    ));
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    for l in (0..n).filter(|&l| l != i && l != j) {
                        out.push(Polynomial::from_terms(
                            n,
                            &[
                                (1, mono(&[(i, 3), (j, 1)])),
                                (-3, mono(&[(i, 1), (j, 1), (l, 2)])),
                            ],
                        ));
                    }
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    for l in j + 1..n {
                        for m in l + 1..n {
                            out.push(Polynomial::from_terms(
                                n,
                                &[(1, mono(&[(i, 1), (j, 1), (l, 1), (m, 1)]))],
                            ));
                        }
                    }
                }
            }
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "harmonic basis is only listed for degrees 1..=4, got {k}"
            )))
        }
    }
    Ok(out)
}

/// `Phi_k(S^d)` with every member confirmed harmonic by the formal Laplacian.
/// Members that fail the check are dropped.
pub fn harmonic_basis(k: u32, d: usize) -> Result<Vec<Polynomial>> {
    Ok(phi_family(k, d)?
        .into_iter()
        .filter(Polynomial::is_harmonic)
        .collect())
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim Harm_k(S^d) = C(d+k, k) - C(d+k-2, k-2)`.
pub fn harmonic_dimension(k: u32, d: usize) -> u64 {
    let (k, d) = (k as u64, d as u64);
    let lower = if k >= 2 {
        binomial(d + k - 2, k - 2)
    } else {
        0
    };
    binomial(d + k, k) - lower
}

/// Rank over the rationals of the coefficient vectors of `polys`.
pub fn rank(polys: &[Polynomial]) -> usize {
    let mut columns: Vec<&Vec<u32>> = polys.iter().flat_map(|p| p.terms.keys()).collect();
    columns.sort();
    columns.dedup();
    let mut rows: Vec<Vec<BigRational>> = polys
        .iter()
        .map(|p| {
            columns
                .iter()
                .map(|c| p.terms.get(*c).cloned().unwrap_or_else(BigRational::zero))
                .collect()
        })
        .collect();
    let mut r = 0;
    for col in 0..columns.len() {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let pivot_row = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * y;
            }
        }
        r += 1;
    }
    r
}

fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// Normalized surface average of a monomial over `S^d`:
/// `prod (k_i - 1)!! / prod_{j<m} (d + 1 + 2j)` when every `k_i` is even
/// (`m = sum k_i / 2`), zero otherwise.
pub fn monomial_sphere_average(m: &Monomial, d: usize) -> BigRational {
    if m.exponents.iter().any(|k| k % 2 == 1) {
        return BigRational::zero();
    }
    let num = m.exponents.iter().fold(BigInt::one(), |acc, &k| {
        acc * double_factorial(k as i64 - 1)
    });
    let half = m.degree() / 2;
    let den = (0..half).fold(BigInt::one(), |acc, j| {
        acc * BigInt::from(d as i64 + 1 + 2 * j as i64)
    });
    BigRational::new(num, den)
}

/// `sum_r c_r / sqrt(r)` over squarefree `r`; zero coefficients are dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SurdSum {
    pub terms: BTreeMap<u64, BigRational>,
}

impl SurdSum {
    pub fn rational(c: BigRational) -> Self {
        let mut s = SurdSum::default();
        s.add(1, c);
        s
    }

    fn add(&mut self, r: u64, c: BigRational) {
        let entry = self.terms.entry(r).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&r);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value, if it has no irrational part.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &BigRational) -> SurdSum {
        let mut out = SurdSum::default();
        for (r, v) in &self.terms {
            out.add(*r, v * c);
        }
        out
    }

    pub fn plus(&self, other: &SurdSum) -> SurdSum {
        let mut out = self.clone();
        for (r, v) in &other.terms {
            out.add(*r, v.clone());
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| c.to_f64().unwrap_or(f64::NAN) / (*r as f64).sqrt())
            .sum()
    }
}

impl fmt::Display for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(r, c)| {
                if *r == 1 {
                    format!("{c}")
                } else {
                    format!("({c})/sqrt({r})")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Splits `n` as `k^2 r` with `r` squarefree.
fn squarefree_split(mut n: u64) -> (u64, u64) {
    let mut k = 1;
    let mut r = 1;
    let mut f = 2;
    while f * f <= n {
        let mut e = 0;
        while n % f == 0 {
            n /= f;
            e += 1;
        }
        k *= f.pow(e / 2);
        if e % 2 == 1 {
            r *= f;
        }
        f += 1;
    }
    (k, r * n)
}

struct NormClass {
    norm_sq: BigInt,
    root: BigInt,
    squarefree: u64,
    members: Vec<usize>,
}

/// Exact evaluator of polynomial sums over a point set, grouping points by
/// squared norm.
pub struct ExactSums<'a> {
    set: &'a PointSet,
    classes: Vec<NormClass>,
}

impl<'a> ExactSums<'a> {
    pub fn new(set: &'a PointSet) -> Self {
        let mut by_norm: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for i in 0..set.len() {
            by_norm.entry(set.norm_sq(i)).or_default().push(i);
        }
        let classes = by_norm
            .into_iter()
            .map(|(n, members)| {
                let (k, r) = squarefree_split(n as u64);
                NormClass {
                    norm_sq: BigInt::from(n),
                    root: BigInt::from(k),
                    squarefree: r,
                    members,
                }
            })
            .collect();
        ExactSums { set, classes }
    }

    fn integer_sum(&self, exps: &[u32], members: &[usize]) -> BigInt {
        let mut total = BigInt::zero();
        let mut acc: i128 = 0;
        for &i in members {
            let w = self.set.numerators(i);
            let mut v: Option<i128> = Some(1);
            for (&x, &k) in w.iter().zip(exps) {
                if k > 0 {
                    v = v.and_then(|v| (x as i128).checked_pow(k).and_then(|p| v.checked_mul(p)));
                }
            }
            match v.and_then(|v| acc.checked_add(v)) {
                Some(s) => acc = s,
                None => {
                    total += acc;
                    acc = 0;
                    let big = w.iter().zip(exps).fold(BigInt::one(), |b, (&x, &k)| {
                        b * num_traits::pow(BigInt::from(x), k as usize)
                    });
                    total += big;
                }
            }
        }
        total + acc
    }

    /// Exact `sum_{x in X} m(x)`.
    pub fn monomial_sum(&self, m: &Monomial) -> SurdSum {
        let t = m.degree() as usize;
        let mut out = SurdSum::default();
        for class in &self.classes {
            let s = self.integer_sum(&m.exponents, &class.members);
            if s.is_zero() {
                continue;
            }
            let mut den = num_traits::pow(class.norm_sq.clone(), t / 2);
            let r = if t % 2 == 1 {
                den *= &class.root;
                class.squarefree
            } else {
                1
            };
            out.add(r, BigRational::new(s, den));
        }
        out
    }

    /// Exact `sum_{x in X} f(x)` for a homogeneous `f`.
    pub fn polynomial_sum(&self, f: &Polynomial) -> SurdSum {
        f.terms.iter().fold(SurdSum::default(), |acc, (exps, c)| {
            acc.plus(&self.monomial_sum(&Monomial::new(exps.clone())).scale(c))
        })
    }
}

/// Exact `sum_{x in X} f(x)`.
pub fn harmonic_sum(set: &PointSet, f: &Polynomial) -> SurdSum {
    ExactSums::new(set).polynomial_sum(f)
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub monomial: String,
    pub exponents: Vec<u32>,
    pub point_average: String,
    pub sphere_average: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexCheck {
    pub t: u32,
    pub pass: bool,
    /// True when an odd index was passed by sign symmetry without summing.
    pub by_symmetry: bool,
    pub witness: Option<Witness>,
}

/// Compares point and sphere averages of every degree-`t` monomial.
/// Odd `t` on a sign-symmetric set passes without summation.
pub fn index_check(set: &PointSet, t: u32) -> IndexCheck {
    if t % 2 == 1 && set.is_sign_symmetric() {
        return IndexCheck {
            t,
            pass: true,
            by_symmetry: true,
            witness: None,
        };
    }
    index_check_exhaustive(set, t)
}

/// [`index_check`] without the odd-degree shortcut.
pub fn index_check_exhaustive(set: &PointSet, t: u32) -> IndexCheck {
    let sums = ExactSums::new(set);
    index_check_with(&sums, set, t)
}

fn index_check_with(sums: &ExactSums<'_>, set: &PointSet, t: u32) -> IndexCheck {
    let n = BigRational::from_integer(BigInt::from(set.len()));
    let inv_n = BigRational::one() / n;
    let monomials = monomials_of_degree(t, set.dim());
    let failure = monomials.par_iter().find_first(|m| {
        let avg = sums.monomial_sum(m).scale(&inv_n);
        avg != SurdSum::rational(monomial_sphere_average(m, set.d()))
    });
    let witness = failure.map(|m| Witness {
        monomial: m.to_string(),
        exponents: m.exponents.clone(),
        point_average: sums.monomial_sum(m).scale(&inv_n).to_string(),
        sphere_average: monomial_sphere_average(m, set.d()).to_string(),
    });
    IndexCheck {
        t,
        pass: witness.is_none(),
        by_symmetry: false,
        witness,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DesignReport {
    pub schema: &'static str,
    pub d: usize,
    pub q: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub t_max: u32,
    pub strength: u32,
    pub checks: Vec<IndexCheck>,
}

/// Largest `t <= t_max` with every index `1..=t` passing. Stops at the first
/// failing index, which carries the witness.
pub fn design_strength(set: &PointSet, t_max: u32) -> DesignReport {
    let sums = ExactSums::new(set);
    let mut checks = Vec::new();
    let mut strength = 0;
    for t in 1..=t_max {
        let check = if t % 2 == 1 && set.is_sign_symmetric() {
            IndexCheck {
                t,
                pass: true,
                by_symmetry: true,
                witness: None,
            }
        } else {
            index_check_with(&sums, set, t)
        };
        let pass = check.pass;
        checks.push(check);
        if !pass {
            break;
        }
        strength = t;
    }
    DesignReport {
        schema: SCHEMA,
        d: set.d(),
        q: set.q(),
        n: set.len(),
        t_max,
        strength,
        checks,
    }
}

/// Design strength through degree `t_max <= 4` by the harmonic criterion:
/// every member of `Phi_1..Phi_t` must sum to exactly zero over the set.
pub fn harmonic_strength(set: &PointSet, t_max: u32) -> Result<u32> {
    let sums = ExactSums::new(set);
    let mut strength = 0;
    for k in 1..=t_max {
        let basis = harmonic_basis(k, set.d())?;
        if !basis.par_iter().all(|f| sums.polynomial_sum(f).is_zero()) {
            break;
        }
        strength = k;
    }
    Ok(strength)
}
