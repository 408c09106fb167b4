//! Solutions of `x_1^2 + .. + x_{d+1}^2 = 1` over a finite field.

use num_bigint::BigInt;
use num_traits::pow;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{quadratic_character, FieldElement, FiniteField};

/// Default cap on the number of leading-coordinate assignments (`q^d`).
pub const DEFAULT_BUDGET: u128 = 50_000_000;

/// A solution with every coordinate replaced by its centered integer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SolutionVector {
    pub coords: Vec<i64>,
}

/// All solutions for one `(d, q)`, in ascending lexicographic order.
#[derive(Clone, Debug)]
pub struct SolutionSet {
    pub d: usize,
    pub p: u32,
    pub e: u32,
    pub vectors: Vec<SolutionVector>,
}

impl SolutionSet {
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Closed-form count of solutions over `F_p`:
/// `p^d - p^{(d-1)/2} eta((-1)^{(d+1)/2})` for odd `d`,
/// `p^d + p^{d/2} eta((-1)^{d/2})` for even `d`.
pub fn count_solutions_formula(d: usize, p: u64) -> BigInt {
    let pb = BigInt::from(p);
    let lead = pow(pb.clone(), d);
    if d % 2 == 1 {
        let sign = if (d + 1) / 2 % 2 == 0 { 1 } else { -1 };
        let eta = quadratic_character(sign, p);
        lead - pow(pb, (d - 1) / 2) * eta
    } else {
        let sign = if (d / 2) % 2 == 0 { 1 } else { -1 };
        let eta = quadratic_character(sign, p);
        lead + pow(pb, d / 2) * eta
    }
}

/// Number of leading-coordinate assignments an enumeration visits.
pub fn enumeration_cost(d: usize, q: u64) -> u128 {
    (q as u128).checked_pow(d as u32).unwrap_or(u128::MAX)
}

/// Enumerates every solution by looping over the first `d` coordinates and
/// completing the last one from the square-root table.
pub fn enumerate_solutions<F>(d: usize, field: &F, budget: u128) -> Result<SolutionSet>
where
    F: FiniteField + ?Sized,
{
    if d == 0 {
        return Err(Error::InvalidParameter("dimension d must be >= 1".into()));
    }
    let q = field.order();
    let required = enumeration_cost(d, q as u64);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }

    let squares: Vec<FieldElement> = field.elements().map(|a| field.square(a)).collect();
    let centered: Vec<i64> = field.elements().map(|a| field.to_centered_int(a)).collect();

    let mut vectors: Vec<SolutionVector> = (0..q)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut out = Vec::new();
            let mut prefix = vec![FieldElement::from_index(first)];
            let sum = squares[first as usize];
            extend(field, d, &squares, &centered, &mut prefix, sum, &mut out);
            out
        })
        .collect();
    vectors.par_sort_unstable();

    Ok(SolutionSet {
        d,
        p: field.characteristic(),
        e: field.degree(),
        vectors,
    })
}

fn extend<F: FiniteField + ?Sized>(
    field: &F,
    d: usize,
    squares: &[FieldElement],
    centered: &[i64],
    prefix: &mut Vec<FieldElement>,
    sum: FieldElement,
    out: &mut Vec<SolutionVector>,
) {
    if prefix.len() == d {
        let residual = field.sub(FieldElement::ONE, sum);
        for &y in field.sqrt_set(residual) {
            let coords = prefix
                .iter()
                .chain(std::iter::once(&y))
                .map(|a| centered[a.index() as usize])
                .collect();
            out.push(SolutionVector { coords });
        }
        return;
    }
    for x in field.elements() {
        prefix.push(x);
        let next = field.add(sum, squares[x.index() as usize]);
        extend(field, d, squares, centered, prefix, next, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{is_odd_prime, ExtensionField, PrimeField};

    fn brute_force(d: usize, p: i64) -> Vec<Vec<i64>> {
        let half = (p - 1) / 2;
        let mut out = Vec::new();
        let mut cur = vec![-half; d + 1];
        loop {
            if cur.iter().map(|w| w * w).sum::<i64>().rem_euclid(p) == 1 {
                out.push(cur.clone());
            }
            let mut i = d + 1;
            loop {
                if i == 0 {
                    out.sort();
                    return out;
                }
                i -= 1;
                if cur[i] < half {
                    cur[i] += 1;
                    break;
                }
                cur[i] = -half;
            }
        }
    }

    fn coords(set: &SolutionSet) -> Vec<Vec<i64>> {
        set.vectors.iter().map(|v| v.coords.clone()).collect()
    }

    #[test]
    fn formula_values() {
        assert_eq!(count_solutions_formula(2, 5), BigInt::from(30));
        assert_eq!(count_solutions_formula(1, 7), BigInt::from(8));
        assert_eq!(count_solutions_formula(2, 3), BigInt::from(6));
        assert_eq!(count_solutions_formula(3, 3), BigInt::from(24));
        assert_eq!(count_solutions_formula(2, 7), BigInt::from(42));
        assert_eq!(count_solutions_formula(1, 5), BigInt::from(4));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for (d, p) in [
            (1usize, 3u64),
            (1, 7),
            (2, 3),
            (2, 5),
            (3, 3),
            (2, 7),
            (4, 3),
        ] {
            let f = PrimeField::new(p).unwrap();
            let set = enumerate_solutions(d, &f, DEFAULT_BUDGET).unwrap();
            assert_eq!(coords(&set), brute_force(d, p as i64), "d={d} p={p}");
        }
    }

    #[test]
    fn small_solution_sets() {
        let f3 = PrimeField::new(3).unwrap();
        let x13 = enumerate_solutions(1, &f3, DEFAULT_BUDGET).unwrap();
        assert_eq!(
            coords(&x13),
            vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]
        );
        let x33 = enumerate_solutions(3, &f3, DEFAULT_BUDGET).unwrap();
        assert_eq!(x33.len(), 24);
        let ones = x33
            .vectors
            .iter()
            .filter(|v| v.coords.iter().filter(|&&c| c != 0).count() == 1)
            .count();
        let full = x33
            .vectors
            .iter()
            .filter(|v| v.coords.iter().all(|&c| c.abs() == 1))
            .count();
        assert_eq!((ones, full), (8, 16));

        let f5 = PrimeField::new(5).unwrap();
        let x25 = enumerate_solutions(2, &f5, DEFAULT_BUDGET).unwrap();
        assert_eq!(x25.len(), 30);
        for v in &x25.vectors {
            let mut a: Vec<i64> = v.coords.iter().map(|c| c.abs()).collect();
            a.sort_unstable_by(|x, y| y.cmp(x));
            assert!(a == vec![1, 0, 0] || a == vec![2, 1, 1], "{a:?}");
        }
    }

    #[test]
    fn counts_match_formula() {
        for p in (3..=31u64).filter(|&p| is_odd_prime(p)) {
            let f = PrimeField::new(p).unwrap();
            for d in 1..=3 {
                let set = enumerate_solutions(d, &f, DEFAULT_BUDGET).unwrap();
                assert_eq!(BigInt::from(set.len()), count_solutions_formula(d, p));
            }
        }
    }

    #[test]
    fn solutions_satisfy_the_form() {
        let f = ExtensionField::build(3, 2).unwrap();
        let set = enumerate_solutions(2, &f, DEFAULT_BUDGET).unwrap();
        assert_eq!(set.len(), 90);
        let half = (f.order() as i64 - 1) / 2;
        let by_int: std::collections::HashMap<i64, FieldElement> =
            f.elements().map(|a| (f.to_centered_int(a), a)).collect();
        for v in &set.vectors {
            assert!(v.coords.iter().all(|c| c.abs() <= half));
            let s = v
                .coords
                .iter()
                .fold(FieldElement::ZERO, |acc, c| f.add(acc, f.square(by_int[c])));
            assert_eq!(s, FieldElement::ONE);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f = PrimeField::new(31).unwrap();
        match enumerate_solutions(3, &f, 1000) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, 29791);
                assert_eq!(budget, 1000);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn output_is_deterministic_across_pools() {
        let f = PrimeField::new(13).unwrap();
        let runs: Vec<Vec<Vec<i64>>> = [1, 3]
            .iter()
            .map(|&n| {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .unwrap();
                pool.install(|| coords(&enumerate_solutions(3, &f, DEFAULT_BUDGET).unwrap()))
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
    }
}
