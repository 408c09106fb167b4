//! Exact sphere points built from solution vectors.

use std::collections::{HashMap, HashSet};

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::solve::{enumerate_solutions, SolutionSet};

/// A point `W / sqrt(norm_sq)` on `S^d`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpherePoint {
    pub numerators: Vec<i64>,
    pub norm_sq: i64,
    pub coords: Vec<f64>,
}

impl SpherePoint {
    pub fn from_numerators(numerators: Vec<i64>) -> Result<Self> {
        let norm_sq: i64 = numerators.iter().map(|w| w * w).sum();
        if norm_sq == 0 {
            return Err(Error::ZeroVector(numerators));
        }
        let norm = (norm_sq as f64).sqrt();
        let coords = numerators.iter().map(|&w| w as f64 / norm).collect();
        Ok(SpherePoint {
            numerators,
            norm_sq,
            coords,
        })
    }

    /// `W / gcd(W)`. Two points coincide on the sphere iff these agree.
    pub fn direction(&self) -> Vec<i64> {
        primitive_direction(&self.numerators)
    }
}

impl PartialEq for SpherePoint {
    fn eq(&self, other: &Self) -> bool {
        self.direction() == other.direction()
    }
}

impl Eq for SpherePoint {}

pub fn primitive_direction(w: &[i64]) -> Vec<i64> {
    let g = w.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        return w.to_vec();
    }
    w.iter().map(|&x| x / g).collect()
}

/// Field parameters a point set was built over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub p: u32,
    pub e: u32,
}

impl FieldInfo {
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }
}

/// The normalized point set `X(d, q)`.
///
/// Points are stored flat: numerators and float coordinates with stride
/// `d + 1`. The set is immutable once built.
#[derive(Clone, Debug)]
pub struct PointSet {
    d: usize,
    field: FieldInfo,
    numerators: Vec<i64>,
    norm_sq: Vec<i64>,
    coords: Vec<f64>,
    sign_symmetric: bool,
}

/// One signed-permutation orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    /// Primitive direction with nonnegative entries sorted descending.
    pub representative: Vec<i64>,
    pub norm_sq: i64,
    pub size: usize,
}

impl PointSet {
    /// Enumerates the solutions over `field` and normalizes them.
    pub fn build<F>(d: usize, field: &F, budget: u128) -> Result<Self>
    where
        F: FiniteField + ?Sized,
    {
        let solutions = enumerate_solutions(d, field, budget)?;
        Self::from_solutions(&solutions)
    }

    pub fn from_solutions(solutions: &SolutionSet) -> Result<Self> {
        let field = FieldInfo {
            p: solutions.p,
            e: solutions.e,
        };
        let vectors = solutions.vectors.iter().map(|v| v.coords.clone()).collect();
        Self::from_numerators(solutions.d, field, vectors)
    }

    /// Builds a point set from integer vectors, checking that no vector is
    /// zero and no two vectors are positive multiples of each other.
    pub fn from_numerators(d: usize, field: FieldInfo, vectors: Vec<Vec<i64>>) -> Result<Self> {
        let dim = d + 1;
        let n = vectors.len();
        let mut numerators = Vec::with_capacity(n * dim);
        let mut norm_sq = Vec::with_capacity(n);
        let mut coords = Vec::with_capacity(n * dim);
        let mut seen: HashMap<Vec<i64>, usize> = HashMap::with_capacity(n);
        for (i, w) in vectors.iter().enumerate() {
            if w.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "vector {w:?} has length {}, expected {dim}",
                    w.len()
                )));
            }
            let point = SpherePoint::from_numerators(w.clone())?;
            if let Some(&j) = seen.get(&point.direction()) {
                return Err(Error::Collision {
                    first: vectors[j].clone(),
                    second: w.clone(),
                });
            }
            seen.insert(point.direction(), i);
            numerators.extend_from_slice(&point.numerators);
            norm_sq.push(point.norm_sq);
            coords.extend_from_slice(&point.coords);
        }
        let sign_symmetric = (0..dim).all(|axis| {
            seen.keys().all(|dir| {
                let mut flipped = dir.clone();
                flipped[axis] = -flipped[axis];
                seen.contains_key(&flipped)
            })
        });
        Ok(PointSet {
            d,
            field,
            numerators,
            norm_sq,
            coords,
            sign_symmetric,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.d + 1
    }

    pub fn field(&self) -> FieldInfo {
        self.field
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn len(&self) -> usize {
        self.norm_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norm_sq.is_empty()
    }

    /// True when the set is closed under flipping the sign of any coordinate.
    pub fn is_sign_symmetric(&self) -> bool {
        self.sign_symmetric
    }

    pub fn numerators(&self, i: usize) -> &[i64] {
        &self.numerators[i * self.dim()..(i + 1) * self.dim()]
    }

    pub fn norm_sq(&self, i: usize) -> i64 {
        self.norm_sq[i]
    }

    pub fn coords(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim()..(i + 1) * self.dim()]
    }

    /// All float coordinates, stride `d + 1`.
    pub fn flat_coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> SpherePoint {
        SpherePoint {
            numerators: self.numerators(i).to_vec(),
            norm_sq: self.norm_sq[i],
            coords: self.coords(i).to_vec(),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = SpherePoint> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Primitive directions of every point, as a set.
    pub fn directions(&self) -> HashSet<Vec<i64>> {
        (0..self.len())
            .map(|i| primitive_direction(self.numerators(i)))
            .collect()
    }

    /// Minimum pairwise Euclidean distance.
    pub fn min_separation(&self) -> f64 {
        let dim = self.dim();
        let n = self.len();
        let c = &self.coords;
        let best_sq = (0..n.saturating_sub(1))
            .into_par_iter()
            .map(|i| {
                let xi = &c[i * dim..(i + 1) * dim];
                let mut best = f64::INFINITY;
                for j in i + 1..n {
                    let xj = &c[j * dim..(j + 1) * dim];
                    let r2: f64 = xi.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)).sum();
                    best = best.min(r2);
                }
                best
            })
            .reduce(|| f64::INFINITY, f64::min);
        best_sq.sqrt()
    }

    /// Partitions the set into signed-permutation orbits.
    pub fn orbit_decompose(&self) -> Vec<Orbit> {
        let mut sizes: HashMap<Vec<i64>, usize> = HashMap::new();
        for i in 0..self.len() {
            *sizes.entry(orbit_key(self.numerators(i))).or_default() += 1;
        }
        let mut orbits: Vec<Orbit> = sizes
            .into_iter()
            .map(|(representative, size)| Orbit {
                norm_sq: representative.iter().map(|w| w * w).sum(),
                representative,
                size,
            })
            .collect();
        orbits.sort_by(|a, b| a.representative.cmp(&b.representative));
        orbits
    }
}

/// Canonical orbit representative: primitive direction, absolute values,
/// sorted descending.
pub fn orbit_key(w: &[i64]) -> Vec<i64> {
    let mut key: Vec<i64> = primitive_direction(w).iter().map(|x| x.abs()).collect();
    key.sort_unstable_by(|a, b| b.cmp(a));
    key
}

/// Every vector obtained from `v` by permuting coordinates and flipping signs.
pub fn signed_permutations(v: &[i64]) -> HashSet<Vec<i64>> {
    let mut perms = Vec::new();
    permute(&mut v.to_vec(), 0, &mut perms);
    let mut out = HashSet::new();
    for perm in perms {
        for mask in 0u32..(1 << v.len()) {
            let signed: Vec<i64> = perm
                .iter()
                .enumerate()
                .map(|(k, &x)| if mask >> k & 1 == 1 { -x } else { x })
                .collect();
            out.insert(signed);
        }
    }
    out
}

fn permute(v: &mut Vec<i64>, k: usize, out: &mut Vec<Vec<i64>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Reapplies all signed permutations to orbit representatives.
pub fn reconstruct_from_orbits(orbits: &[Orbit]) -> HashSet<Vec<i64>> {
    orbits
        .iter()
        .flat_map(|o| signed_permutations(&o.representative))
        .collect()
}
