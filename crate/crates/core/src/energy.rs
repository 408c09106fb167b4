//! Riesz s-energy of a point set and the normalizations reported for it.
//!
//! Pair sums run over fixed blocks of rows. Each block is accumulated with
//! Neumaier compensation in index order and blocks are merged in index
//! order, so the result does not depend on the thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::energy_integral_constant;
use crate::error::{Error, Result};
use crate::io::SCHEMA;
use crate::pointset::PointSet;

/// Rows per parallel block.
const ROW_BLOCK: usize = 32;

/// Distances below this are treated as coincident points.
pub const COINCIDENCE_THRESHOLD: f64 = 1e-14;

/// A positive exponent `s`, kept with the decimal text it was parsed from.
#[derive(Clone, Debug, PartialEq)]
pub struct Exponent {
    text: String,
    value: f64,
}

impl Exponent {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Domain {
                s: value,
                reason: "s must be a positive finite number",
            });
        }
        Ok(Exponent {
            text: format!("{value}"),
            value,
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let valid = !t.is_empty()
            && t.chars().all(|c| c.is_ascii_digit() || c == '.')
            && t.chars().filter(|&c| c == '.').count() <= 1;
        if !valid {
            return Err(Error::Parse(format!("{s:?} is not a plain decimal")));
        }
        let value: f64 = t.parse().map_err(|_| Error::Parse(format!("{s:?}")))?;
        let mut e = Exponent::new(value)?;
        e.text = t.to_string();
        Ok(e)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Parses a comma-separated list such as `2,3,3.125`.
pub fn parse_exponents(list: &str) -> Result<Vec<Exponent>> {
    list.split(',').map(str::parse).collect()
}

/// Neumaier's compensated sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Debug)]
enum Kernel {
    Inverse,
    InverseSquare,
    InverseCube,
    Power(f64),
}

impl Kernel {
    fn for_exponent(s: f64) -> Kernel {
        if s == 1.0 {
            Kernel::Inverse
        } else if s == 2.0 {
            Kernel::InverseSquare
        } else if s == 3.0 {
            Kernel::InverseCube
        } else {
            Kernel::Power(-0.5 * s)
        }
    }

    /// `|x - y|^{-s}` from the squared distance.
    #[inline(always)]
    fn eval(self, r2: f64) -> f64 {
        match self {
            Kernel::Inverse => 1.0 / r2.sqrt(),
            Kernel::InverseSquare => 1.0 / r2,
            Kernel::InverseCube => 1.0 / (r2 * r2.sqrt()),
            Kernel::Power(h) => r2.powf(h),
        }
    }
}

fn kernels(s_values: &[f64]) -> Result<Vec<Kernel>> {
    s_values
        .iter()
        .map(|&s| {
            if s.is_finite() && s > 0.0 {
                Ok(Kernel::for_exponent(s))
            } else {
                Err(Error::Domain {
                    s,
                    reason: "s must be a positive finite number",
                })
            }
        })
        .collect()
}

#[inline(always)]
fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn degenerate(i: usize, j: usize, r2: f64) -> Error {
    Error::DegenerateConfiguration {
        i,
        j,
        distance: r2.sqrt(),
    }
}

const MIN_R2: f64 = COINCIDENCE_THRESHOLD * COINCIDENCE_THRESHOLD;

fn block_sums(
    coords: &[f64],
    dim: usize,
    rows: std::ops::Range<usize>,
    kernels: &[Kernel],
) -> Result<Vec<NeumaierSum>> {
    let n = coords.len() / dim;
    let mut acc = vec![NeumaierSum::default(); kernels.len()];
    for i in rows {
        let xi = &coords[i * dim..(i + 1) * dim];
        for j in i + 1..n {
            let r2 = dist_sq(xi, &coords[j * dim..(j + 1) * dim]);
            if r2 < MIN_R2 {
                return Err(degenerate(i, j, r2));
            }
            for (a, k) in acc.iter_mut().zip(kernels) {
                a.add(k.eval(r2));
            }
        }
    }
    Ok(acc)
}

pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// `E(s) = sum_{i<j} |x_i - x_j|^{-s}` for each `s`, in one pass over pairs.
///
/// `threads = None` uses the ambient rayon pool. The result is bit-identical
/// for every thread count.
pub fn pair_energies(set: &PointSet, s_values: &[f64], threads: Option<usize>) -> Result<Vec<f64>> {
    let kernels = kernels(s_values)?;
    let dim = set.dim();
    let n = set.len();
    let coords = set.flat_coords();
    let blocks = n.div_ceil(ROW_BLOCK);
    let partials = with_threads(threads, || {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                block_sums(
                    coords,
                    dim,
                    b * ROW_BLOCK..((b + 1) * ROW_BLOCK).min(n),
                    &kernels,
                )
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut total = vec![NeumaierSum::default(); kernels.len()];
    for block in &partials {
        for (t, b) in total.iter_mut().zip(block) {
            t.merge(b);
        }
    }
    Ok(total.iter().map(NeumaierSum::value).collect())
}

pub fn pair_energy(set: &PointSet, s: f64) -> Result<f64> {
    Ok(pair_energies(set, &[s], None)?[0])
}

/// Single-threaded reference: one compensated accumulator over all pairs in
/// `(i, j)` order.
pub fn pair_energy_serial(set: &PointSet, s: f64) -> Result<f64> {
    let kernel = kernels(&[s])?[0];
    let n = set.len();
    let mut acc = NeumaierSum::default();
    for i in 0..n {
        for j in i + 1..n {
            let r2 = dist_sq(set.coords(i), set.coords(j));
            if r2 < MIN_R2 {
                return Err(degenerate(i, j, r2));
            }
            acc.add(kernel.eval(r2));
        }
    }
    Ok(acc.value())
}

/// How `E` is scaled before reporting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Normalization {
    /// `E / N^2`
    PerNSquared,
    /// `E / (N^2 ln N)`
    PerNSquaredLogN,
    /// `E / N^a`
    Power(f64),
}

impl Normalization {
    pub fn apply(self, energy: f64, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            Normalization::PerNSquared => energy / (nf * nf),
            Normalization::PerNSquaredLogN => energy / (nf * nf * nf.ln()),
            Normalization::Power(a) => energy / nf.powf(a),
        }
    }

    pub fn label(self) -> String {
        match self {
            Normalization::PerNSquared => "E/N^2".into(),
            Normalization::PerNSquaredLogN => "E/(N^2 ln N)".into(),
            Normalization::Power(a) => format!("E/N^{a}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    #[serde(rename = "s<d")]
    BelowDimension,
    #[serde(rename = "s=d")]
    AtDimension,
    #[serde(rename = "s>d")]
    AboveDimension,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyRow {
    pub s: String,
    pub s_value: f64,
    pub regime: Regime,
    pub energy: f64,
    /// `E / N^2`
    pub e_n2: f64,
    /// `E / (N^2 ln N)`
    pub e_n2_log: f64,
    /// `E / N^{1+s/d}`
    pub e_pow: f64,
    pub pow_exponent: f64,
    /// `I_{s,d}` for `s < d`.
    pub energy_integral: Option<f64>,
    /// `R / N^2 = I/2 - E/N^2` for `s < d`.
    pub residual_n2: Option<f64>,
    /// `R / N^{1+s/d}` for `s < d`.
    pub residual_pow: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    pub schema: &'static str,
    pub d: usize,
    pub q: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub min_separation: f64,
    pub rows: Vec<EnergyRow>,
}

fn regime(s: f64, d: usize) -> Regime {
    let d = d as f64;
    if s < d {
        Regime::BelowDimension
    } else if s == d {
        Regime::AtDimension
    } else {
        Regime::AboveDimension
    }
}

/// Builds one report row from a computed energy.
pub fn energy_row(s: &Exponent, energy: f64, n: usize, d: usize) -> Result<EnergyRow> {
    let sv = s.value();
    let nf = n as f64;
    let pow_exponent = 1.0 + sv / d as f64;
    let regime = regime(sv, d);
    let (energy_integral, residual_n2, residual_pow) = if regime == Regime::BelowDimension {
        let i = energy_integral_constant(sv, d)?;
        let r = 0.5 * i * nf * nf - energy;
        (
            Some(i),
            Some(r / (nf * nf)),
            Some(r / nf.powf(pow_exponent)),
        )
    } else {
        (None, None, None)
    };
    Ok(EnergyRow {
        s: s.text().to_string(),
        s_value: sv,
        regime,
        energy,
        e_n2: Normalization::PerNSquared.apply(energy, n),
        e_n2_log: Normalization::PerNSquaredLogN.apply(energy, n),
        e_pow: Normalization::Power(pow_exponent).apply(energy, n),
        pow_exponent,
        energy_integral,
        residual_n2,
        residual_pow,
    })
}

/// Energies and every normalization for each requested `s`.
pub fn normalized_report(
    set: &PointSet,
    s_values: &[Exponent],
    threads: Option<usize>,
) -> Result<EnergyReport> {
    if set.len() < 2 {
        return Err(Error::InvalidParameter(
            "energy needs at least two points".into(),
        ));
    }
    let values: Vec<f64> = s_values.iter().map(Exponent::value).collect();
    let energies = pair_energies(set, &values, threads)?;
    let rows = s_values
        .iter()
        .zip(&energies)
        .map(|(s, &e)| energy_row(s, e, set.len(), set.d()))
        .collect::<Result<Vec<_>>>()?;
    let min_separation = with_threads(threads, || set.min_separation())?;
    Ok(EnergyReport {
        schema: SCHEMA,
        d: set.d(),
        q: set.q(),
        n: set.len(),
        min_separation,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpacingReport {
    pub schema: &'static str,
    pub d: usize,
    pub q: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub s: String,
    pub energy: f64,
    /// `C = E / N^{1+s/d}`
    pub c: f64,
    /// `C^{-1/s} N^{-(1/d + 1/s)}`
    pub bound: f64,
    pub min_separation: f64,
    pub ratio: f64,
}

/// Separation lower bound implied by the set's own energy:
/// `E >= delta^{-s}` gives `delta >= C^{-1/s} N^{-(1/d+1/s)}`.
pub fn separation_bound_report(
    set: &PointSet,
    s: &Exponent,
    threads: Option<usize>,
) -> Result<SpacingReport> {
    let sv = s.value();
    let d = set.d() as f64;
    if sv <= d {
        return Err(Error::Domain {
            s: sv,
            reason: "separation bound needs s > d",
        });
    }
    let energy = pair_energies(set, &[sv], threads)?[0];
    let n = set.len();
    let nf = n as f64;
    let c = energy / nf.powf(1.0 + sv / d);
    let bound = separation_bound(c, sv, set.d(), n);
    let min_separation = with_threads(threads, || set.min_separation())?;
    Ok(SpacingReport {
        schema: SCHEMA,
        d: set.d(),
        q: set.q(),
        n,
        s: s.text().to_string(),
        energy,
        c,
        bound,
        min_separation,
        ratio: min_separation / bound,
    })
}

/// `C^{-1/s} N^{-(1/d + 1/s)}`.
pub fn separation_bound(c: f64, s: f64, d: usize, n: usize) -> f64 {
    c.powf(-1.0 / s) * (n as f64).powf(-(1.0 / d as f64 + 1.0 / s))
}
