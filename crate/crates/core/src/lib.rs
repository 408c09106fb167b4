//! Point sets on the sphere `S^d` built from solutions of
//! `x_1^2 + .. + x_{d+1}^2 = 1` over finite fields.
//!
//! - [`field`]: arithmetic in `F_p` and `F_{p^e}`.
//! - [`solve`]: counting and enumerating solutions.
//! - [`pointset`]: normalization, distinctness, separation, orbits.
//! - [`designs`]: exact spherical-design checks.
//! - [`energy`] and [`constants`]: Riesz s-energy and reference constants.
//! - [`reference`]: published energy tables and comparisons against them.

pub mod constants;
pub mod designs;
pub mod energy;
pub mod error;
pub mod field;
pub mod format;
pub mod io;
pub mod pointset;
pub mod reference;
pub mod solve;

pub use designs::{design_strength, index_check, DesignReport};
pub use energy::{normalized_report, pair_energies, pair_energy, EnergyReport, Exponent};
pub use error::{Error, Result};
pub use field::{ExtensionField, FieldElement, FiniteField, PrimeField};
pub use pointset::{FieldInfo, Orbit, PointSet, SpherePoint};
pub use solve::{count_solutions_formula, enumerate_solutions, SolutionSet, SolutionVector};

/// Builds `X(d, p^e)`. `e = 1` uses the prime-field path.
pub fn build_point_set(d: usize, p: u64, e: u32, field_cap: u64, budget: u128) -> Result<PointSet> {
    if e == 1 {
        PointSet::build(d, &PrimeField::with_cap(p, field_cap)?, budget)
    } else {
        PointSet::build(d, &ExtensionField::build_with_cap(p, e, field_cap)?, budget)
    }
}
