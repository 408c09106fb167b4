//! Fixtures shared by the benchmarks.

use ffsphere_core::{solve::DEFAULT_BUDGET, PointSet, PrimeField};

pub fn point_set(d: usize, p: u64) -> PointSet {
    let field = PrimeField::new(p).expect("odd prime");
    PointSet::build(d, &field, DEFAULT_BUDGET).expect("within budget")
}
