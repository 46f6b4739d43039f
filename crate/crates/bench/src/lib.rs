//! Fixtures shared by the benchmarks in `benches/`.

use polycell_core::{field_of_order, FqContext, MonicTupleSpace, Poly};

pub fn field(q: u64) -> FqContext {
    field_of_order(q).expect("benchmark fields are prime powers")
}

/// `count` monic pairs of degrees `(d1, d2)`, spread evenly over the index space.
pub fn spread_pairs(ctx: &FqContext, d1: usize, d2: usize, count: u64) -> Vec<Vec<Poly>> {
    let space = MonicTupleSpace::new(ctx, &[d1, d2]);
    let size = space.size() as u64;
    let step = (size / count.max(1)).max(1);
    (0..size).step_by(step as usize).take(count as usize).map(|i| space.tuple(i)).collect()
}
