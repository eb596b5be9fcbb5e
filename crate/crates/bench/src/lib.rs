//! Fixed-seed fixtures shared by the benches.

use birqi::{random, BipartiteModel, DensityMatrix};
use rand::rngs::StdRng;
use rand::SeedableRng;

/// `(dim_A, dim_B, channels)` triples exercised by every bench.
pub const SHAPES: [(usize, usize, usize); 3] = [(2, 2, 1), (3, 3, 2), (4, 4, 3)];

pub fn label((a, b, n): (usize, usize, usize)) -> String {
    format!("{a}x{b}x{}", n + 1)
}

pub fn model((a, b, n): (usize, usize, usize)) -> BipartiteModel {
    let mut rng = StdRng::seed_from_u64(0x5eed ^ (a * 100 + b * 10 + n) as u64);
    random::model(a, b, n, &mut rng)
}

pub fn state(dim: usize) -> DensityMatrix {
    let mut rng = StdRng::seed_from_u64(dim as u64);
    random::density(dim, &mut rng)
}
