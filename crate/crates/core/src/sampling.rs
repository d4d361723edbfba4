//! Seeded point sampling.
//!
//! Uniform draws use ChaCha8 seeded with `seed_from_u64` and convert each
//! `next_u64` to a double by taking its top 53 bits, so the sequence is fixed
//! by the seed alone.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{GeomError, Result};
use crate::sigma::Point;

/// Generator identifier recorded alongside sampled data.
pub const PRNG_NAME: &str = "chacha8-seed_from_u64-u53";

/// Uniform stream in [0, 1).
#[derive(Debug, Clone)]
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }
}

/// `count` points uniform in the box [lo, hi)^dim, coordinates drawn in
/// point-major order.
pub fn uniform_points(dim: usize, count: usize, lo: f64, hi: f64, seed: u64) -> Result<Vec<Point<f64>>> {
    if dim == 0 {
        return Err(GeomError::Contract("dimension must be positive".into()));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(GeomError::Contract(format!("bad sampling range [{lo}, {hi})")));
    }
    let mut stream = UniformStream::new(seed);
    Ok((0..count)
        .map(|_| Point::Coords((0..dim).map(|_| stream.next_in(lo, hi)).collect()))
        .collect())
}

/// Symmetric zero-diagonal table with off-diagonal entries uniform in
/// [lo, hi), filled row by row above the diagonal.
pub fn uniform_table(count: usize, lo: f64, hi: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut stream = UniformStream::new(seed);
    let mut rows = vec![vec![0.0; count]; count];
    for i in 0..count {
        for k in (i + 1)..count {
            let v = stream.next_in(lo, hi);
            rows[i][k] = v;
            rows[k][i] = v;
        }
    }
    rows
}
