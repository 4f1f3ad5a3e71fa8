//! Per-path random streams.
//!
//! Each path draws from ChaCha8 keyed by the master seed, with the path index selecting one of its
//! 2⁶⁴ independent streams. The sequence is a pure function of (seed, path index), so results do
//! not depend on which thread runs a path or in what order.

use rand::distr::{Distribution, Open01, StandardUniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    path_index: u64,
    draw_counter: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, path_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(path_index);
        RngStream {
            master_seed,
            path_index,
            draw_counter: 0,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path_index(&self) -> u64 {
        self.path_index
    }

    /// Number of variates drawn so far.
    pub fn draw_counter(&self) -> u64 {
        self.draw_counter
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.draw_counter += 1;
        StandardUniform.sample(&mut self.inner)
    }

    /// Uniform on the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        self.draw_counter += 1;
        Open01.sample(&mut self.inner)
    }
}
