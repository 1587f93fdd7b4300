//! Seeded uniform stream used wherever the methods need random input.
//!
//! The generator is ChaCha8 seeded through `seed_from_u64`; each draw
//! consumes one `u64` and maps it to `[0, 1)` as `(x >> 11) · 2⁻⁵³`.
//! Matrices are filled row-major. Any implementation reproducing these two
//! rules reproduces every random quantity in this crate.

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// One draw from `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn vector(&mut self, len: usize) -> DVector<f64> {
        DVector::from_fn(len, |_, _| self.next_f64())
    }

    /// `rows×cols` matrix, entries drawn in row-major order.
    pub fn matrix(&mut self, rows: usize, cols: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.next_f64();
            }
        }
        m
    }
}
