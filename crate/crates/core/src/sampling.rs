//! Seeded random draws shared by the generators, axiom checkers and campaigns.
//!
//! All randomness flows through [`ChaCha8Rng`], which produces the same
//! stream on every platform for a given seed and stream id.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hermat::{CMatrix, HermitianMatrix};

/// Stream ids keep independent draws from one seed from overlapping.
pub const FIELD_STREAM: u64 = 0;
pub const WEIGHT_STREAM: u64 = 1;
pub const AXIOM_STREAM: u64 = 2;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Matrix with real and imaginary parts uniform on `[-1, 1)`.
pub fn random_complex<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> HermitianMatrix {
    let m = random_complex(dim, dim, rng);
    HermitianMatrix::symmetrized(&m + m.adjoint()).scaled(0.5)
}

/// Random PSD matrix `M·M*/dim`.
pub fn random_psd<R: Rng>(dim: usize, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::gram(&random_complex(dim, dim, rng)).scaled(1.0 / dim as f64)
}

/// Random PSD matrix shifted by a uniform draw from `[0.1, 1)` times the identity.
pub fn random_strictly_positive<R: Rng>(dim: usize, rng: &mut R) -> HermitianMatrix {
    let shift = rng.gen_range(0.1..1.0);
    &random_psd(dim, rng) + &HermitianMatrix::identity(dim).scaled(shift)
}

/// Cumulative sums `start + Σ u_k`, each `u_k` uniform on `[lo, hi)`.
pub fn increasing_sequence<R: Rng>(
    n: usize,
    start: f64,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut acc = start;
    for k in 0..n {
        if k > 0 {
            acc += rng.gen_range(lo..hi);
        }
        out.push(acc);
    }
    out
}

pub fn nonnegative_weights<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..1.0)).collect()
}
