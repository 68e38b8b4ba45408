//! Seeded random generation of series, matrix tuples and realizations.
//!
//! All randomness in the crate flows through explicitly seeded ChaCha
//! streams so that probes and tests are reproducible run to run.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matrix::MatrixTuple;
use crate::realization::{DescriptorRealization, FmRealization};
use crate::series::TruncatedSeries;
use crate::word::Word;

/// A reproducible RNG stream for the given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for task `index` under a base seed.
/// Used to keep parallel sampling deterministic regardless of scheduling.
pub fn task_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index.wrapping_add(1));
    r
}

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.random::<f64>()
}

/// Standard complex Gaussian: independent N(0, 1/2) real and imaginary parts.
pub fn gaussian_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) / 2f64.sqrt()
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, len: usize) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_fn(len, |_, _| gaussian_complex(rng))
}

/// A level-`n` point of the NC universe with unit-scale Gaussian entries.
pub fn gaussian_tuple(rng: &mut ChaCha8Rng, d: usize, n: usize) -> MatrixTuple {
    MatrixTuple::new((0..d).map(|_| gaussian_matrix(rng, n, n)).collect()).unwrap()
}

/// A random series with Gaussian coefficients on every word up to the bound.
pub fn random_series(rng: &mut ChaCha8Rng, d: usize, degree_bound: usize) -> TruncatedSeries {
    TruncatedSeries::from_coeffs(
        d,
        degree_bound,
        Word::all_up_to_length(d, degree_bound)
            .into_iter()
            .map(|w| (w, gaussian_complex(rng))),
    )
    .expect("letters in range by construction")
}

/// A random descriptor realization with Gaussian data.
pub fn random_descriptor(rng: &mut ChaCha8Rng, d: usize, dim: usize) -> DescriptorRealization {
    DescriptorRealization::new(
        (0..d).map(|_| gaussian_matrix(rng, dim, dim)).collect(),
        gaussian_vector(rng, dim),
        gaussian_vector(rng, dim),
    )
    .expect("consistent shapes by construction")
}

/// A random FM realization with Gaussian data.
pub fn random_fm(rng: &mut ChaCha8Rng, d: usize, dim: usize) -> FmRealization {
    FmRealization::new(
        (0..d).map(|_| gaussian_matrix(rng, dim, dim)).collect(),
        (0..d).map(|_| gaussian_vector(rng, dim)).collect(),
        gaussian_matrix(rng, 1, dim),
        gaussian_complex(rng),
    )
    .expect("consistent shapes by construction")
}
