//! Seeded generators for the randomized suites. Identical seeds give
//! identical samples on every platform.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coefficients::PhaseScalar;
use crate::statistics::{CommutationFactor, FactorPreset, GradeVector, RootSpec};
use crate::weyl::{Generator, Word, WordExpr};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest root order used by [`random_factor`].
pub const MAX_RANDOM_ORDER: u32 = 8;

pub fn random_generator(rng: &mut SampleRng, n: usize) -> Generator {
    let i = rng.random_range(0..n);
    if rng.random_bool(0.5) {
        Generator::Create(i)
    } else {
        Generator::Annihilate(i)
    }
}

/// A word of length `0..=max_len` over `N = n` modes.
pub fn random_word(rng: &mut SampleRng, n: usize, max_len: usize) -> Word {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| random_generator(rng, n)).collect()
}

/// A small nonzero coefficient `p/q · w4^k`.
pub fn random_coefficient(rng: &mut SampleRng) -> PhaseScalar {
    let mut p = rng.random_range(-3i64..=3);
    if p == 0 {
        p = 1;
    }
    let q = rng.random_range(1i64..=3);
    let r = BigRational::new(BigInt::from(p), BigInt::from(q));
    PhaseScalar::term(r, 4, rng.random_range(0..4)).expect("order 4 within limit")
}

/// A homogeneous expression of degree `1..=max_degree`: a random word and a
/// few rearrangements of it, which share its grade, with random coefficients.
pub fn random_homogeneous(rng: &mut SampleRng, n: usize, max_degree: usize) -> WordExpr {
    let len = rng.random_range(1..=max_degree.max(1));
    let base: Word = (0..len).map(|_| random_generator(rng, n)).collect();
    let mut out = WordExpr::word(base.clone(), random_coefficient(rng));
    for _ in 0..rng.random_range(0..3) {
        let mut w = base.clone();
        w.shuffle(rng);
        let term = WordExpr::word(w, random_coefficient(rng));
        out = out.add(&term).expect("order limit");
    }
    if out.is_zero() {
        WordExpr::word(base, PhaseScalar::one())
    } else {
        out
    }
}

/// A valid factor: random parities and `c_ij = c′_ij ω^{Ω_ij}` with a single
/// primitive root `ω` of order at most [`MAX_RANDOM_ORDER`].
pub fn random_factor_preset(rng: &mut SampleRng, n: usize) -> FactorPreset {
    let order = rng.random_range(1..=MAX_RANDOM_ORDER);
    let s: Vec<i64> = (0..n).map(|_| rng.random_range(0..=1)).collect();
    let omega_matrix: Vec<Vec<i64>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { 0 } else { rng.random_range(0..order as i64) }).collect()).collect();
    FactorPreset::omega_general(s, omega_matrix, RootSpec { order, exp: 1 })
}

pub fn random_factor(rng: &mut SampleRng, n: usize) -> CommutationFactor {
    crate::statistics::make_factor(&random_factor_preset(rng, n)).expect("sampled presets are valid")
}

/// A grade in `Z^n` with coordinates in `-range..=range`.
pub fn random_grade(rng: &mut SampleRng, n: usize, range: i64) -> GradeVector {
    GradeVector::new((0..n).map(|_| rng.random_range(-range..=range)).collect(), None)
}
