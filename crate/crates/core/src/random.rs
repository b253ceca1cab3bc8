//! Seeded random fixtures.
//!
//! All randomness flows through [`ChaCha20Rng`] so experiments are
//! reproducible from a single `u64` seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::lattice::{Lattice, LatticeSeq};
use crate::phase_space::{HsOperator, ModSize, Signal};

/// Name recorded in reports next to the seed.
pub const RNG_NAME: &str = "ChaCha20Rng (rand_chacha 0.3, seed_from_u64, per-role streams)";

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Generator seeded with `seed` and positioned on an independent stream.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Standard complex Gaussian sample (independent N(0, 1/2) parts).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_signal<R: Rng + ?Sized>(n: ModSize, rng: &mut R) -> Signal {
    let values = (0..n.get()).map(|_| complex_normal(rng)).collect();
    Signal::new(n, values).expect("length matches modulus")
}

pub fn random_operator<R: Rng + ?Sized>(n: ModSize, rng: &mut R) -> HsOperator {
    let values = (0..n.get() * n.get())
        .map(|_| complex_normal(rng))
        .collect();
    HsOperator::new(n, values).expect("length matches modulus")
}

pub fn random_seq<R: Rng + ?Sized>(lattice: Lattice, rng: &mut R) -> LatticeSeq {
    let values = (0..lattice.len()).map(|_| complex_normal(rng)).collect();
    LatticeSeq::new(lattice, values).expect("length matches lattice")
}
