//! Turns builder specs into operators.

use num_complex::Complex64;

use super::config::{BuilderSpec, ExperimentConfig};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::phase_space::{rank_one, HsOperator, ModSize, Signal};
use crate::random::{random_operator, random_signal, rng_stream};
use crate::sampling::{notch_generator, whiten_generator};

/// RNG stream of generator `i`.
pub fn generator_stream(i: usize) -> u64 {
    1 + i as u64
}

/// RNG stream of averager `i`.
pub fn averager_stream(i: usize) -> u64 {
    1000 + i as u64
}

pub const COEFFICIENT_STREAM: u64 = 10_000;
pub const C_MATRIX_STREAM: u64 = 10_001;

fn unit(s: Signal) -> Result<Signal> {
    let norm = s.norm();
    if norm == 0.0 {
        return Err(Error::Invalid("builder produced a zero signal".into()));
    }
    Ok(s.scaled(Complex64::new(1.0 / norm, 0.0)))
}

/// Periodized Gaussian `sum_{|k| <= wraps} exp(-pi (t - center + k L)^2 / width^2)`.
pub fn periodized_gaussian(n: ModSize, width: f64, center: f64, wraps: usize) -> Signal {
    let l = n.get() as f64;
    let w = wraps as i64;
    Signal::from_fn(n, |t| {
        let v: f64 = (-w..=w)
            .map(|k| {
                let d = t as f64 - center + k as f64 * l;
                (-std::f64::consts::PI * d * d / (width * width)).exp()
            })
            .sum();
        Complex64::new(v, 0.0)
    })
}

pub fn boxcar(n: ModSize, width: usize, shift: usize) -> Signal {
    Signal::from_fn(n, |t| {
        if n.sub(t, shift) < width {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Builds one operator; `seed` is the configuration seed and `stream` the
/// role's RNG stream.
pub fn build(
    spec: &BuilderSpec,
    lattice: Lattice,
    seed: Option<u64>,
    stream: u64,
) -> Result<HsOperator> {
    let n = lattice.modulus();
    // A builder's own seed pins the operator; the shared seed is split by role.
    let seeded = |own: &Option<u64>| match (own, seed) {
        (Some(s), _) => Ok(rng_stream(*s, 0)),
        (None, Some(s)) => Ok(rng_stream(s, stream)),
        (None, None) => Err(Error::Invalid("random builder without a seed".into())),
    };
    match spec {
        BuilderSpec::DeltaPair { t1, t2 } => {
            rank_one(&Signal::delta(n, *t1), &Signal::delta(n, *t2))
        }
        BuilderSpec::Boxcar { width, shift } => {
            let g = unit(boxcar(n, *width, *shift))?;
            rank_one(&g, &g)
        }
        BuilderSpec::PeriodizedGaussian {
            width,
            center,
            wraps,
        } => {
            let g = unit(periodized_gaussian(n, *width, *center, *wraps))?;
            rank_one(&g, &g)
        }
        BuilderSpec::RandomSignalPair { seed: own } => {
            let mut r = seeded(own)?;
            let psi = unit(random_signal(n, &mut r))?;
            let phi = unit(random_signal(n, &mut r))?;
            rank_one(&psi, &phi)
        }
        BuilderSpec::RandomHs { seed: own } => Ok(random_operator(n, &mut seeded(own)?)),
        BuilderSpec::Whitened { inner } => {
            whiten_generator(&build(inner, lattice, seed, stream)?, lattice)
        }
        BuilderSpec::Notched { inner, xi } => {
            notch_generator(&build(inner, lattice, seed, stream)?, lattice, *xi)
        }
        BuilderSpec::Generator { .. } => Err(Error::Invalid(
            "generator references are resolved by build_averagers".into(),
        )),
    }
}

pub fn lattice_of(cfg: &ExperimentConfig) -> Result<Lattice> {
    Lattice::new(ModSize::new(cfg.l)?, cfg.lattice.a, cfg.lattice.b)
}

pub fn build_generators(cfg: &ExperimentConfig, lattice: Lattice) -> Result<Vec<HsOperator>> {
    cfg.generators
        .iter()
        .enumerate()
        .map(|(i, g)| build(g, lattice, cfg.seed, generator_stream(i)))
        .collect()
}

pub fn build_averagers(
    cfg: &ExperimentConfig,
    lattice: Lattice,
    generators: &[HsOperator],
) -> Result<Vec<HsOperator>> {
    cfg.averagers
        .iter()
        .enumerate()
        .map(|(i, q)| match q {
            BuilderSpec::Generator { index } => generators.get(*index).cloned().ok_or_else(|| {
                Error::Invalid(format!(
                    "averagers[{i}] refers to missing generator {index}"
                ))
            }),
            other => build(other, lattice, cfg.seed, averager_stream(i)),
        })
        .collect()
}
