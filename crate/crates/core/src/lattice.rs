//! Separable lattices `aZ_L x bZ_L`, their adjoint lattices and harmonic
//! analysis on `l2(Lambda)`.
//!
//! Lattice points `(a j, b k)` are enumerated row-major in `(j, k)` with
//! `j < L/a`, `k < L/b`. The dual group `G / Lambda°` is represented by the
//! rectangle `{(x, w) : x < L/b, w < L/a}`, enumerated row-major in `(x, w)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{symplectic_form, ModSize, PhasePoint};
use crate::weyl::PhaseFunction;

/// `Lambda = aZ_L x bZ_L` with `a | L` and `b | L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    n: ModSize,
    a: usize,
    b: usize,
}

impl Lattice {
    pub fn new(n: ModSize, a: usize, b: usize) -> Result<Self> {
        for step in [a, b] {
            if step == 0 || !n.get().is_multiple_of(step) {
                return Err(Error::InvalidLattice {
                    modulus: n.get(),
                    step,
                });
            }
        }
        Ok(Lattice { n, a, b })
    }

    #[inline]
    pub fn modulus(&self) -> ModSize {
        self.n
    }

    #[inline]
    pub fn steps(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    /// Number of distinct first coordinates, `L / a`.
    #[inline]
    fn x_count(&self) -> usize {
        self.n.get() / self.a
    }

    /// Number of distinct second coordinates, `L / b`.
    #[inline]
    fn omega_count(&self) -> usize {
        self.n.get() / self.b
    }

    /// `|Lambda| = (L/a)(L/b)`.
    #[inline]
    pub fn len(&self) -> usize {
        self.x_count() * self.omega_count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, index: usize) -> PhasePoint {
        let (j, k) = (index / self.omega_count(), index % self.omega_count());
        PhasePoint {
            x: self.a * j,
            omega: self.b * k,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = PhasePoint> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn index_of(&self, z: PhasePoint) -> Option<usize> {
        let (x, w) = (z.x % self.n.get(), z.omega % self.n.get());
        if x % self.a != 0 || w % self.b != 0 {
            return None;
        }
        Some((x / self.a) * self.omega_count() + w / self.b)
    }

    pub fn contains(&self, z: PhasePoint) -> bool {
        self.index_of(z).is_some()
    }

    /// Index of `lambda_i - lambda_j`.
    #[inline]
    fn index_diff(&self, i: usize, j: usize) -> usize {
        let (nx, nw) = (self.x_count(), self.omega_count());
        let (xi, wi) = (i / nw, i % nw);
        let (xj, wj) = (j / nw, j % nw);
        ((xi + nx - xj) % nx) * nw + (wi + nw - wj) % nw
    }

    #[inline]
    fn index_neg(&self, i: usize) -> usize {
        self.index_diff(0, i)
    }

    /// Adjoint lattice `Lambda° = (L/b)Z_L x (L/a)Z_L`.
    pub fn adjoint(&self) -> Lattice {
        Lattice {
            n: self.n,
            a: self.omega_count(),
            b: self.x_count(),
        }
    }

    pub fn dual_grid(&self) -> DualGrid {
        DualGrid { lattice: *self }
    }
}

/// Coset representatives of `G / Lambda°`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualGrid {
    lattice: Lattice,
}

impl DualGrid {
    /// Number of cosets; equals `|Lambda|`.
    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn x_count(&self) -> usize {
        self.lattice.omega_count()
    }

    fn omega_count(&self) -> usize {
        self.lattice.x_count()
    }

    pub fn representative(&self, index: usize) -> PhasePoint {
        PhasePoint {
            x: index / self.omega_count(),
            omega: index % self.omega_count(),
        }
    }

    pub fn representatives(&self) -> impl Iterator<Item = PhasePoint> + '_ {
        (0..self.len()).map(move |i| self.representative(i))
    }

    /// Index of the coset containing `z`.
    pub fn coset_index(&self, z: PhasePoint) -> usize {
        (z.x % self.x_count()) * self.omega_count() + z.omega % self.omega_count()
    }
}

fn check_lattice(a: &Lattice, b: &Lattice) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::LatticeMismatch)
    }
}

/// A sequence in `l2(Lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSeq {
    lattice: Lattice,
    values: Vec<Complex64>,
}

impl LatticeSeq {
    pub fn new(lattice: Lattice, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::SizeMismatch {
                expected: lattice.len(),
                found: values.len(),
            });
        }
        Ok(LatticeSeq { lattice, values })
    }

    pub fn zeros(lattice: Lattice) -> Self {
        LatticeSeq {
            lattice,
            values: vec![Complex64::new(0.0, 0.0); lattice.len()],
        }
    }

    /// Kronecker delta at the lattice point with the given index.
    pub fn delta(lattice: Lattice, index: usize) -> Self {
        let mut s = LatticeSeq::zeros(lattice);
        s.values[index] = Complex64::new(1.0, 0.0);
        s
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, index: usize) -> Complex64 {
        self.values[index]
    }

    pub fn inner(&self, other: &LatticeSeq) -> Result<Complex64> {
        check_lattice(&self.lattice, &other.lattice)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// L2 distance; panics on lattice mismatch.
    pub fn distance(&self, other: &LatticeSeq) -> f64 {
        assert_eq!(self.lattice, other.lattice, "lattices differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn add(&self, other: &LatticeSeq) -> Result<LatticeSeq> {
        check_lattice(&self.lattice, &other.lattice)?;
        Ok(LatticeSeq {
            lattice: self.lattice,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scaled(&self, c: Complex64) -> LatticeSeq {
        LatticeSeq {
            lattice: self.lattice,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// Function on the dual grid `G / Lambda°`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFunction {
    lattice: Lattice,
    values: Vec<Complex64>,
}

impl DualFunction {
    pub fn new(lattice: Lattice, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::SizeMismatch {
                expected: lattice.len(),
                found: values.len(),
            });
        }
        Ok(DualFunction { lattice, values })
    }

    pub fn constant(lattice: Lattice, c: Complex64) -> Self {
        DualFunction {
            lattice,
            values: vec![c; lattice.len()],
        }
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, xi: usize) -> Complex64 {
        self.values[xi]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> DualFunction {
        DualFunction {
            lattice: self.lattice,
            values: self.values.iter().copied().map(f).collect(),
        }
    }
}

/// `sum_lambda c(lambda) e^{2 pi i sigma(lambda, z) / L}` evaluated at an arbitrary `z`.
pub fn symplectic_series_at(c: &LatticeSeq, z: PhasePoint) -> Complex64 {
    let lattice = c.lattice;
    let n = lattice.modulus();
    c.values
        .iter()
        .enumerate()
        .map(|(i, v)| v * n.character(symplectic_form(lattice.point(i), z, n)))
        .sum()
}

/// Symplectic Fourier series `F_sigma^Lambda(c)` on the dual grid.
pub fn symplectic_series(c: &LatticeSeq) -> DualFunction {
    let lattice = c.lattice;
    let grid = lattice.dual_grid();
    DualFunction {
        lattice,
        values: grid
            .representatives()
            .map(|z| symplectic_series_at(c, z))
            .collect(),
    }
}

/// Inverse of [`symplectic_series`]:
/// `c(lambda) = |Lambda|^{-1} sum_xi F(xi) e^{-2 pi i sigma(lambda, z_xi) / L}`.
pub fn inverse_symplectic_series(f: &DualFunction) -> LatticeSeq {
    let lattice = f.lattice;
    let n = lattice.modulus();
    let grid = lattice.dual_grid();
    let scale = 1.0 / lattice.len() as f64;
    let values = lattice
        .points()
        .map(|lam| {
            let acc: Complex64 = f
                .values
                .iter()
                .enumerate()
                .map(|(xi, v)| {
                    let s = symplectic_form(lam, grid.representative(xi), n);
                    v * n.character(n.neg(s))
                })
                .sum();
            acc * scale
        })
        .collect();
    LatticeSeq { lattice, values }
}

/// `(c * d)(lambda) = sum_{lambda'} c(lambda') d(lambda - lambda')`.
pub fn lattice_convolve(c: &LatticeSeq, d: &LatticeSeq) -> Result<LatticeSeq> {
    check_lattice(&c.lattice, &d.lattice)?;
    let lattice = c.lattice;
    let len = lattice.len();
    let values = (0..len)
        .map(|i| {
            (0..len)
                .map(|j| c.values[j] * d.values[lattice.index_diff(i, j)])
                .sum()
        })
        .collect();
    Ok(LatticeSeq { lattice, values })
}

/// `c^*(lambda) = conj(c(-lambda))`.
pub fn involution(c: &LatticeSeq) -> LatticeSeq {
    let lattice = c.lattice;
    LatticeSeq {
        lattice,
        values: (0..lattice.len())
            .map(|i| c.values[lattice.index_neg(i)].conj())
            .collect(),
    }
}

/// `(T_{lambda0} c)(lambda) = c(lambda - lambda0)`.
pub fn translate_seq(shift: PhasePoint, c: &LatticeSeq) -> Result<LatticeSeq> {
    let lattice = c.lattice;
    let s = lattice.index_of(shift).ok_or(Error::NotInLattice {
        x: shift.x,
        omega: shift.omega,
    })?;
    Ok(LatticeSeq {
        lattice,
        values: (0..lattice.len())
            .map(|i| c.values[lattice.index_diff(i, s)])
            .collect(),
    })
}

/// `P_{Lambda°}(|F|^2)(xi) = |Lambda|^{-1} sum_{l° in Lambda°} |F(z_xi + l°)|^2`.
pub fn periodize_sq(f: &PhaseFunction, lattice: Lattice) -> Result<Vec<f64>> {
    crate::phase_space::check_size(lattice.modulus(), f.modulus())?;
    let n = lattice.modulus();
    let adjoint = lattice.adjoint();
    let scale = 1.0 / lattice.len() as f64;
    Ok(lattice
        .dual_grid()
        .representatives()
        .map(|z| {
            adjoint
                .points()
                .map(|p| f.at(z.add(p, n)).norm_sqr())
                .sum::<f64>()
                * scale
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_seq, rng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn l15() -> Lattice {
        Lattice::new(ModSize::new(15).unwrap(), 3, 5).unwrap()
    }

    #[test]
    fn lattice_construction() {
        let n = ModSize::new(15).unwrap();
        assert_eq!(
            Lattice::new(n, 4, 5),
            Err(Error::InvalidLattice {
                modulus: 15,
                step: 4
            })
        );
        let lat = l15();
        assert_eq!(lat.len(), 15);
        for i in 0..lat.len() {
            assert_eq!(lat.index_of(lat.point(i)), Some(i));
        }
        assert!(!lat.contains(PhasePoint { x: 1, omega: 0 }));
    }

    #[test]
    fn adjoint_lattice_examples() {
        let lat = l15();
        let adj = lat.adjoint();
        assert_eq!(adj.steps(), (3, 5));
        let n = lat.modulus();
        for p in lat.points() {
            for q in adj.points() {
                assert_eq!(symplectic_form(q, p, n), 0);
            }
        }
        let full = Lattice::new(n, 1, 1).unwrap();
        assert_eq!(full.adjoint().steps(), (15, 15));
        assert_eq!(full.adjoint().len(), 1);
    }

    #[test]
    fn sizes_multiply_to_group_order() {
        for l in [3usize, 9, 15, 21, 33, 45] {
            let n = ModSize::new(l).unwrap();
            let divisors: Vec<usize> = (1..=l).filter(|d| l % d == 0).collect();
            for &a in &divisors {
                for &b in &divisors {
                    let lat = Lattice::new(n, a, b).unwrap();
                    assert_eq!(lat.len() * lat.adjoint().len(), l * l);
                    assert_eq!(lat.dual_grid().len(), lat.len());
                }
            }
        }
    }

    #[test]
    fn dual_grid_covers_each_coset_once() {
        let lat = l15();
        let n = lat.modulus();
        let grid = lat.dual_grid();
        let adj = lat.adjoint();
        let mut seen = vec![0usize; 225];
        for z in grid.representatives() {
            for p in adj.points() {
                let w = z.add(p, n);
                seen[w.x * 15 + w.omega] += 1;
                assert_eq!(grid.representative(grid.coset_index(w)), z);
            }
        }
        assert!(seen.iter().all(|&k| k == 1));
    }

    #[test]
    fn symplectic_series_examples() {
        let lat = l15();
        let f = symplectic_series(&LatticeSeq::delta(lat, 0));
        assert!(f.values().iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));

        let mut r = rng(30);
        let s = random_seq(lat, &mut r);
        let f = symplectic_series(&s);
        let lhs: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
        let rhs = lat.len() as f64 * s.norm().powi(2);
        assert!((lhs - rhs).abs() < 1e-10 * rhs);

        let n = lat.modulus();
        let grid = lat.dual_grid();
        for (xi, z) in grid.representatives().enumerate() {
            for p in lat.adjoint().points() {
                let moved = symplectic_series_at(&s, z.add(p, n));
                assert!((moved - f.get(xi)).norm() < 1e-12 * s.norm());
            }
        }
    }

    #[test]
    fn inverse_series_examples() {
        let lat = l15();
        let mut r = rng(31);
        let s = random_seq(lat, &mut r);
        let back = inverse_symplectic_series(&symplectic_series(&s));
        assert!(back.distance(&s) <= 1e-12 * s.norm());

        let one = inverse_symplectic_series(&DualFunction::constant(lat, c(1.0, 0.0)));
        assert!(one.distance(&LatticeSeq::delta(lat, 0)) < 1e-14);

        let f1 = symplectic_series(&random_seq(lat, &mut r));
        let f2 = symplectic_series(&random_seq(lat, &mut r));
        let sum = DualFunction::new(
            lat,
            f1.values()
                .iter()
                .zip(f2.values())
                .map(|(a, b)| a + b)
                .collect(),
        )
        .unwrap();
        let lhs = inverse_symplectic_series(&sum);
        let rhs = inverse_symplectic_series(&f1)
            .add(&inverse_symplectic_series(&f2))
            .unwrap();
        assert!(lhs.distance(&rhs) < 1e-12 * lhs.norm());
    }

    #[test]
    fn convolution_examples() {
        let lat = l15();
        let mut r = rng(32);
        let s = random_seq(lat, &mut r);
        let d = random_seq(lat, &mut r);
        assert!(
            lattice_convolve(&s, &LatticeSeq::delta(lat, 0))
                .unwrap()
                .distance(&s)
                < 1e-15
        );
        let sd = lattice_convolve(&s, &d).unwrap();
        let ds = lattice_convolve(&d, &s).unwrap();
        assert!(sd.distance(&ds) < 1e-12 * sd.norm());

        let lhs = symplectic_series(&sd);
        let (fs, fd) = (symplectic_series(&s), symplectic_series(&d));
        for xi in 0..lat.len() {
            let want = fs.get(xi) * fd.get(xi);
            assert!((lhs.get(xi) - want).norm() <= 1e-10 * want.norm().max(1.0));
        }

        let other = Lattice::new(lat.modulus(), 5, 3).unwrap();
        assert_eq!(
            lattice_convolve(&s, &LatticeSeq::zeros(other)),
            Err(Error::LatticeMismatch)
        );
    }

    #[test]
    fn involution_examples() {
        let lat = l15();
        let mut r = rng(33);
        let s = random_seq(lat, &mut r);
        assert_eq!(involution(&involution(&s)), s);
        assert_eq!(
            involution(&LatticeSeq::delta(lat, 0)),
            LatticeSeq::delta(lat, 0)
        );
        let fs = symplectic_series(&s);
        let fi = symplectic_series(&involution(&s));
        let auto = symplectic_series(&lattice_convolve(&s, &involution(&s)).unwrap());
        for xi in 0..lat.len() {
            assert!((fi.get(xi) - fs.get(xi).conj()).norm() < 1e-12 * s.norm());
            assert!(
                (auto.get(xi) - c(fs.get(xi).norm_sqr(), 0.0)).norm()
                    < 1e-10 * lat.len() as f64 * s.norm().powi(2)
            );
        }
    }

    #[test]
    fn translate_examples() {
        let lat = l15();
        let mut r = rng(34);
        let s = random_seq(lat, &mut r);
        assert_eq!(translate_seq(PhasePoint::origin(), &s).unwrap(), s);
        let p = lat.point(7);
        assert_eq!(
            translate_seq(p, &LatticeSeq::delta(lat, 0)).unwrap(),
            LatticeSeq::delta(lat, 7)
        );
        assert_eq!(
            translate_seq(PhasePoint { x: 1, omega: 0 }, &s),
            Err(Error::NotInLattice { x: 1, omega: 0 })
        );
    }

    #[test]
    fn translated_involution_inner_is_convolution() {
        let lat = Lattice::new(ModSize::new(9).unwrap(), 3, 1).unwrap();
        let mut r = rng(35);
        let s = random_seq(lat, &mut r);
        let d = random_seq(lat, &mut r);
        let conv = lattice_convolve(&s, &d).unwrap();
        let d_star = involution(&d);
        for (i, p) in lat.points().enumerate() {
            let lhs = s.inner(&translate_seq(p, &d_star).unwrap()).unwrap();
            assert!((lhs - conv.get(i)).norm() < 1e-12 * s.norm() * d.norm());
        }
    }

    #[test]
    fn periodization_examples() {
        let lat = l15();
        let n = lat.modulus();
        let p = periodize_sq(&PhaseFunction::constant(n, c(1.0, 0.0)), lat).unwrap();
        let want = lat.adjoint().len() as f64 / lat.len() as f64;
        assert!(p.iter().all(|v| (v - want).abs() < 1e-15));
        let mut r = rng(36);
        let f = PhaseFunction::new(
            n,
            (0..225)
                .map(|_| crate::random::complex_normal(&mut r))
                .collect(),
        )
        .unwrap();
        assert!(periodize_sq(&f, lat).unwrap().iter().all(|&v| v >= 0.0));
    }
}
