//! Finite phase space `Z_L x Z_L`: signals, Hilbert-Schmidt operators,
//! time-frequency shifts and operator translation.
//!
//! Everything here is exact index arithmetic modulo an odd `L` plus unit
//! modulus phases, so identities such as `alpha_z alpha_w = alpha_{z+w}`
//! hold to rounding error.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Odd modulus `L >= 3` of the cyclic group `Z_L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct ModSize(usize);

impl ModSize {
    pub fn new(l: usize) -> Result<Self> {
        if l < 3 || l.is_multiple_of(2) {
            return Err(Error::InvalidModulus(l));
        }
        Ok(ModSize(l))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// `(L + 1) / 2`, the inverse of 2 modulo `L`.
    #[inline]
    pub fn inv2(self) -> usize {
        self.0.div_ceil(2)
    }

    #[inline]
    pub fn reduce(self, v: i64) -> usize {
        v.rem_euclid(self.0 as i64) as usize
    }

    #[inline]
    pub fn add(self, a: usize, b: usize) -> usize {
        (a + b) % self.0
    }

    #[inline]
    pub fn sub(self, a: usize, b: usize) -> usize {
        (a + self.0 - b % self.0) % self.0
    }

    #[inline]
    pub fn neg(self, a: usize) -> usize {
        (self.0 - a % self.0) % self.0
    }

    #[inline]
    pub fn mul(self, a: usize, b: usize) -> usize {
        (a % self.0) * (b % self.0) % self.0
    }

    /// `e^{2 pi i k / L}`.
    #[inline]
    pub fn character(self, k: usize) -> Complex64 {
        let k = k % self.0;
        Complex64::from_polar(1.0, 2.0 * PI * k as f64 / self.0 as f64)
    }
}

impl TryFrom<usize> for ModSize {
    type Error = Error;
    fn try_from(l: usize) -> Result<Self> {
        ModSize::new(l)
    }
}

impl From<ModSize> for usize {
    fn from(n: ModSize) -> usize {
        n.0
    }
}

/// A point `z = (x, omega)` of the phase space, components in `[0, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: usize,
    pub omega: usize,
}

impl PhasePoint {
    pub fn new(x: i64, omega: i64, n: ModSize) -> Self {
        PhasePoint {
            x: n.reduce(x),
            omega: n.reduce(omega),
        }
    }

    pub const fn origin() -> Self {
        PhasePoint { x: 0, omega: 0 }
    }

    pub fn add(self, other: PhasePoint, n: ModSize) -> Self {
        PhasePoint {
            x: n.add(self.x, other.x),
            omega: n.add(self.omega, other.omega),
        }
    }

    pub fn sub(self, other: PhasePoint, n: ModSize) -> Self {
        PhasePoint {
            x: n.sub(self.x, other.x),
            omega: n.sub(self.omega, other.omega),
        }
    }

    pub fn neg(self, n: ModSize) -> Self {
        PhasePoint {
            x: n.neg(self.x),
            omega: n.neg(self.omega),
        }
    }
}

/// `sigma(z, w) = omega_z x_w - omega_w x_z (mod L)`.
pub fn symplectic_form(z: PhasePoint, w: PhasePoint, n: ModSize) -> usize {
    n.sub(n.mul(z.omega, w.x), n.mul(w.omega, z.x))
}

pub(crate) fn check_size(expected: ModSize, found: ModSize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::SizeMismatch {
            expected: expected.get(),
            found: found.get(),
        })
    }
}

/// A complex vector indexed by `Z_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    n: ModSize,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(n: ModSize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != n.get() {
            return Err(Error::SizeMismatch {
                expected: n.get(),
                found: values.len(),
            });
        }
        Ok(Signal { n, values })
    }

    pub fn zeros(n: ModSize) -> Self {
        Signal {
            n,
            values: vec![Complex64::new(0.0, 0.0); n.get()],
        }
    }

    /// Unit impulse at `t mod L`.
    pub fn delta(n: ModSize, t: usize) -> Self {
        let mut s = Signal::zeros(n);
        s.values[t % n.get()] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_fn(n: ModSize, f: impl FnMut(usize) -> Complex64) -> Self {
        Signal {
            n,
            values: (0..n.get()).map(f).collect(),
        }
    }

    #[inline]
    pub fn modulus(&self) -> ModSize {
        self.n
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, t: usize) -> Complex64 {
        self.values[t % self.n.get()]
    }

    /// `<f, g> = sum_t f(t) conj(g(t))`.
    pub fn inner(&self, other: &Signal) -> Result<Complex64> {
        check_size(self.n, other.n)?;
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

    /// Euclidean distance; panics if the sizes differ.
    pub fn distance(&self, other: &Signal) -> f64 {
        assert_eq!(self.n, other.n, "signal sizes differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Signal {
        Signal {
            n: self.n,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// Hilbert-Schmidt operator on `C^L`; the matrix is its kernel, entry
/// `(t, x)` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HsOperator {
    n: ModSize,
    entries: Vec<Complex64>,
}

impl HsOperator {
    pub fn new(n: ModSize, entries: Vec<Complex64>) -> Result<Self> {
        let len = n.get() * n.get();
        if entries.len() != len {
            return Err(Error::SizeMismatch {
                expected: len,
                found: entries.len(),
            });
        }
        Ok(HsOperator { n, entries })
    }

    pub fn zeros(n: ModSize) -> Self {
        HsOperator {
            n,
            entries: vec![Complex64::new(0.0, 0.0); n.get() * n.get()],
        }
    }

    pub fn identity(n: ModSize) -> Self {
        HsOperator::from_fn(n, |t, x| {
            if t == x {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(n: ModSize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let l = n.get();
        let mut entries = Vec::with_capacity(l * l);
        for t in 0..l {
            for x in 0..l {
                entries.push(f(t, x));
            }
        }
        HsOperator { n, entries }
    }

    #[inline]
    pub fn modulus(&self) -> ModSize {
        self.n
    }

    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, t: usize, x: usize) -> Complex64 {
        self.entries[t * self.n.get() + x]
    }

    /// `(S f)(t) = sum_x k(t, x) f(x)`.
    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        check_size(self.n, f.modulus())?;
        let l = self.n.get();
        Ok(Signal::from_fn(self.n, |t| {
            self.entries[t * l..(t + 1) * l]
                .iter()
                .zip(f.values())
                .map(|(k, v)| k * v)
                .sum()
        }))
    }

    pub fn adjoint(&self) -> HsOperator {
        HsOperator::from_fn(self.n, |t, x| self.get(x, t).conj())
    }

    pub fn matmul(&self, other: &HsOperator) -> Result<HsOperator> {
        check_size(self.n, other.n)?;
        let l = self.n.get();
        let mut out = vec![Complex64::new(0.0, 0.0); l * l];
        for t in 0..l {
            for k in 0..l {
                let a = self.entries[t * l + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.entries[k * l..(k + 1) * l];
                for (o, b) in out[t * l..(t + 1) * l].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(HsOperator {
            n: self.n,
            entries: out,
        })
    }

    pub fn hs_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// HS distance; panics if the sizes differ.
    pub fn distance(&self, other: &HsOperator) -> f64 {
        assert_eq!(self.n, other.n, "operator sizes differ");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> HsOperator {
        HsOperator {
            n: self.n,
            entries: self.entries.iter().map(|v| v * c).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &HsOperator) -> Result<()> {
        check_size(self.n, other.n)?;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += c * b;
        }
        Ok(())
    }
}

/// `pi(z) f (t) = e^{2 pi i omega t / L} f(t - x)`.
pub fn tf_shift(z: PhasePoint, f: &Signal) -> Signal {
    let n = f.modulus();
    Signal::from_fn(n, |t| n.character(n.mul(z.omega, t)) * f.get(n.sub(t, z.x)))
}

/// `pi(z)^* = e^{-2 pi i x omega / L} pi(-z)`.
pub fn tf_shift_adjoint(z: PhasePoint, f: &Signal) -> Signal {
    let n = f.modulus();
    let phase = n.character(n.neg(n.mul(z.x, z.omega)));
    tf_shift(z.neg(n), f).scaled(phase)
}

/// `alpha_z(S) = pi(z) S pi(z)^*`.
///
/// Kernel form: `k'(t, s) = e^{2 pi i omega (t - s) / L} k(t - x, s - x)`;
/// the cocycle phases of `pi(z)` and `pi(z)^*` cancel.
pub fn translate_operator(z: PhasePoint, s: &HsOperator) -> HsOperator {
    let n = s.modulus();
    HsOperator::from_fn(n, |t, u| {
        n.character(n.mul(z.omega, n.sub(t, u))) * s.get(n.sub(t, z.x), n.sub(u, z.x))
    })
}

/// `(psi (x) phi)(e) = <e, phi> psi`.
pub fn rank_one(psi: &Signal, phi: &Signal) -> Result<HsOperator> {
    check_size(psi.modulus(), phi.modulus())?;
    Ok(HsOperator::from_fn(psi.modulus(), |t, x| {
        psi.get(t) * phi.get(x).conj()
    }))
}

/// `<S, T>_HS = tr(S T^*) = sum k_S conj(k_T)`.
pub fn hs_inner(s: &HsOperator, t: &HsOperator) -> Result<Complex64> {
    check_size(s.modulus(), t.modulus())?;
    Ok(s.entries
        .iter()
        .zip(&t.entries)
        .map(|(a, b)| a * b.conj())
        .sum())
}

pub fn trace(s: &HsOperator) -> Complex64 {
    (0..s.modulus().get()).map(|t| s.get(t, t)).sum()
}

/// `(P f)(t) = f(-t)`.
pub fn parity(f: &Signal) -> Signal {
    let n = f.modulus();
    Signal::from_fn(n, |t| f.get(n.neg(t)))
}

/// `P S P`, kernel `(t, x) -> k(-t, -x)`.
pub fn check_operator(s: &HsOperator) -> HsOperator {
    let n = s.modulus();
    HsOperator::from_fn(n, |t, x| s.get(n.neg(t), n.neg(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_operator, random_signal, rng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn modulus_validation() {
        assert!(ModSize::new(15).is_ok());
        assert_eq!(ModSize::new(4), Err(Error::InvalidModulus(4)));
        assert_eq!(ModSize::new(1), Err(Error::InvalidModulus(1)));
        let n = ModSize::new(15).unwrap();
        assert_eq!(n.mul(2, n.inv2()), 1);
    }

    #[test]
    fn symplectic_form_examples() {
        let n = ModSize::new(15).unwrap();
        let z = PhasePoint::new(2, 3, n);
        let w = PhasePoint::new(4, 5, n);
        assert_eq!(symplectic_form(z, w, n), 2);
        assert_eq!(symplectic_form(z, z, n), 0);
        assert_eq!(
            symplectic_form(PhasePoint::new(1, 0, n), PhasePoint::new(0, 1, n), n),
            14
        );
    }

    #[test]
    fn tf_shift_examples() {
        let n = ModSize::new(3).unwrap();
        let d0 = Signal::delta(n, 0);
        assert_eq!(tf_shift(PhasePoint::origin(), &d0), d0);
        let out = tf_shift(PhasePoint::new(1, 1, n), &d0);
        let w = n.character(1);
        assert!(out.distance(&Signal::new(n, vec![c(0.0, 0.0), w, c(0.0, 0.0)]).unwrap()) < 1e-15);
        let n = ModSize::new(15).unwrap();
        for x in 0..15 {
            let out = tf_shift(PhasePoint::new(x as i64, 0, n), &Signal::delta(n, 0));
            assert_eq!(out, Signal::delta(n, x));
        }
    }

    #[test]
    fn tf_shift_adjoint_examples() {
        let n = ModSize::new(3).unwrap();
        let z = PhasePoint::new(1, 1, n);
        let d0 = Signal::delta(n, 0);
        let d1 = Signal::delta(n, 1);
        let lhs = tf_shift(z, &d0).inner(&d1).unwrap();
        let rhs = d0.inner(&tf_shift_adjoint(z, &d1)).unwrap();
        assert!((lhs - rhs).norm() < 1e-15);
        assert_eq!(tf_shift_adjoint(PhasePoint::origin(), &d1), d1);

        let n = ModSize::new(15).unwrap();
        let mut r = rng(1);
        for _ in 0..20 {
            let f = random_signal(n, &mut r);
            let z = PhasePoint::new(3, 11, n);
            let back = tf_shift_adjoint(z, &tf_shift(z, &f));
            assert!(back.distance(&f) <= 1e-12 * f.norm());
        }
    }

    #[test]
    fn translate_operator_examples() {
        let n = ModSize::new(15).unwrap();
        let mut r = rng(2);
        let s = random_operator(n, &mut r);
        assert_eq!(translate_operator(PhasePoint::origin(), &s), s);

        let psi = random_signal(n, &mut r);
        let phi = random_signal(n, &mut r);
        let z = PhasePoint::new(2, 7, n);
        let lhs = translate_operator(z, &rank_one(&psi, &phi).unwrap());
        let rhs = rank_one(&tf_shift(z, &psi), &tf_shift(z, &phi)).unwrap();
        assert!(lhs.distance(&rhs) < 1e-12 * lhs.hs_norm());

        // matrix definition pi(z) S pi(z)^*
        let shift = HsOperator::from_fn(n, |t, x| tf_shift(z, &Signal::delta(n, x)).get(t));
        let direct = shift.matmul(&s).unwrap().matmul(&shift.adjoint()).unwrap();
        assert!(direct.distance(&translate_operator(z, &s)) < 1e-12 * s.hs_norm());

        let w = PhasePoint::new(9, 4, n);
        let composed = translate_operator(z, &translate_operator(w, &s));
        let joint = translate_operator(z.add(w, n), &s);
        assert!(composed.distance(&joint) < 1e-12 * s.hs_norm());
    }

    #[test]
    fn rank_one_examples() {
        let n = ModSize::new(15).unwrap();
        let d0 = Signal::delta(n, 0);
        let op = rank_one(&d0, &d0).unwrap();
        assert_eq!(op.get(0, 0), c(1.0, 0.0));
        assert_eq!(op.hs_norm(), 1.0);

        let mut r = rng(3);
        let psi = random_signal(n, &mut r);
        let phi = random_signal(n, &mut r);
        let e = random_signal(n, &mut r);
        let op = rank_one(&psi, &phi).unwrap();
        let expected = psi.scaled(e.inner(&phi).unwrap());
        assert!(op.apply(&e).unwrap().distance(&expected) < 1e-12 * expected.norm());
        assert!((op.hs_norm() - psi.norm() * phi.norm()).abs() < 1e-12 * op.hs_norm());
        assert!((trace(&op) - psi.inner(&phi).unwrap()).norm() < 1e-12 * op.hs_norm());
    }

    #[test]
    fn hs_inner_and_trace() {
        let n = ModSize::new(15).unwrap();
        let mut r = rng(4);
        let s = random_operator(n, &mut r);
        let t = random_operator(n, &mut r);
        let ss = hs_inner(&s, &s).unwrap();
        assert!(ss.im.abs() < 1e-12 && ss.re > 0.0);
        let tr = trace(&s.matmul(&t.adjoint()).unwrap());
        assert!((tr - hs_inner(&s, &t).unwrap()).norm() < 1e-10 * s.hs_norm() * t.hs_norm());
        assert_eq!(trace(&HsOperator::identity(n)), c(15.0, 0.0));

        let d0 = Signal::delta(n, 0);
        let d1 = Signal::delta(n, 1);
        let a = rank_one(&d0, &d0).unwrap();
        let b = rank_one(&d0, &d1).unwrap();
        assert_eq!(hs_inner(&a, &b).unwrap(), c(0.0, 0.0));

        let (p1, f1, p2, f2) = (
            random_signal(n, &mut r),
            random_signal(n, &mut r),
            random_signal(n, &mut r),
            random_signal(n, &mut r),
        );
        let lhs = hs_inner(&rank_one(&p1, &f1).unwrap(), &rank_one(&p2, &f2).unwrap()).unwrap();
        let rhs = p1.inner(&p2).unwrap() * f1.inner(&f2).unwrap().conj();
        assert!((lhs - rhs).norm() < 1e-10 * p1.norm() * p2.norm() * f1.norm() * f2.norm());
    }

    #[test]
    fn parity_examples() {
        let n = ModSize::new(15).unwrap();
        assert_eq!(parity(&Signal::delta(n, 0)), Signal::delta(n, 0));
        assert_eq!(parity(&Signal::delta(n, 1)), Signal::delta(n, 14));
        let mut r = rng(5);
        let f = random_signal(n, &mut r);
        assert_eq!(parity(&parity(&f)), f);
        let s = random_operator(n, &mut r);
        assert_eq!(check_operator(&check_operator(&s)), s);
        let p = HsOperator::from_fn(n, |t, x| {
            if t == n.neg(x) {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let psp = p.matmul(&s).unwrap().matmul(&p).unwrap();
        assert_eq!(psp, check_operator(&s));
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        let a = Signal::zeros(ModSize::new(9).unwrap());
        let b = Signal::zeros(ModSize::new(15).unwrap());
        assert_eq!(
            a.inner(&b),
            Err(Error::SizeMismatch {
                expected: 9,
                found: 15
            })
        );
        assert!(rank_one(&a, &b).is_err());
        assert!(Signal::new(ModSize::new(9).unwrap(), vec![]).is_err());
    }
}
