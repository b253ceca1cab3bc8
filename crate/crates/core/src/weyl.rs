//! Weyl calculus on `Z_L x Z_L`.
//!
//! Normalisations:
//!
//! * `W(psi, phi)(x, w) = L^{-1/2} sum_t psi(x + t/2) conj(phi(x - t/2)) e^{-2 pi i w t / L}`,
//!   where `t/2` means multiplication by `(L + 1) / 2`. The Weyl symbol uses the
//!   same sum over the kernel, so `a_{psi (x) phi} = W(psi, phi)` and the map
//!   `S -> a_S` is unitary.
//! * `F_sigma(F)(z) = (1/L) sum_{z'} F(z') e^{-2 pi i sigma(z, z') / L}` is unitary and
//!   its own inverse.
//! * `F_W(S)(x, w) = L^{-1/2} e^{-2 pi i x w (L+1)/2 / L} tr(pi(-z) S)`. The minus
//!   sign in the half phase is the one for which `F_W(S) = F_sigma(a_S)` holds
//!   exactly; the opposite lifting breaks that identity (see the tests).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase_space::{
    check_size, tf_shift, translate_operator, HsOperator, ModSize, PhasePoint, Signal,
};

/// Complex function on the phase space, stored row-major in `(x, omega)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFunction {
    n: ModSize,
    values: Vec<Complex64>,
}

impl PhaseFunction {
    pub fn new(n: ModSize, values: Vec<Complex64>) -> Result<Self> {
        let len = n.get() * n.get();
        if values.len() != len {
            return Err(Error::SizeMismatch {
                expected: len,
                found: values.len(),
            });
        }
        Ok(PhaseFunction { n, values })
    }

    pub fn zeros(n: ModSize) -> Self {
        PhaseFunction::constant(n, Complex64::new(0.0, 0.0))
    }

    pub fn constant(n: ModSize, c: Complex64) -> Self {
        PhaseFunction {
            n,
            values: vec![c; n.get() * n.get()],
        }
    }

    pub fn from_fn(n: ModSize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let l = n.get();
        let mut values = Vec::with_capacity(l * l);
        for x in 0..l {
            for w in 0..l {
                values.push(f(x, w));
            }
        }
        PhaseFunction { n, values }
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
    pub fn get(&self, x: usize, omega: usize) -> Complex64 {
        self.values[x * self.n.get() + omega]
    }

    #[inline]
    pub fn at(&self, z: PhasePoint) -> Complex64 {
        self.get(z.x, z.omega)
    }

    pub fn inner(&self, other: &PhaseFunction) -> Result<Complex64> {
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

    /// L2 distance; panics if the sizes differ.
    pub fn distance(&self, other: &PhaseFunction) -> f64 {
        assert_eq!(self.n, other.n, "phase function sizes differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> PhaseFunction {
        PhaseFunction {
            n: self.n,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &PhaseFunction) -> Result<()> {
        check_size(self.n, other.n)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
        Ok(())
    }

    /// `self += c * T_z other`, without materialising the shifted copy.
    pub fn add_scaled_translate(
        &mut self,
        c: Complex64,
        z: PhasePoint,
        other: &PhaseFunction,
    ) -> Result<()> {
        check_size(self.n, other.n)?;
        let n = self.n;
        let l = n.get();
        for x in 0..l {
            let sx = n.sub(x, z.x);
            for w in 0..l {
                let sw = n.sub(w, z.omega);
                self.values[x * l + w] += c * other.values[sx * l + sw];
            }
        }
        Ok(())
    }
}

/// `(T_z F)(w) = F(w - z)`.
pub fn translate_function(z: PhasePoint, f: &PhaseFunction) -> PhaseFunction {
    let n = f.modulus();
    PhaseFunction::from_fn(n, |x, w| f.get(n.sub(x, z.x), n.sub(w, z.omega)))
}

fn roots(n: ModSize) -> Vec<Complex64> {
    (0..n.get()).map(|k| n.character(k)).collect()
}

/// Forward DFT along `t` of an `(x, t)` array with the `L^{-1/2}` Weyl factor.
fn weyl_dft(n: ModSize, folded: &[Complex64]) -> PhaseFunction {
    let l = n.get();
    let r = roots(n);
    let scale = 1.0 / (l as f64).sqrt();
    let mut values = vec![Complex64::new(0.0, 0.0); l * l];
    for x in 0..l {
        let row = &folded[x * l..(x + 1) * l];
        for w in 0..l {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, v) in row.iter().enumerate() {
                // e^{-2 pi i w t / L}
                acc += v * r[(l - (w * t) % l) % l];
            }
            values[x * l + w] = acc * scale;
        }
    }
    PhaseFunction { n, values }
}

/// Cross-Wigner distribution `W(psi, phi)`.
pub fn cross_wigner(psi: &Signal, phi: &Signal) -> Result<PhaseFunction> {
    check_size(psi.modulus(), phi.modulus())?;
    let n = psi.modulus();
    let l = n.get();
    let h = n.inv2();
    let mut folded = Vec::with_capacity(l * l);
    for x in 0..l {
        for t in 0..l {
            let ht = n.mul(h, t);
            folded.push(psi.get(n.add(x, ht)) * phi.get(n.sub(x, ht)).conj());
        }
    }
    Ok(weyl_dft(n, &folded))
}

/// Weyl symbol `a_S` of an operator.
pub fn weyl_symbol(s: &HsOperator) -> PhaseFunction {
    let n = s.modulus();
    let l = n.get();
    let h = n.inv2();
    let mut folded = Vec::with_capacity(l * l);
    for x in 0..l {
        for t in 0..l {
            let ht = n.mul(h, t);
            folded.push(s.get(n.add(x, ht), n.sub(x, ht)));
        }
    }
    weyl_dft(n, &folded)
}

/// Weyl transform `f -> L_f`, the inverse of [`weyl_symbol`].
///
/// Kernel: `k(u, v) = L^{-1/2} sum_w f((u + v)/2, w) e^{2 pi i w (u - v) / L}`.
pub fn weyl_transform(f: &PhaseFunction) -> HsOperator {
    let n = f.modulus();
    let l = n.get();
    let h = n.inv2();
    let r = roots(n);
    let scale = 1.0 / (l as f64).sqrt();
    let mut kernel = vec![Complex64::new(0.0, 0.0); l * l];
    for x in 0..l {
        for t in 0..l {
            let mut acc = Complex64::new(0.0, 0.0);
            for w in 0..l {
                acc += f.get(x, w) * r[(w * t) % l];
            }
            let ht = n.mul(h, t);
            let (u, v) = (n.add(x, ht), n.sub(x, ht));
            kernel[u * l + v] = acc * scale;
        }
    }
    HsOperator::new(n, kernel).expect("kernel has L*L entries")
}

/// Symplectic Fourier transform on the full phase space.
pub fn symplectic_ft(f: &PhaseFunction) -> PhaseFunction {
    let n = f.modulus();
    let l = n.get();
    let r = roots(n);
    // partial[x'][x] = sum_w' F(x', w') e^{2 pi i w' x / L}
    let mut partial = vec![Complex64::new(0.0, 0.0); l * l];
    for xp in 0..l {
        for x in 0..l {
            let mut acc = Complex64::new(0.0, 0.0);
            for wp in 0..l {
                acc += f.get(xp, wp) * r[(wp * x) % l];
            }
            partial[xp * l + x] = acc;
        }
    }
    let scale = 1.0 / l as f64;
    PhaseFunction::from_fn(n, |x, w| {
        let mut acc = Complex64::new(0.0, 0.0);
        for xp in 0..l {
            acc += partial[xp * l + x] * r[(l - (w * xp) % l) % l];
        }
        acc * scale
    })
}

fn fourier_wigner_signed(s: &HsOperator, half_phase_sign: i64) -> PhaseFunction {
    let n = s.modulus();
    let l = n.get();
    let h = n.inv2();
    let r = roots(n);
    let scale = 1.0 / (l as f64).sqrt();
    PhaseFunction::from_fn(n, |x, w| {
        // tr(pi(-z) S) = sum_t e^{-2 pi i w t / L} k(t + x, t)
        let mut tr = Complex64::new(0.0, 0.0);
        for t in 0..l {
            tr += r[(l - (w * t) % l) % l] * s.get(n.add(t, x), t);
        }
        let half = n.mul(n.mul(h, x), w) as i64 * half_phase_sign;
        n.character(n.reduce(half)) * tr * scale
    })
}

/// Fourier-Wigner transform `F_W(S)`.
pub fn fourier_wigner(s: &HsOperator) -> PhaseFunction {
    fourier_wigner_signed(s, -1)
}

/// Short-time Fourier transform `V_psi phi(z) = <phi, pi(z) psi>`.
pub fn stft(phi: &Signal, window: &Signal) -> Result<PhaseFunction> {
    check_size(phi.modulus(), window.modulus())?;
    let n = phi.modulus();
    Ok(PhaseFunction::from_fn(n, |x, w| {
        let shifted = tf_shift(PhasePoint { x, omega: w }, window);
        phi.inner(&shifted).expect("sizes checked")
    }))
}

/// `|| L_{T_z f} - alpha_z(L_f) ||_HS`.
pub fn translation_covariance_check(f: &PhaseFunction, z: PhasePoint) -> f64 {
    let lhs = weyl_transform(&translate_function(z, f));
    let rhs = translate_operator(z, &weyl_transform(f));
    lhs.distance(&rhs)
}
