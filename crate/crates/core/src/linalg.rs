//! Small dense complex matrices: products, inverses, determinants and
//! Hermitian eigenvalues. Sizes here are the transfer-matrix dimensions
//! (a handful of rows and columns), so everything is direct.

use num_complex::Complex64;

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        CMatrix::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        CMatrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Panics on incompatible shapes.
    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shapes");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix sum shapes"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "matrix difference shapes"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Gauss-Jordan inverse with partial pivoting; `None` if a pivot vanishes.
    pub fn inverse(&self) -> Option<CMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n);
        for col in 0..n {
            let pivot =
                (col..n).max_by(|&i, &j| a.get(i, col).norm().total_cmp(&a.get(j, col).norm()))?;
            if a.get(pivot, col).norm() == 0.0 {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = ONE / a.get(col, col);
            for j in 0..n {
                a.data[col * n + j] *= p;
                inv.data[col * n + j] *= p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a.get(i, col);
                if f == ZERO {
                    continue;
                }
                for j in 0..n {
                    let (av, iv) = (a.get(col, j), inv.get(col, j));
                    a.data[i * n + j] -= f * av;
                    inv.data[i * n + j] -= f * iv;
                }
            }
        }
        Some(inv)
    }

    /// Determinant via LU with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a.get(i, col).norm().total_cmp(&a.get(j, col).norm()))
                .unwrap_or(col);
            let pv = a.get(pivot, col);
            if pv == ZERO {
                return ZERO;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            det *= pv;
            for i in col + 1..n {
                let f = a.get(i, col) / pv;
                for j in col..n {
                    let v = a.get(col, j);
                    a.data[i * n + j] -= f * v;
                }
            }
        }
        det
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// `H = X + iY` is embedded as the real symmetric `[[X, -Y], [Y, X]]`,
    /// whose spectrum is that of `H` with every eigenvalue doubled, and
    /// diagonalised by cyclic Jacobi rotations. Only the Hermitian part of
    /// `self` is used.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        assert_eq!(self.rows, self.cols, "eigenvalues of non-square matrix");
        let n = self.rows;
        let m = 2 * n;
        let mut r = vec![0.0f64; m * m];
        for i in 0..n {
            for j in 0..n {
                let h = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                r[i * m + j] = h.re;
                r[(i + n) * m + (j + n)] = h.re;
                r[i * m + (j + n)] = -h.im;
                r[(i + n) * m + j] = h.im;
            }
        }
        let mut eig = jacobi_eigenvalues(&mut r, m);
        eig.sort_by(f64::total_cmp);
        eig.into_iter().step_by(2).collect()
    }
}

/// Cyclic Jacobi on a real symmetric `m x m` matrix; destroys `a`.
fn jacobi_eigenvalues(a: &mut [f64], m: usize) -> Vec<f64> {
    const MAX_SWEEPS: usize = 100;
    let total: f64 = a.iter().map(|v| v * v).sum::<f64>();
    let tol = f64::EPSILON * f64::EPSILON * total;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * m + j] * a[i * m + j])
            .sum();
        if off <= tol {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let (akp, akq) = (a[k * m + p], a[k * m + q]);
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p * m + k], a[q * m + k]);
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| a[i * m + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{complex_normal, rng};

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut r = rng(seed);
        CMatrix::from_fn(rows, cols, |_, _| complex_normal(&mut r))
    }

    #[test]
    fn inverse_and_determinant() {
        let a = random_matrix(4, 4, 1);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).sub(&CMatrix::identity(4)).frobenius() < 1e-12);
        let d = a.determinant() * inv.determinant();
        assert!((d - ONE).norm() < 1e-12);
        assert!(CMatrix::zeros(2, 2).inverse().is_none());
        assert_eq!(CMatrix::zeros(3, 3).determinant(), ZERO);
    }

    #[test]
    fn eigenvalues_of_diagonal_and_2x2() {
        let d = CMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::new([3.0, -1.0, 2.0][i], 0.0)
            } else {
                ZERO
            }
        });
        let e = d.hermitian_eigenvalues();
        assert!(
            (e[0] + 1.0).abs() < 1e-14 && (e[1] - 2.0).abs() < 1e-14 && (e[2] - 3.0).abs() < 1e-14
        );

        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let h = CMatrix::from_rows(
            2,
            2,
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(2.0, 0.0),
            ],
        );
        let e = h.hermitian_eigenvalues();
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_reproduce_trace_and_determinant() {
        for seed in 0..20 {
            let b = random_matrix(5, 5, 100 + seed);
            let h = b.adjoint().mul(&b);
            let e = h.hermitian_eigenvalues();
            let tr: f64 = (0..5).map(|i| h.get(i, i).re).sum();
            assert!((e.iter().sum::<f64>() - tr).abs() < 1e-12 * tr);
            let det = h.determinant().re;
            assert!((e.iter().product::<f64>() - det).abs() < 1e-10 * det.abs().max(1.0));
            assert!(e.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
