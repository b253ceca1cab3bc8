//! Riesz and frame conditions for lattice convolution systems.
//!
//! A convolution system `A = [a_{m,n}]` (`M x N` sequences on `Lambda`) acts
//! on `c in l2_N(Lambda)` by `(A * c)_m = sum_n a_{m,n} * c_n`. Its transfer
//! matrix `Â(xi)` collects the symplectic series of the entries on the dual
//! grid, and the frame constants are the extreme eigenvalues of
//! `Â(xi)^* Â(xi)` over that (finite) grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    inverse_symplectic_series, lattice_convolve, periodize_sq, symplectic_series, DualFunction,
    Lattice, LatticeSeq,
};
use crate::linalg::CMatrix;
use crate::phase_space::HsOperator;
use crate::weyl::fourier_wigner;

/// Relative positivity threshold: a lower bound counts as positive when it
/// exceeds `DEFAULT_TOL_POS * upper bound`.
pub const DEFAULT_TOL_POS: f64 = 1e-10;

/// `M x N` matrix of sequences over a common lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionMatrix {
    lattice: Lattice,
    rows: usize,
    cols: usize,
    entries: Vec<LatticeSeq>,
}

impl ConvolutionMatrix {
    /// `entries` is row-major and must share one lattice.
    pub fn new(rows: usize, cols: usize, entries: Vec<LatticeSeq>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: entries.len(),
                cols: 1,
            });
        }
        let lattice = entries[0].lattice();
        if entries.iter().any(|e| e.lattice() != lattice) {
            return Err(Error::LatticeMismatch);
        }
        Ok(ConvolutionMatrix {
            lattice,
            rows,
            cols,
            entries,
        })
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
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
    pub fn get(&self, m: usize, n: usize) -> &LatticeSeq {
        &self.entries[m * self.cols + n]
    }

    pub fn entries(&self) -> &[LatticeSeq] {
        &self.entries
    }

    /// `(A * c)_m = sum_n a_{m,n} * c_n`.
    pub fn apply(&self, c: &[LatticeSeq]) -> Result<Vec<LatticeSeq>> {
        if c.len() != self.cols {
            return Err(Error::SizeMismatch {
                expected: self.cols,
                found: c.len(),
            });
        }
        (0..self.rows)
            .map(|m| {
                let mut acc = LatticeSeq::zeros(self.lattice);
                for (n, cn) in c.iter().enumerate() {
                    acc = acc.add(&lattice_convolve(self.get(m, n), cn)?)?;
                }
                Ok(acc)
            })
            .collect()
    }
}

/// Per-xi complex matrices `Â(xi)`, indexed by the dual grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    lattice: Lattice,
    rows: usize,
    cols: usize,
    blocks: Vec<CMatrix>,
}

impl TransferMatrix {
    pub fn new(lattice: Lattice, rows: usize, cols: usize, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != lattice.len() {
            return Err(Error::SizeMismatch {
                expected: lattice.len(),
                found: blocks.len(),
            });
        }
        if let Some(b) = blocks.iter().find(|b| b.rows() != rows || b.cols() != cols) {
            return Err(Error::ShapeMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: b.rows(),
                cols: b.cols(),
            });
        }
        Ok(TransferMatrix {
            lattice,
            rows,
            cols,
            blocks,
        })
    }

    pub fn from_fn(
        lattice: Lattice,
        rows: usize,
        cols: usize,
        f: impl FnMut(usize) -> CMatrix,
    ) -> Result<Self> {
        TransferMatrix::new(lattice, rows, cols, (0..lattice.len()).map(f).collect())
    }

    /// The same matrix at every xi.
    pub fn constant(lattice: Lattice, m: CMatrix) -> Self {
        TransferMatrix {
            lattice,
            rows: m.rows(),
            cols: m.cols(),
            blocks: vec![m; lattice.len()],
        }
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
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
    pub fn at(&self, xi: usize) -> &CMatrix {
        &self.blocks[xi]
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    /// Pointwise product `self(xi) other(xi)`.
    pub fn mul(&self, other: &TransferMatrix) -> Result<TransferMatrix> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected_rows: self.cols,
                expected_cols: other.cols,
                rows: other.rows,
                cols: other.cols,
            });
        }
        Ok(TransferMatrix {
            lattice: self.lattice,
            rows: self.rows,
            cols: other.cols,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.mul(b))
                .collect(),
        })
    }

    /// Largest Frobenius distance over the grid; panics on shape mismatch.
    pub fn max_distance(&self, other: &TransferMatrix) -> f64 {
        assert_eq!(self.blocks.len(), other.blocks.len());
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.sub(b).frobenius())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Bessel only: fewer rows than columns, so no lower bound can exist.
    Bounded,
    Frame,
    RieszBasis,
    Fail,
}

/// A dual-grid point reported for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub index: usize,
    pub x: usize,
    pub omega: usize,
}

impl Witness {
    fn at(lattice: Lattice, index: usize) -> Self {
        let z = lattice.dual_grid().representative(index);
        Witness {
            index,
            x: z.x,
            omega: z.omega,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub alpha: f64,
    pub beta: f64,
    pub delta: Option<f64>,
    pub verdict: Verdict,
    /// Where the lower bound is attained.
    pub argmin: Witness,
    /// Grid points whose lower bound falls under the threshold.
    pub failing: Vec<Witness>,
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Frame | Verdict::RieszBasis)
    }

    /// Builds a report from per-xi lower and upper bounds.
    fn from_bounds(
        lattice: Lattice,
        lower: &[f64],
        upper: &[f64],
        rel_tol: f64,
        verdict_if_positive: Verdict,
    ) -> Self {
        let (argmin, alpha) = lower
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("dual grid is non-empty");
        let beta = upper.iter().copied().fold(0.0, f64::max);
        let tol = rel_tol * beta;
        let failing: Vec<Witness> = lower
            .iter()
            .enumerate()
            .filter(|(_, &v)| v <= tol)
            .map(|(i, _)| Witness::at(lattice, i))
            .collect();
        FrameReport {
            alpha,
            beta,
            delta: None,
            verdict: if failing.is_empty() {
                verdict_if_positive
            } else {
                Verdict::Fail
            },
            argmin: Witness::at(lattice, argmin),
            failing,
        }
    }
}

/// `Â(xi)[m][n] = F_sigma^Lambda(a_{m,n})(xi)`.
pub fn transfer_matrix(a: &ConvolutionMatrix) -> TransferMatrix {
    let series: Vec<DualFunction> = a.entries.par_iter().map(symplectic_series).collect();
    let lattice = a.lattice;
    let blocks = (0..lattice.len())
        .map(|xi| CMatrix::from_fn(a.rows, a.cols, |m, n| series[m * a.cols + n].get(xi)))
        .collect();
    TransferMatrix {
        lattice,
        rows: a.rows,
        cols: a.cols,
        blocks,
    }
}

/// Frame constants `alpha_A`, `beta_A` (and `delta_A` when square) with the
/// default relative threshold.
pub fn frame_bounds(t: &TransferMatrix) -> FrameReport {
    frame_bounds_with_tol(t, DEFAULT_TOL_POS)
}

pub fn frame_bounds_with_tol(t: &TransferMatrix, rel_tol: f64) -> FrameReport {
    let eig: Vec<Vec<f64>> = t
        .blocks
        .par_iter()
        .map(|b| b.adjoint().mul(b).hermitian_eigenvalues())
        .collect();
    let lower: Vec<f64> = eig.iter().map(|e| e[0].max(0.0)).collect();
    let upper: Vec<f64> = eig.iter().map(|e| *e.last().expect("non-empty")).collect();

    if t.rows < t.cols {
        let mut report =
            FrameReport::from_bounds(t.lattice, &lower, &upper, rel_tol, Verdict::Bounded);
        report.verdict = Verdict::Bounded;
        return report;
    }
    if t.rows > t.cols {
        return FrameReport::from_bounds(t.lattice, &lower, &upper, rel_tol, Verdict::Frame);
    }

    let mut report =
        FrameReport::from_bounds(t.lattice, &lower, &upper, rel_tol, Verdict::RieszBasis);
    let dets: Vec<f64> = t.blocks.iter().map(|b| b.determinant().norm()).collect();
    let delta = dets.iter().copied().fold(f64::INFINITY, f64::min);
    report.delta = Some(delta);
    // |det|^2 is the product of the eigenvalues of Â^*Â; compare against
    // tol * beta^N so the 1x1 case coincides with the eigenvalue test.
    let det_tol = (rel_tol * report.beta * report.beta.powi(t.cols as i32 - 1)).sqrt();
    if delta <= det_tol && report.verdict != Verdict::Fail {
        report.verdict = Verdict::Fail;
        report.failing = dets
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= det_tol)
            .map(|(i, _)| Witness::at(t.lattice, i))
            .collect();
    }
    report
}

/// Scalar Riesz condition on `q`: moduli of its symplectic series are bounded
/// away from zero. `alpha` and `beta` are moduli, i.e. square roots of the
/// 1x1 eigenvalue bounds of [`frame_bounds`].
pub fn single_gen_condition(q: &LatticeSeq) -> FrameReport {
    single_gen_condition_with_tol(q, DEFAULT_TOL_POS)
}

pub fn single_gen_condition_with_tol(q: &LatticeSeq, rel_tol: f64) -> FrameReport {
    let f = symplectic_series(q);
    let moduli: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    FrameReport::from_bounds(q.lattice(), &moduli, &moduli, rel_tol, Verdict::RieszBasis)
}

/// Riesz condition for `{alpha_lambda(S_n)}` through the Gram matrices
/// `G(z) = sum_{l°} v(z + l°) v(z + l°)^H`, `v = (F_W(S_1), ..., F_W(S_N))`.
///
/// For `N = 1` the bounds equal `|Lambda|` times the extremes of
/// [`periodize_sq`] applied to `F_W(S_1)`.
pub fn gram_matrix_bounds(generators: &[HsOperator], lattice: Lattice) -> Result<FrameReport> {
    gram_matrix_bounds_with_tol(generators, lattice, DEFAULT_TOL_POS)
}

pub fn gram_matrix_bounds_with_tol(
    generators: &[HsOperator],
    lattice: Lattice,
    rel_tol: f64,
) -> Result<FrameReport> {
    if generators.is_empty() {
        return Err(Error::Invalid("at least one generator is required".into()));
    }
    for g in generators {
        crate::phase_space::check_size(lattice.modulus(), g.modulus())?;
    }
    let spectra: Vec<_> = generators.par_iter().map(fourier_wigner).collect();
    let gram = gram_matrices(&spectra, lattice);
    let eig: Vec<Vec<f64>> = gram.par_iter().map(|g| g.hermitian_eigenvalues()).collect();
    let lower: Vec<f64> = eig.iter().map(|e| e[0].max(0.0)).collect();
    let upper: Vec<f64> = eig.iter().map(|e| *e.last().expect("non-empty")).collect();
    Ok(FrameReport::from_bounds(
        lattice,
        &lower,
        &upper,
        rel_tol,
        Verdict::RieszBasis,
    ))
}

fn gram_matrices(spectra: &[crate::weyl::PhaseFunction], lattice: Lattice) -> Vec<CMatrix> {
    let n = lattice.modulus();
    let k = spectra.len();
    let adjoint = lattice.adjoint();
    lattice
        .dual_grid()
        .representatives()
        .map(|z| {
            let mut g = CMatrix::zeros(k, k);
            for p in adjoint.points() {
                let w = z.add(p, n);
                let v: Vec<Complex64> = spectra.iter().map(|f| f.at(w)).collect();
                for (i, vi) in v.iter().enumerate() {
                    for (j, vj) in v.iter().enumerate() {
                        let cur = g.get(i, j);
                        g.set(i, j, cur + vi * vj.conj());
                    }
                }
            }
            g
        })
        .collect()
}

/// Positivity of `P_{Lambda°}(|F_W(S)|^2)` over the dual grid.
pub fn periodization_condition(s: &HsOperator, lattice: Lattice) -> Result<FrameReport> {
    let p = periodize_sq(&fourier_wigner(s), lattice)?;
    Ok(FrameReport::from_bounds(
        lattice,
        &p,
        &p,
        DEFAULT_TOL_POS,
        Verdict::RieszBasis,
    ))
}

fn singular(report: &FrameReport) -> Error {
    Error::SingularTransfer {
        alpha: report.alpha,
        witness: report.argmin.index,
    }
}

/// Moore-Penrose pseudo-inverse `(Â^*Â)^{-1} Â^*` at every xi.
pub fn pseudo_inverse(t: &TransferMatrix) -> Result<TransferMatrix> {
    let report = frame_bounds(t);
    if !report.passed() {
        return Err(singular(&report));
    }
    let blocks = t
        .blocks
        .par_iter()
        .map(|a| {
            let ah = a.adjoint();
            ah.mul(a).inverse().map(|g| g.mul(&ah))
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| singular(&report))?;
    Ok(TransferMatrix {
        lattice: t.lattice,
        rows: t.cols,
        cols: t.rows,
        blocks,
    })
}

/// Left inverses `B̂ = Â^† + C (I - Â Â^†)`; every choice of `C` gives
/// `B̂ Â = I`.
pub fn left_inverse_family(t: &TransferMatrix, c: &TransferMatrix) -> Result<TransferMatrix> {
    if c.lattice != t.lattice {
        return Err(Error::LatticeMismatch);
    }
    if c.rows != t.cols || c.cols != t.rows {
        return Err(Error::ShapeMismatch {
            expected_rows: t.cols,
            expected_cols: t.rows,
            rows: c.rows,
            cols: c.cols,
        });
    }
    let pinv = pseudo_inverse(t)?;
    let eye = CMatrix::identity(t.rows);
    let blocks = (0..t.lattice.len())
        .map(|xi| {
            let p = pinv.at(xi);
            let projector = eye.sub(&t.at(xi).mul(p));
            p.add(&c.at(xi).mul(&projector))
        })
        .collect();
    Ok(TransferMatrix {
        lattice: t.lattice,
        rows: t.cols,
        cols: t.rows,
        blocks,
    })
}

/// Sequences `B` whose transfer matrix is `B̂`; column `m` is `b_m`.
pub fn dual_sequences(b: &TransferMatrix) -> ConvolutionMatrix {
    let lattice = b.lattice;
    let entries = (0..b.rows * b.cols)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / b.cols, idx % b.cols);
            let values: Vec<Complex64> = b.blocks.iter().map(|m| m.get(i, j)).collect();
            inverse_symplectic_series(
                &DualFunction::new(lattice, values).expect("one value per xi"),
            )
        })
        .collect();
    ConvolutionMatrix {
        lattice,
        rows: b.rows,
        cols: b.cols,
        entries,
    }
}
