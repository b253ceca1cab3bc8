//! Average sampling and reconstruction in lattice-invariant operator spaces.
//!
//! Elements of `V = span{alpha_lambda(S_n)}` are synthesized from coefficient
//! sequences, sampled against translated averaging operators `Q_m`, and
//! recovered through reconstruction operators `H_m`. Every pipeline runs on
//! Weyl symbols; operator-side versions are kept as cross-checks.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::{
    frame_bounds, gram_matrix_bounds, left_inverse_family, single_gen_condition, transfer_matrix,
    ConvolutionMatrix, FrameReport, TransferMatrix,
};
use crate::lattice::{
    inverse_symplectic_series, symplectic_series, DualFunction, Lattice, LatticeSeq,
};
use crate::linalg::CMatrix;
use crate::phase_space::{
    check_operator, check_size, hs_inner, translate_operator, HsOperator, PhasePoint,
};
use crate::weyl::{fourier_wigner, symplectic_ft, weyl_symbol, weyl_transform, PhaseFunction};

/// Largest admissible deviation in [`interpolation_check`].
pub const INTERPOLATION_TOL: f64 = 1e-9;

/// Generators `S_1, ..., S_N` with cached symbols and Riesz report.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    lattice: Lattice,
    ops: Vec<HsOperator>,
    symbols: Vec<PhaseFunction>,
    riesz: FrameReport,
}

impl GeneratorSet {
    pub fn new(ops: Vec<HsOperator>, lattice: Lattice) -> Result<Self> {
        let symbols = symbols_of(&ops, lattice)?;
        let riesz = gram_matrix_bounds(&ops, lattice)?;
        Ok(GeneratorSet {
            lattice,
            ops,
            symbols,
            riesz,
        })
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn operators(&self) -> &[HsOperator] {
        &self.ops
    }

    pub fn symbols(&self) -> &[PhaseFunction] {
        &self.symbols
    }

    /// Gram-matrix Riesz report for `{alpha_lambda(S_n)}`.
    pub fn riesz(&self) -> &FrameReport {
        &self.riesz
    }
}

/// Averaging operators `Q_1, ..., Q_M` with cached symbols.
#[derive(Debug, Clone)]
pub struct AveragerSet {
    lattice: Lattice,
    ops: Vec<HsOperator>,
    symbols: Vec<PhaseFunction>,
}

impl AveragerSet {
    pub fn new(ops: Vec<HsOperator>, lattice: Lattice) -> Result<Self> {
        let symbols = symbols_of(&ops, lattice)?;
        Ok(AveragerSet {
            lattice,
            ops,
            symbols,
        })
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn operators(&self) -> &[HsOperator] {
        &self.ops
    }

    pub fn symbols(&self) -> &[PhaseFunction] {
        &self.symbols
    }
}

fn symbols_of(ops: &[HsOperator], lattice: Lattice) -> Result<Vec<PhaseFunction>> {
    if ops.is_empty() {
        return Err(Error::Invalid("operator list is empty".into()));
    }
    for op in ops {
        check_size(lattice.modulus(), op.modulus())?;
    }
    Ok(ops.par_iter().map(weyl_symbol).collect())
}

/// Samples `s_{T,1}, ..., s_{T,M}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    seqs: Vec<LatticeSeq>,
}

impl SampleSet {
    pub fn new(seqs: Vec<LatticeSeq>) -> Result<Self> {
        let first = seqs
            .first()
            .ok_or_else(|| Error::Invalid("sample set is empty".into()))?;
        if seqs.iter().any(|s| s.lattice() != first.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        Ok(SampleSet { seqs })
    }

    pub fn len(&self) -> usize {
        self.seqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seqs.is_empty()
    }

    pub fn sequences(&self) -> &[LatticeSeq] {
        &self.seqs
    }

    pub fn lattice(&self) -> Lattice {
        self.seqs[0].lattice()
    }
}

/// Reconstruction operators `H_1, ..., H_M` and the dual transfer matrix
/// `B̂` they were built from.
#[derive(Debug, Clone)]
pub struct Reconstructor {
    lattice: Lattice,
    ops: Vec<HsOperator>,
    symbols: Vec<PhaseFunction>,
    dual: TransferMatrix,
}

impl Reconstructor {
    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn operators(&self) -> &[HsOperator] {
        &self.ops
    }

    pub fn symbols(&self) -> &[PhaseFunction] {
        &self.symbols
    }

    /// `B̂`, of shape `N x M`.
    pub fn dual(&self) -> &TransferMatrix {
        &self.dual
    }
}

/// `lambda -> <f, T_lambda g>`.
fn symbol_correlation(f: &PhaseFunction, g: &PhaseFunction, lattice: Lattice) -> LatticeSeq {
    let n = lattice.modulus();
    let l = n.get();
    let values = lattice
        .points()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|lam| {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..l {
                let sx = n.sub(x, lam.x);
                for w in 0..l {
                    acc += f.get(x, w) * g.get(sx, n.sub(w, lam.omega)).conj();
                }
            }
            acc
        })
        .collect();
    LatticeSeq::new(lattice, values).expect("one value per lattice point")
}

/// `sum_k sum_lambda c_k(lambda) T_lambda f_k`.
fn symbol_series(
    coeffs: &[LatticeSeq],
    symbols: &[PhaseFunction],
    lattice: Lattice,
) -> Result<PhaseFunction> {
    if coeffs.len() != symbols.len() {
        return Err(Error::SizeMismatch {
            expected: symbols.len(),
            found: coeffs.len(),
        });
    }
    let mut out = PhaseFunction::zeros(lattice.modulus());
    for (c, f) in coeffs.iter().zip(symbols) {
        if c.lattice() != lattice {
            return Err(Error::LatticeMismatch);
        }
        for (i, v) in c.values().iter().enumerate() {
            if *v != Complex64::new(0.0, 0.0) {
                out.add_scaled_translate(*v, lattice.point(i), f)?;
            }
        }
    }
    Ok(out)
}

/// `sum_k sum_lambda c_k(lambda) alpha_lambda(S_k)`, summed in the order given.
fn operator_series(
    terms: impl Iterator<Item = (usize, usize)>,
    coeffs: &[LatticeSeq],
    ops: &[HsOperator],
    lattice: Lattice,
) -> Result<HsOperator> {
    if coeffs.len() != ops.len() {
        return Err(Error::SizeMismatch {
            expected: ops.len(),
            found: coeffs.len(),
        });
    }
    if coeffs.iter().any(|c| c.lattice() != lattice) {
        return Err(Error::LatticeMismatch);
    }
    let mut out = HsOperator::zeros(lattice.modulus());
    for (k, i) in terms {
        out.add_scaled(
            coeffs[k].get(i),
            &translate_operator(lattice.point(i), &ops[k]),
        )?;
    }
    Ok(out)
}

fn all_terms(count: usize, lattice: Lattice) -> impl Iterator<Item = (usize, usize)> {
    let len = lattice.len();
    (0..count).flat_map(move |k| (0..len).map(move |i| (k, i)))
}

/// `T = sum_n sum_lambda c_n(lambda) alpha_lambda(S_n)`, via symbols.
pub fn synthesize_element(c: &[LatticeSeq], g: &GeneratorSet) -> Result<HsOperator> {
    Ok(weyl_transform(&symbol_series(c, &g.symbols, g.lattice)?))
}

/// Operator-side version of [`synthesize_element`].
pub fn synthesize_element_direct(c: &[LatticeSeq], g: &GeneratorSet) -> Result<HsOperator> {
    operator_series(all_terms(g.len(), g.lattice), c, &g.ops, g.lattice)
}

/// `s_{T,m}(lambda) = <T, alpha_lambda(Q_m)>_HS`, via `<a_T, T_lambda a_{Q_m}>`.
pub fn average_samples(t: &HsOperator, q: &AveragerSet) -> Result<SampleSet> {
    check_size(q.lattice.modulus(), t.modulus())?;
    let a_t = weyl_symbol(t);
    SampleSet::new(
        q.symbols
            .iter()
            .map(|a_q| symbol_correlation(&a_t, a_q, q.lattice))
            .collect(),
    )
}

/// Operator-side version of [`average_samples`].
pub fn average_samples_direct(t: &HsOperator, q: &AveragerSet) -> Result<SampleSet> {
    check_size(q.lattice.modulus(), t.modulus())?;
    let lattice = q.lattice;
    let seqs = q
        .ops
        .iter()
        .map(|qm| {
            let values = lattice
                .points()
                .map(|lam| hs_inner(t, &translate_operator(lam, qm)))
                .collect::<Result<Vec<_>>>()?;
            LatticeSeq::new(lattice, values)
        })
        .collect::<Result<Vec<_>>>()?;
    SampleSet::new(seqs)
}

/// `a_{m,n}(lambda) = <a_{S_n}, T_lambda a_{Q_m}>`.
pub fn sample_filter_matrix(g: &GeneratorSet, q: &AveragerSet) -> Result<ConvolutionMatrix> {
    if g.lattice != q.lattice {
        return Err(Error::LatticeMismatch);
    }
    let (m_count, n_count) = (q.len(), g.len());
    let entries = (0..m_count * n_count)
        .map(|idx| {
            symbol_correlation(
                &g.symbols[idx % n_count],
                &q.symbols[idx / n_count],
                g.lattice,
            )
        })
        .collect();
    ConvolutionMatrix::new(m_count, n_count, entries)
}

fn refuse(report: &FrameReport) -> Error {
    Error::SingularTransfer {
        alpha: report.alpha,
        witness: report.argmin.index,
    }
}

/// Single-generator reconstructor: `F(p) = 1/F(q)`, `H = L_{sum p(lambda) T_lambda a_S}`.
pub fn build_reconstructor_single(g: &GeneratorSet, q: &LatticeSeq) -> Result<Reconstructor> {
    if g.len() != 1 {
        return Err(Error::SizeMismatch {
            expected: 1,
            found: g.len(),
        });
    }
    if q.lattice() != g.lattice {
        return Err(Error::LatticeMismatch);
    }
    let report = single_gen_condition(q);
    if !report.passed() {
        return Err(refuse(&report));
    }
    let inv = symplectic_series(q).map(|v| Complex64::new(1.0, 0.0) / v);
    let p = inverse_symplectic_series(&inv);
    let h = symbol_series(std::slice::from_ref(&p), &g.symbols, g.lattice)?;
    let dual = TransferMatrix::from_fn(g.lattice, 1, 1, |xi| {
        CMatrix::from_rows(1, 1, vec![inv.get(xi)])
    })?;
    Ok(Reconstructor {
        lattice: g.lattice,
        ops: vec![weyl_transform(&h)],
        symbols: vec![h],
        dual,
    })
}

/// Multi-generator reconstructor from `B̂ = Â^† + C (I - Â Â^†)`; `C = None`
/// selects the Moore-Penrose dual.
pub fn build_reconstructor_multi(
    g: &GeneratorSet,
    a: &ConvolutionMatrix,
    c: Option<&TransferMatrix>,
) -> Result<Reconstructor> {
    if a.lattice() != g.lattice {
        return Err(Error::LatticeMismatch);
    }
    if a.cols() != g.len() {
        return Err(Error::ShapeMismatch {
            expected_rows: a.rows(),
            expected_cols: g.len(),
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let that = transfer_matrix(a);
    let report = frame_bounds(&that);
    if !report.passed() {
        return Err(refuse(&report));
    }
    let zero;
    let c = match c {
        Some(c) => c,
        None => {
            zero = TransferMatrix::constant(g.lattice, CMatrix::zeros(a.cols(), a.rows()));
            &zero
        }
    };
    let bhat = left_inverse_family(&that, c)?;
    let b = crate::frame::dual_sequences(&bhat);
    let symbols = (0..a.rows())
        .into_par_iter()
        .map(|m| {
            let column: Vec<LatticeSeq> = (0..g.len()).map(|n| b.get(n, m).clone()).collect();
            symbol_series(&column, &g.symbols, g.lattice)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Reconstructor {
        lattice: g.lattice,
        ops: symbols.par_iter().map(weyl_transform).collect(),
        symbols,
        dual: bhat,
    })
}

/// `T = sum_m sum_lambda s_{T,m}(lambda) alpha_lambda(H_m)`, via symbols.
pub fn reconstruct(s: &SampleSet, r: &Reconstructor) -> Result<HsOperator> {
    if s.lattice() != r.lattice {
        return Err(Error::LatticeMismatch);
    }
    Ok(weyl_transform(&symbol_series(
        &s.seqs, &r.symbols, r.lattice,
    )?))
}

/// Operator-side version of [`reconstruct`].
pub fn reconstruct_direct(s: &SampleSet, r: &Reconstructor) -> Result<HsOperator> {
    reconstruct_in_order(s, r, all_terms(r.len(), r.lattice))
}

/// Operator-side reconstruction summing the `(m, lambda index)` terms in the
/// given order; every term must appear once.
pub fn reconstruct_in_order(
    s: &SampleSet,
    r: &Reconstructor,
    order: impl Iterator<Item = (usize, usize)>,
) -> Result<HsOperator> {
    if s.lattice() != r.lattice {
        return Err(Error::LatticeMismatch);
    }
    operator_series(order, &s.seqs, &r.ops, r.lattice)
}

/// `(S * T)(z) = tr(S alpha_z(Ť))`, `Ť = P T P`.
pub fn operator_convolve(s: &HsOperator, t: &HsOperator) -> Result<PhaseFunction> {
    check_size(s.modulus(), t.modulus())?;
    let n = s.modulus();
    let l = n.get();
    let tc = check_operator(t);
    let values = (0..l * l)
        .into_par_iter()
        .map(|idx| {
            let shifted = translate_operator(
                PhasePoint {
                    x: idx / l,
                    omega: idx % l,
                },
                &tc,
            );
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..l {
                for j in 0..l {
                    acc += s.get(i, j) * shifted.get(j, i);
                }
            }
            acc
        })
        .collect();
    PhaseFunction::new(n, values)
}

/// Restriction of [`operator_convolve`] to the lattice.
pub fn operator_convolve_lattice(
    s: &HsOperator,
    t: &HsOperator,
    lattice: Lattice,
) -> Result<LatticeSeq> {
    check_size(lattice.modulus(), s.modulus())?;
    let full = operator_convolve(s, t)?;
    LatticeSeq::new(lattice, lattice.points().map(|z| full.at(z)).collect())
}

/// `c * S = sum_lambda c(lambda) alpha_lambda(S)`.
pub fn seq_operator_convolve(c: &LatticeSeq, s: &HsOperator) -> Result<HsOperator> {
    let lattice = c.lattice();
    check_size(lattice.modulus(), s.modulus())?;
    operator_series(
        all_terms(1, lattice),
        std::slice::from_ref(c),
        std::slice::from_ref(s),
        lattice,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interpolation {
    pub passed: bool,
    /// `max |s_{H_n, n'}(lambda) - delta_{n n'} delta_{lambda 0}|`.
    pub deviation: f64,
}

/// Checks that the samples of `H_n` against `Q_{n'}` form `delta_{n n'} delta_{lambda 0}`.
pub fn interpolation_check(r: &Reconstructor, q: &AveragerSet) -> Result<Interpolation> {
    if r.len() != q.len() || r.dual.rows() != r.dual.cols() {
        return Err(Error::Invalid(format!(
            "interpolation needs as many averagers as generators, got {} reconstructors for {} generators and {} averagers",
            r.len(),
            r.dual.rows(),
            q.len()
        )));
    }
    let mut deviation: f64 = 0.0;
    for (n, h) in r.ops.iter().enumerate() {
        let s = average_samples(h, q)?;
        for (np, seq) in s.seqs.iter().enumerate() {
            for (i, v) in seq.values().iter().enumerate() {
                let want = if n == np && i == 0 { 1.0 } else { 0.0 };
                deviation = deviation.max((v - want).norm());
            }
        }
    }
    Ok(Interpolation {
        passed: deviation <= INTERPOLATION_TOL,
        deviation,
    })
}

/// `q(lambda) = <a_S, T_lambda a_S>`.
pub fn autocorrelation(s: &HsOperator, lattice: Lattice) -> Result<LatticeSeq> {
    check_size(lattice.modulus(), s.modulus())?;
    let a = weyl_symbol(s);
    Ok(symbol_correlation(&a, &a, lattice))
}

/// Generator whose lattice translates are orthonormal and span the same space.
pub fn whiten_generator(s: &HsOperator, lattice: Lattice) -> Result<HsOperator> {
    let q = autocorrelation(s, lattice)?;
    let report = single_gen_condition(&q);
    if !report.passed() {
        return Err(refuse(&report));
    }
    // F(q) is real and positive; tiny imaginary parts are rounding.
    let w = symplectic_series(&q).map(|v| Complex64::new(1.0 / v.re.sqrt(), 0.0));
    let h = symbol_series(&[inverse_symplectic_series(&w)], &[weyl_symbol(s)], lattice)?;
    Ok(weyl_transform(&h))
}

/// `S` with its Fourier-Wigner transform cleared on the coset `z_xi + Lambda°`,
/// so the Riesz condition fails exactly at `xi`.
pub fn notch_generator(s: &HsOperator, lattice: Lattice, xi: usize) -> Result<HsOperator> {
    check_size(lattice.modulus(), s.modulus())?;
    let grid = lattice.dual_grid();
    if xi >= grid.len() {
        return Err(Error::Invalid(format!(
            "xi index {xi} out of range 0..{}",
            grid.len()
        )));
    }
    let fw = fourier_wigner(s);
    let n = lattice.modulus();
    let notched = PhaseFunction::from_fn(n, |x, w| {
        if grid.coset_index(PhasePoint { x, omega: w }) == xi {
            Complex64::new(0.0, 0.0)
        } else {
            fw.get(x, w)
        }
    });
    Ok(weyl_transform(&symplectic_ft(&notched)))
}

/// `DualFunction` of `F_sigma^Lambda(q)` for the autocorrelation of `S`.
pub fn autocorrelation_spectrum(s: &HsOperator, lattice: Lattice) -> Result<DualFunction> {
    Ok(symplectic_series(&autocorrelation(s, lattice)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{rank_one, trace, ModSize, Signal};
    use crate::random::{random_operator, random_seq, rng};

    fn lat(l: usize, a: usize, b: usize) -> Lattice {
        Lattice::new(ModSize::new(l).unwrap(), a, b).unwrap()
    }

    fn ops(count: usize, lattice: Lattice, seed: u64) -> Vec<HsOperator> {
        let mut r = rng(seed);
        (0..count)
            .map(|_| random_operator(lattice.modulus(), &mut r))
            .collect()
    }

    fn rel(a: &HsOperator, b: &HsOperator) -> f64 {
        a.distance(b) / b.hs_norm()
    }

    #[test]
    fn synthesize_delta_and_routes() {
        let lattice = lat(15, 3, 5);
        let g = GeneratorSet::new(ops(2, lattice, 1), lattice).unwrap();
        let c = vec![LatticeSeq::delta(lattice, 0), LatticeSeq::zeros(lattice)];
        assert!(
            synthesize_element(&c, &g)
                .unwrap()
                .distance(&g.operators()[0])
                < 1e-12
        );

        let mut r = rng(2);
        let c = vec![random_seq(lattice, &mut r), random_seq(lattice, &mut r)];
        let t = synthesize_element(&c, &g).unwrap();
        let direct = synthesize_element_direct(&c, &g).unwrap();
        assert!(t.distance(&direct) <= 1e-10 * direct.hs_norm());

        let c2 = vec![random_seq(lattice, &mut r), random_seq(lattice, &mut r)];
        let sum: Vec<LatticeSeq> = c.iter().zip(&c2).map(|(a, b)| a.add(b).unwrap()).collect();
        let mut lin = synthesize_element(&c, &g).unwrap();
        lin.add_scaled(
            Complex64::new(1.0, 0.0),
            &synthesize_element(&c2, &g).unwrap(),
        )
        .unwrap();
        assert!(synthesize_element(&sum, &g).unwrap().distance(&lin) < 1e-10 * lin.hs_norm());

        assert!(synthesize_element(&c[..1], &g).is_err());
    }

    #[test]
    fn samples_routes_agree() {
        let lattice = lat(15, 3, 5);
        let q = AveragerSet::new(ops(2, lattice, 3), lattice).unwrap();
        let t = ops(1, lattice, 4).pop().unwrap();
        let s = average_samples(&t, &q).unwrap();
        let d = average_samples_direct(&t, &q).unwrap();
        for (a, b) in s.sequences().iter().zip(d.sequences()) {
            assert!(a.distance(b) <= 1e-10 * b.norm());
        }

        let q1 = &q.operators()[0];
        let unit = q1.scaled(Complex64::new(1.0 / q1.hs_norm(), 0.0));
        let s = average_samples(&unit, &q).unwrap();
        assert!((s.sequences()[0].get(0).re - q1.hs_norm()).abs() < 1e-10 * q1.hs_norm());
    }

    #[test]
    fn sampling_is_convolution() {
        let lattice = lat(15, 3, 5);
        let g = GeneratorSet::new(ops(2, lattice, 5), lattice).unwrap();
        let q = AveragerSet::new(ops(3, lattice, 6), lattice).unwrap();
        let a = sample_filter_matrix(&g, &q).unwrap();
        let mut r = rng(7);
        let c = vec![random_seq(lattice, &mut r), random_seq(lattice, &mut r)];
        let s = average_samples(&synthesize_element(&c, &g).unwrap(), &q).unwrap();
        let conv = a.apply(&c).unwrap();
        for (x, y) in s.sequences().iter().zip(&conv) {
            assert!(x.distance(y) <= 1e-9 * y.norm());
        }
    }

    #[test]
    fn filter_matrix_diagonal_is_hs_norm() {
        let lattice = lat(15, 3, 5);
        let s = ops(1, lattice, 8);
        let g = GeneratorSet::new(s.clone(), lattice).unwrap();
        let q = AveragerSet::new(s.clone(), lattice).unwrap();
        let a = sample_filter_matrix(&g, &q).unwrap();
        let v = a.get(0, 0).get(0);
        assert!((v.re - s[0].hs_norm().powi(2)).abs() < 1e-10 * v.re && v.im.abs() < 1e-9);
    }

    #[test]
    fn single_reconstruction_roundtrip() {
        let lattice = lat(15, 3, 5);
        let s = ops(1, lattice, 9);
        let g = GeneratorSet::new(s.clone(), lattice).unwrap();
        let q = AveragerSet::new(s, lattice).unwrap();
        let a = sample_filter_matrix(&g, &q).unwrap();
        let r = build_reconstructor_single(&g, a.get(0, 0)).unwrap();
        let mut rg = rng(10);
        let t = synthesize_element(&[random_seq(lattice, &mut rg)], &g).unwrap();
        let back = reconstruct(&average_samples(&t, &q).unwrap(), &r).unwrap();
        assert!(rel(&back, &t) <= 1e-9);
        let back_direct = reconstruct_direct(&average_samples(&t, &q).unwrap(), &r).unwrap();
        assert!(rel(&back_direct, &t) <= 1e-9);

        // the multi path with N = M = 1 gives the same operator
        let rm = build_reconstructor_multi(&g, &a, None).unwrap();
        assert!(rm.operators()[0].distance(&r.operators()[0]) <= 1e-9 * r.operators()[0].hs_norm());
    }

    #[test]
    fn delta_filter_gives_generator() {
        let lattice = lat(15, 3, 5);
        let g = GeneratorSet::new(ops(1, lattice, 11), lattice).unwrap();
        let r = build_reconstructor_single(&g, &LatticeSeq::delta(lattice, 0)).unwrap();
        assert!(r.operators()[0].distance(&g.operators()[0]) < 1e-10 * g.operators()[0].hs_norm());
    }

    #[test]
    fn refuses_singular_filter() {
        let lattice = lat(15, 3, 5);
        let g = GeneratorSet::new(ops(1, lattice, 12), lattice).unwrap();
        let q = LatticeSeq::zeros(lattice);
        assert!(matches!(
            build_reconstructor_single(&g, &q),
            Err(Error::SingularTransfer { .. })
        ));
    }

    #[test]
    fn multi_reconstruction_roundtrip_and_idempotence() {
        let lattice = lat(15, 3, 5);
        let g = GeneratorSet::new(ops(2, lattice, 13), lattice).unwrap();
        let q = AveragerSet::new(ops(3, lattice, 14), lattice).unwrap();
        let a = sample_filter_matrix(&g, &q).unwrap();
        let mut r = rng(15);
        let c = TransferMatrix::from_fn(lattice, 2, 3, |_| {
            CMatrix::from_fn(2, 3, |_, _| crate::random::complex_normal(&mut r))
        })
        .unwrap();
        let mut rg = rng(16);
        let t = synthesize_element(
            &[random_seq(lattice, &mut rg), random_seq(lattice, &mut rg)],
            &g,
        )
        .unwrap();
        for cm in [None, Some(&c)] {
            let rec = build_reconstructor_multi(&g, &a, cm).unwrap();
            let back = reconstruct(&average_samples(&t, &q).unwrap(), &rec).unwrap();
            assert!(rel(&back, &t) <= 1e-9);

            let x = random_operator(lattice.modulus(), &mut rg);
            let once = reconstruct(&average_samples(&x, &q).unwrap(), &rec).unwrap();
            let twice = reconstruct(&average_samples(&once, &q).unwrap(), &rec).unwrap();
            assert!(twice.distance(&once) <= 1e-9 * once.hs_norm().max(1.0));
        }
    }

    #[test]
    fn square_systems_ignore_c_and_interpolate() {
        let lattice = lat(15, 3, 5);
        let g = GeneratorSet::new(ops(2, lattice, 17), lattice).unwrap();
        let q = AveragerSet::new(ops(2, lattice, 18), lattice).unwrap();
        let a = sample_filter_matrix(&g, &q).unwrap();
        let c = TransferMatrix::constant(
            lattice,
            CMatrix::from_fn(2, 2, |i, j| Complex64::new(1.0 + i as f64, j as f64)),
        );
        let r0 = build_reconstructor_multi(&g, &a, None).unwrap();
        let r1 = build_reconstructor_multi(&g, &a, Some(&c)).unwrap();
        for (h0, h1) in r0.operators().iter().zip(r1.operators()) {
            assert!(h0.distance(h1) <= 1e-9 * h0.hs_norm());
        }
        let ip = interpolation_check(&r0, &q).unwrap();
        assert!(ip.passed, "deviation {}", ip.deviation);
    }

    #[test]
    fn interpolation_rejects_oversampling() {
        let lattice = lat(15, 3, 5);
        let g = GeneratorSet::new(ops(1, lattice, 19), lattice).unwrap();
        let q = AveragerSet::new(ops(2, lattice, 20), lattice).unwrap();
        let r =
            build_reconstructor_multi(&g, &sample_filter_matrix(&g, &q).unwrap(), None).unwrap();
        assert!(interpolation_check(&r, &q).is_err());
    }

    #[test]
    fn whitened_generator_is_orthonormal() {
        let lattice = lat(15, 3, 5);
        let s = whiten_generator(&ops(1, lattice, 21)[0], lattice).unwrap();
        let q = autocorrelation(&s, lattice).unwrap();
        assert!(q.distance(&LatticeSeq::delta(lattice, 0)) < 1e-10);

        let g = GeneratorSet::new(vec![s.clone()], lattice).unwrap();
        let avg = AveragerSet::new(vec![s], lattice).unwrap();
        let a = sample_filter_matrix(&g, &avg).unwrap();
        let mut r = rng(22);
        let c = random_seq(lattice, &mut r);
        assert!(a.apply(std::slice::from_ref(&c)).unwrap()[0].distance(&c) < 1e-9 * c.norm());
        let rec = build_reconstructor_single(&g, a.get(0, 0)).unwrap();
        assert!(interpolation_check(&rec, &avg).unwrap().passed);
    }

    #[test]
    fn notched_generator_fails_at_xi() {
        let lattice = lat(15, 3, 5);
        let s = notch_generator(&ops(1, lattice, 23)[0], lattice, 4).unwrap();
        let rep = single_gen_condition(&autocorrelation(&s, lattice).unwrap());
        assert!(!rep.passed());
        assert_eq!(rep.argmin.index, 4);
        assert!(whiten_generator(&s, lattice).is_err());
    }

    #[test]
    fn operator_convolution_identities() {
        let lattice = lat(15, 3, 5);
        let v = ops(2, lattice, 24);
        let (s, t) = (&v[0], &v[1]);
        let conv = operator_convolve(s, t).unwrap();
        let at0 = trace(&s.matmul(&check_operator(t)).unwrap());
        assert!((conv.get(0, 0) - at0).norm() < 1e-10 * at0.norm().max(1.0));

        // <T, alpha_lambda(Q)> = (T * Q~)(lambda), Q~ = check(Q^*)
        let qt = check_operator(&t.adjoint());
        let samples =
            average_samples_direct(s, &AveragerSet::new(vec![t.clone()], lattice).unwrap())
                .unwrap();
        let via_conv = operator_convolve_lattice(s, &qt, lattice).unwrap();
        assert!(samples.sequences()[0].distance(&via_conv) < 1e-10 * via_conv.norm());

        // F(S * check(S^*)) on the lattice = |Lambda|^2 P(|F_W S|^2)
        let seq = operator_convolve_lattice(s, &check_operator(&s.adjoint()), lattice).unwrap();
        let spec = symplectic_series(&seq);
        let per = crate::lattice::periodize_sq(&fourier_wigner(s), lattice).unwrap();
        let scale = (lattice.len() * lattice.len()) as f64;
        for (xi, p) in per.iter().enumerate() {
            assert!(
                (spec.get(xi) - Complex64::new(scale * p, 0.0)).norm() < 1e-9 * scale * p.max(1.0)
            );
        }
    }

    #[test]
    fn seq_convolution_and_reproducing_formula() {
        let lattice = lat(15, 3, 5);
        let s = ops(1, lattice, 25).pop().unwrap();
        assert!(
            seq_operator_convolve(&LatticeSeq::delta(lattice, 0), &s)
                .unwrap()
                .distance(&s)
                < 1e-14
        );

        let g = GeneratorSet::new(vec![s.clone()], lattice).unwrap();
        let mut r = rng(26);
        let c = random_seq(lattice, &mut r);
        let t = seq_operator_convolve(&c, &s).unwrap();
        assert!(
            t.distance(&synthesize_element(std::slice::from_ref(&c), &g).unwrap())
                < 1e-10 * t.hs_norm()
        );

        // T = (T * Q~) * H
        let q = ops(1, lattice, 27).pop().unwrap();
        let avg = AveragerSet::new(vec![q.clone()], lattice).unwrap();
        let a = sample_filter_matrix(&g, &avg).unwrap();
        let h = build_reconstructor_single(&g, a.get(0, 0))
            .unwrap()
            .operators()[0]
            .clone();
        let samples =
            operator_convolve_lattice(&t, &check_operator(&q.adjoint()), lattice).unwrap();
        let back = seq_operator_convolve(&samples, &h).unwrap();
        assert!(rel(&back, &t) <= 1e-9);
    }

    #[test]
    fn delta_pair_generators_are_inadmissible() {
        let lattice = lat(15, 3, 5);
        let n = lattice.modulus();
        let s = rank_one(&Signal::delta(n, 1), &Signal::delta(n, 4)).unwrap();
        assert!(!GeneratorSet::new(vec![s], lattice)
            .unwrap()
            .riesz()
            .passed());
    }
}
