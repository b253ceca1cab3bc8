//! The `analyze`, `roundtrip` and `export` pipelines.

use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use super::builders::{
    build_averagers, build_generators, lattice_of, COEFFICIENT_STREAM, C_MATRIX_STREAM,
};
use super::config::{CMatrixSpec, ConfigError, Diagnostic, ExperimentConfig, ExportKind};
use super::export::{operator_csv, periodization_csv, phase_function_csv, transfer_csv};
use super::report::{Failure, Reconstruction, RunReport, Status, Timing};
use crate::error::Error;
use crate::frame::{
    frame_bounds_with_tol, gram_matrix_bounds_with_tol, transfer_matrix, ConvolutionMatrix,
    FrameReport, TransferMatrix, Witness,
};
use crate::lattice::{periodize_sq, Lattice, LatticeSeq};
use crate::linalg::CMatrix;
use crate::random::{complex_normal, random_seq, rng_stream, RNG_NAME};
use crate::sampling::{
    average_samples, build_reconstructor_multi, build_reconstructor_single, interpolation_check,
    reconstruct, sample_filter_matrix, synthesize_element, AveragerSet, GeneratorSet,
    Reconstructor,
};
use crate::weyl::fourier_wigner;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

pub const REPORT_FILE: &str = "report.json";
pub const RECONSTRUCTED_FILE: &str = "reconstructed.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Roundtrip,
    Export,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Roundtrip => "roundtrip",
            Command::Export => "export",
        }
    }
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Output directory.
    pub out: Option<PathBuf>,
    /// Overrides `options.tolerance`.
    pub tolerance: Option<f64>,
    /// Overrides `options.export`.
    pub what: Option<ExportKind>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Numeric(#[from] Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Exit code for a finished run: pass, condition failure or error.
pub fn exit_code(result: &Result<RunReport, RunError>) -> i32 {
    match result {
        Ok(r) if r.passed() => EXIT_PASS,
        Ok(_) => EXIT_FAIL,
        Err(_) => EXIT_ERROR,
    }
}

struct Setup {
    lattice: Lattice,
    generators: GeneratorSet,
    averagers: AveragerSet,
    filter: ConvolutionMatrix,
    transfer: TransferMatrix,
    riesz: FrameReport,
    frame: FrameReport,
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup, RunError> {
    let lattice = lattice_of(cfg)?;
    let gens = build_generators(cfg, lattice)?;
    let avgs = build_averagers(cfg, lattice, &gens)?;
    let riesz = gram_matrix_bounds_with_tol(&gens, lattice, cfg.options.tol_pos)?;
    let generators = GeneratorSet::new(gens, lattice)?;
    let averagers = AveragerSet::new(avgs, lattice)?;
    let filter = sample_filter_matrix(&generators, &averagers)?;
    let transfer = transfer_matrix(&filter);
    let frame = frame_bounds_with_tol(&transfer, cfg.options.tol_pos);
    Ok(Setup {
        lattice,
        generators,
        averagers,
        filter,
        transfer,
        riesz,
        frame,
    })
}

fn condition_failure(s: &Setup) -> Option<Failure> {
    if !s.riesz.passed() {
        Some(Failure {
            reason: "lattice translates of the generators are not a Riesz basis".into(),
            witness: Some(s.riesz.argmin),
        })
    } else if !s.frame.passed() {
        Some(Failure {
            reason: "sampling system is not a frame".into(),
            witness: Some(s.frame.argmin),
        })
    } else {
        None
    }
}

fn random_c(cfg: &ExperimentConfig, s: &Setup) -> Result<Option<TransferMatrix>, RunError> {
    match cfg.options.c_matrix {
        CMatrixSpec::Zero => Ok(None),
        CMatrixSpec::Random => {
            let seed = cfg.seed.ok_or_else(|| {
                ConfigError::Invalid(vec![Diagnostic {
                    field: "seed".into(),
                    message: "required when options.c_matrix is \"random\"".into(),
                }])
            })?;
            let mut r = rng_stream(seed, C_MATRIX_STREAM);
            let (n, m) = (s.transfer.cols(), s.transfer.rows());
            Ok(Some(TransferMatrix::from_fn(s.lattice, n, m, |_| {
                CMatrix::from_fn(n, m, |_, _| complex_normal(&mut r))
            })?))
        }
    }
}

fn reconstructor(cfg: &ExperimentConfig, s: &Setup) -> Result<Reconstructor, RunError> {
    if s.generators.len() == 1 && s.averagers.len() == 1 {
        Ok(build_reconstructor_single(
            &s.generators,
            s.filter.get(0, 0),
        )?)
    } else {
        let c = random_c(cfg, s)?;
        Ok(build_reconstructor_multi(
            &s.generators,
            &s.filter,
            c.as_ref(),
        )?)
    }
}

/// Turns a refused reconstruction into a reported failure.
fn refused(lattice: Lattice, err: RunError) -> Result<Failure, RunError> {
    match err {
        RunError::Numeric(Error::SingularTransfer { alpha, witness }) => {
            let z = lattice.dual_grid().representative(witness);
            Ok(Failure {
                reason: format!(
                    "reconstruction refused: transfer matrix singular (lower bound {alpha:e})"
                ),
                witness: Some(Witness {
                    index: witness,
                    x: z.x,
                    omega: z.omega,
                }),
            })
        }
        other => Err(other),
    }
}

fn ensure_dir(dir: &Path) -> Result<(), RunError> {
    std::fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.display().to_string(),
        source,
    })
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<String, RunError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(name.to_string())
}

fn base_report(command: Command, cfg: &ExperimentConfig, s: &Setup) -> RunReport {
    RunReport {
        command: command.name().into(),
        status: Status::Pass,
        rng: RNG_NAME.into(),
        config: cfg.clone(),
        generators: s.riesz.clone(),
        sampling: Some(s.frame.clone()),
        reconstruction: None,
        interpolation_deviation: None,
        failure: None,
        files: Vec::new(),
        timing: Timing { elapsed_ms: 0.0 },
    }
}

/// Runs one command; the report is also written to `<out>/report.json`
/// when an output directory is given.
pub fn run(
    command: Command,
    cfg: &ExperimentConfig,
    opts: &RunOptions,
) -> Result<RunReport, RunError> {
    let start = Instant::now();
    cfg.validate()?;
    if let Some(dir) = &opts.out {
        ensure_dir(dir)?;
    }
    let s = setup(cfg)?;
    let mut report = match command {
        Command::Analyze => analyze(cfg, &s)?,
        Command::Roundtrip => roundtrip(cfg, &s, opts)?,
        Command::Export => export(cfg, &s, opts)?,
    };
    report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(dir) = &opts.out {
        report.files.push(REPORT_FILE.into());
        write(dir, REPORT_FILE, &report.to_json())?;
    }
    Ok(report)
}

fn analyze(cfg: &ExperimentConfig, s: &Setup) -> Result<RunReport, RunError> {
    let mut report = base_report(Command::Analyze, cfg, s);
    if let Some(f) = condition_failure(s) {
        report.status = Status::Fail;
        report.failure = Some(f);
        return Ok(report);
    }
    if s.generators.len() == s.averagers.len() {
        match reconstructor(cfg, s) {
            Ok(r) => {
                report.interpolation_deviation =
                    Some(interpolation_check(&r, &s.averagers)?.deviation)
            }
            Err(e) => {
                report.status = Status::Fail;
                report.failure = Some(refused(s.lattice, e)?);
            }
        }
    }
    Ok(report)
}

fn roundtrip(cfg: &ExperimentConfig, s: &Setup, opts: &RunOptions) -> Result<RunReport, RunError> {
    let mut report = base_report(Command::Roundtrip, cfg, s);
    if let Some(f) = condition_failure(s) {
        report.status = Status::Fail;
        report.failure = Some(f);
        return Ok(report);
    }
    let rec = match reconstructor(cfg, s) {
        Ok(r) => r,
        Err(e) => {
            report.status = Status::Fail;
            report.failure = Some(refused(s.lattice, e)?);
            return Ok(report);
        }
    };

    let mut r = rng_stream(cfg.seed.unwrap_or(0), COEFFICIENT_STREAM);
    let c: Vec<LatticeSeq> = (0..s.generators.len())
        .map(|_| random_seq(s.lattice, &mut r))
        .collect();
    let t = synthesize_element(&c, &s.generators)?;
    let back = reconstruct(&average_samples(&t, &s.averagers)?, &rec)?;
    let relative_error = back.distance(&t) / t.hs_norm();
    let tolerance = opts.tolerance.unwrap_or(cfg.options.tolerance);
    let passed = relative_error <= tolerance;
    report.reconstruction = Some(Reconstruction {
        relative_error,
        tolerance,
        passed,
    });
    if s.generators.len() == s.averagers.len() {
        report.interpolation_deviation = Some(interpolation_check(&rec, &s.averagers)?.deviation);
    }
    if passed {
        if let Some(dir) = &opts.out {
            report
                .files
                .push(write(dir, RECONSTRUCTED_FILE, &operator_csv(&back))?);
        }
    } else {
        report.status = Status::Fail;
        report.failure = Some(Failure {
            reason: format!(
                "relative reconstruction error {relative_error:e} exceeds tolerance {tolerance:e}"
            ),
            witness: None,
        });
    }
    Ok(report)
}

fn export(cfg: &ExperimentConfig, s: &Setup, opts: &RunOptions) -> Result<RunReport, RunError> {
    let dir = opts.out.as_deref().ok_or_else(|| {
        ConfigError::Invalid(vec![Diagnostic {
            field: "--out".into(),
            message: "export needs an output directory".into(),
        }])
    })?;
    let mut report = base_report(Command::Export, cfg, s);
    let what = opts.what.unwrap_or(cfg.options.export);
    let gens = s.generators.operators();
    match what {
        ExportKind::Symbols => {
            for (i, a) in s.generators.symbols().iter().enumerate() {
                report.files.push(write(
                    dir,
                    &format!("symbol_g{i}.csv"),
                    &phase_function_csv(a),
                )?);
            }
            for (i, a) in s.averagers.symbols().iter().enumerate() {
                report.files.push(write(
                    dir,
                    &format!("symbol_q{i}.csv"),
                    &phase_function_csv(a),
                )?);
            }
        }
        ExportKind::Wigner => {
            for (i, g) in gens.iter().enumerate() {
                let f = phase_function_csv(&fourier_wigner(g));
                report
                    .files
                    .push(write(dir, &format!("wigner_g{i}.csv"), &f)?);
            }
        }
        ExportKind::Periodization => {
            for (i, g) in gens.iter().enumerate() {
                let p = periodize_sq(&fourier_wigner(g), s.lattice)?;
                report.files.push(write(
                    dir,
                    &format!("periodization_g{i}.csv"),
                    &periodization_csv(&p),
                )?);
            }
        }
        ExportKind::Transfer => {
            report
                .files
                .push(write(dir, "transfer.csv", &transfer_csv(&s.transfer))?);
        }
    }
    Ok(report)
}
