//! JSON experiment configuration and its validation.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One field-level problem found while validating a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration: {}", join(.0))]
    Invalid(Vec<Diagnostic>),
}

fn join(d: &[Diagnostic]) -> String {
    d.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub a: usize,
    pub b: usize,
}

/// Recipe for one generator or averaging operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuilderSpec {
    /// `delta_{t1} (x) delta_{t2}`.
    DeltaPair { t1: usize, t2: usize },
    /// `g (x) g` for the normalized indicator of `{shift, ..., shift + width - 1}`.
    Boxcar {
        width: usize,
        #[serde(default)]
        shift: usize,
    },
    /// `g (x) g` for a normalized Gaussian of the given width, periodized over
    /// `2 wraps + 1` periods.
    PeriodizedGaussian {
        width: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "default_wraps")]
        wraps: usize,
    },
    /// `psi (x) phi` for independent random unit vectors.
    RandomSignalPair {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Operator with i.i.d. complex Gaussian kernel entries.
    RandomHs {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Orthonormalized version of `inner` (lattice translates become orthonormal).
    Whitened { inner: Box<BuilderSpec> },
    /// `inner` with its Fourier-Wigner transform cleared on one dual-grid coset.
    Notched { inner: Box<BuilderSpec>, xi: usize },
    /// Reuses generator `index` (averagers only).
    Generator { index: usize },
}

fn default_wraps() -> usize {
    3
}

impl BuilderSpec {
    /// True when building needs random numbers.
    pub fn is_random(&self) -> bool {
        match self {
            BuilderSpec::RandomSignalPair { .. } | BuilderSpec::RandomHs { .. } => true,
            BuilderSpec::Whitened { inner } | BuilderSpec::Notched { inner, .. } => {
                inner.is_random()
            }
            _ => false,
        }
    }

    fn own_seed(&self) -> Option<u64> {
        match self {
            BuilderSpec::RandomSignalPair { seed } | BuilderSpec::RandomHs { seed } => *seed,
            BuilderSpec::Whitened { inner } | BuilderSpec::Notched { inner, .. } => {
                inner.own_seed()
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CMatrixSpec {
    #[default]
    Zero,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportKind {
    #[default]
    Symbols,
    Wigner,
    Periodization,
    Transfer,
}

impl std::str::FromStr for ExportKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symbols" => Ok(ExportKind::Symbols),
            "wigner" => Ok(ExportKind::Wigner),
            "periodization" => Ok(ExportKind::Periodization),
            "transfer" => Ok(ExportKind::Transfer),
            other => Err(format!(
                "unknown export kind {other:?} (expected symbols, wigner, periodization or transfer)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Largest accepted relative reconstruction error.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Relative positivity threshold for frame and Riesz verdicts.
    #[serde(default = "default_tol_pos")]
    pub tol_pos: f64,
    #[serde(default)]
    pub c_matrix: CMatrixSpec,
    #[serde(default)]
    pub export: ExportKind,
}

fn default_tolerance() -> f64 {
    1e-8
}

fn default_tol_pos() -> f64 {
    crate::frame::DEFAULT_TOL_POS
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tolerance: default_tolerance(),
            tol_pos: default_tol_pos(),
            c_matrix: CMatrixSpec::default(),
            export: ExportKind::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "L")]
    pub l: usize,
    pub lattice: LatticeSpec,
    pub generators: Vec<BuilderSpec>,
    pub averagers: Vec<BuilderSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub options: Options,
}

impl ExperimentConfig {
    /// Parses and validates JSON text.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        ExperimentConfig::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    /// Collects every problem instead of stopping at the first.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut diags = Vec::new();
        let mut push = |field: String, message: String| diags.push(Diagnostic { field, message });
        let l = self.l;

        if l < 3 || l.is_multiple_of(2) {
            push("L".into(), format!("must be odd and at least 3, got {l}"));
        }
        for (name, step) in [("a", self.lattice.a), ("b", self.lattice.b)] {
            if step == 0 || (l > 0 && !l.is_multiple_of(step)) {
                push(
                    format!("lattice.{name}"),
                    format!("must divide L={l}, got {step}"),
                );
            }
        }
        if self.generators.is_empty() {
            push(
                "generators".into(),
                "at least one generator is required".into(),
            );
        }
        if self.averagers.is_empty() {
            push(
                "averagers".into(),
                "at least one averager is required".into(),
            );
        }
        if self.averagers.len() < self.generators.len() {
            push(
                "averagers".into(),
                format!(
                    "need at least as many averagers as generators ({} < {})",
                    self.averagers.len(),
                    self.generators.len()
                ),
            );
        }
        let dual_len = if self.lattice.a > 0 && self.lattice.b > 0 {
            (l / self.lattice.a) * (l / self.lattice.b)
        } else {
            0
        };
        let ctx = Ctx {
            l,
            dual_len,
            generator_count: self.generators.len(),
            has_seed: self.seed.is_some(),
        };
        for (i, g) in self.generators.iter().enumerate() {
            check_builder(g, &format!("generators[{i}]"), &ctx, false, &mut push);
        }
        for (i, q) in self.averagers.iter().enumerate() {
            check_builder(q, &format!("averagers[{i}]"), &ctx, true, &mut push);
        }
        let o = &self.options;
        if !(o.tolerance.is_finite() && o.tolerance > 0.0) {
            push(
                "options.tolerance".into(),
                format!("must be positive, got {}", o.tolerance),
            );
        }
        if !(o.tol_pos.is_finite() && o.tol_pos > 0.0 && o.tol_pos < 1.0) {
            push(
                "options.tol_pos".into(),
                format!("must lie in (0, 1), got {}", o.tol_pos),
            );
        }
        if o.c_matrix == CMatrixSpec::Random && self.seed.is_none() {
            push(
                "seed".into(),
                "required when options.c_matrix is \"random\"".into(),
            );
        }

        if diags.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(diags))
        }
    }
}

struct Ctx {
    l: usize,
    dual_len: usize,
    generator_count: usize,
    has_seed: bool,
}

fn check_builder(
    b: &BuilderSpec,
    path: &str,
    ctx: &Ctx,
    top_level_averager: bool,
    push: &mut impl FnMut(String, String),
) {
    let l = ctx.l;
    match b {
        BuilderSpec::DeltaPair { t1, t2 } => {
            for (name, t) in [("t1", t1), ("t2", t2)] {
                if *t >= l {
                    push(
                        format!("{path}.{name}"),
                        format!("must be < L={l}, got {t}"),
                    );
                }
            }
        }
        BuilderSpec::Boxcar { width, shift } => {
            if *width == 0 || *width > l {
                push(
                    format!("{path}.width"),
                    format!("must lie in 1..={l}, got {width}"),
                );
            }
            if *shift >= l {
                push(
                    format!("{path}.shift"),
                    format!("must be < L={l}, got {shift}"),
                );
            }
        }
        BuilderSpec::PeriodizedGaussian {
            width,
            center,
            wraps,
        } => {
            if !(width.is_finite() && *width > 0.0) {
                push(
                    format!("{path}.width"),
                    format!("must be positive, got {width}"),
                );
            }
            if !(center.is_finite() && *center >= 0.0 && *center < l as f64) {
                push(
                    format!("{path}.center"),
                    format!("must lie in [0, {l}), got {center}"),
                );
            }
            if *wraps > 64 {
                push(
                    format!("{path}.wraps"),
                    format!("must be at most 64, got {wraps}"),
                );
            }
        }
        BuilderSpec::RandomSignalPair { .. } | BuilderSpec::RandomHs { .. } => {
            if !ctx.has_seed && b.own_seed().is_none() {
                push(
                    format!("{path}.seed"),
                    "random builder needs a seed here or at the top level".into(),
                );
            }
        }
        BuilderSpec::Whitened { inner } => {
            check_builder(inner, &format!("{path}.inner"), ctx, false, push);
        }
        BuilderSpec::Notched { inner, xi } => {
            if *xi >= ctx.dual_len {
                push(
                    format!("{path}.xi"),
                    format!("must be < {} (dual grid size), got {xi}", ctx.dual_len),
                );
            }
            check_builder(inner, &format!("{path}.inner"), ctx, false, push);
        }
        BuilderSpec::Generator { index } => {
            if !top_level_averager {
                push(
                    format!("{path}.kind"),
                    "\"generator\" may only appear as a top-level averager".into(),
                );
            } else if *index >= ctx.generator_count {
                push(
                    format!("{path}.index"),
                    format!(
                        "must be < {} (number of generators), got {index}",
                        ctx.generator_count
                    ),
                );
            }
        }
    }
}
