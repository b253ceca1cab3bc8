//! CSV diagnostics and the matching readers.
//!
//! Values are written with 17 significant digits so a write/read cycle is
//! lossless.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frame::TransferMatrix;
use crate::phase_space::{HsOperator, ModSize};
use crate::weyl::PhaseFunction;

pub const PHASE_HEADER: &str = "x,omega,re,im";
pub const OPERATOR_HEADER: &str = "t,x,re,im";
pub const PERIODIZATION_HEADER: &str = "xi_index,value";
pub const TRANSFER_HEADER: &str = "xi_index,m,n,re,im";

fn num(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").expect("writing to a String");
}

fn grid_csv(header: &str, l: usize, get: impl Fn(usize, usize) -> Complex64) -> String {
    let mut out = String::with_capacity(l * l * 52);
    out.push_str(header);
    out.push('\n');
    for i in 0..l {
        for j in 0..l {
            let v = get(i, j);
            write!(out, "{i},{j},").expect("writing to a String");
            num(&mut out, v.re);
            out.push(',');
            num(&mut out, v.im);
            out.push('\n');
        }
    }
    out
}

/// Row-major `(x, omega)` grid.
pub fn phase_function_csv(f: &PhaseFunction) -> String {
    grid_csv(PHASE_HEADER, f.modulus().get(), |x, w| f.get(x, w))
}

/// Kernel entries `(t, x)`, row-major.
pub fn operator_csv(s: &HsOperator) -> String {
    grid_csv(OPERATOR_HEADER, s.modulus().get(), |t, x| s.get(t, x))
}

pub fn periodization_csv(values: &[f64]) -> String {
    let mut out = String::from(PERIODIZATION_HEADER);
    out.push('\n');
    for (i, v) in values.iter().enumerate() {
        write!(out, "{i},").expect("writing to a String");
        num(&mut out, *v);
        out.push('\n');
    }
    out
}

/// One line per `(xi, m, n)`, ordered by `xi`, then `m`, then `n`.
pub fn transfer_csv(t: &TransferMatrix) -> String {
    let mut out = String::from(TRANSFER_HEADER);
    out.push('\n');
    for (xi, block) in t.blocks().iter().enumerate() {
        for m in 0..block.rows() {
            for n in 0..block.cols() {
                let v = block.get(m, n);
                write!(out, "{xi},{m},{n},").expect("writing to a String");
                num(&mut out, v.re);
                out.push(',');
                num(&mut out, v.im);
                out.push('\n');
            }
        }
    }
    out
}

fn bad(msg: String) -> Error {
    Error::Invalid(msg)
}

fn parse_grid(text: &str, header: &str, n: ModSize) -> Result<Vec<Complex64>> {
    let l = n.get();
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == header => {}
        other => return Err(bad(format!("expected header {header:?}, found {other:?}"))),
    }
    let mut values = vec![None; l * l];
    for (lineno, line) in lines.enumerate().filter(|(_, s)| !s.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let row = lineno + 2;
        if fields.len() != 4 {
            return Err(bad(format!(
                "line {row}: expected 4 fields, found {}",
                fields.len()
            )));
        }
        let idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| bad(format!("line {row}: {e}")))
        };
        let val = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| bad(format!("line {row}: {e}")))
        };
        let (i, j) = (idx(fields[0])?, idx(fields[1])?);
        if i >= l || j >= l {
            return Err(bad(format!(
                "line {row}: index ({i}, {j}) out of range for L={l}"
            )));
        }
        values[i * l + j] = Some(Complex64::new(val(fields[2])?, val(fields[3])?));
    }
    values
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.ok_or_else(|| bad(format!("missing entry ({}, {})", k / l, k % l))))
        .collect()
}

pub fn read_phase_function_csv(text: &str, n: ModSize) -> Result<PhaseFunction> {
    PhaseFunction::new(n, parse_grid(text, PHASE_HEADER, n)?)
}

pub fn read_operator_csv(text: &str, n: ModSize) -> Result<HsOperator> {
    HsOperator::new(n, parse_grid(text, OPERATOR_HEADER, n)?)
}

pub fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    std::fs::write(path, contents)
}
