//! Machine-readable run reports.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

use super::config::ExperimentConfig;
use crate::frame::{FrameReport, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reconstruction {
    pub relative_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub status: Status,
    pub rng: String,
    pub config: ExperimentConfig,
    /// Riesz check of the generators' lattice translates.
    pub generators: FrameReport,
    /// Frame check of the sampling system `A`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<FrameReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruction: Option<Reconstruction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interpolation_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
    pub timing: Timing,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Pretty JSON with every float written to 17 significant digits.
    pub fn to_json(&self) -> String {
        to_json_17(self)
    }
}

/// Pretty JSON writer that prints floats as `d.dddddddddddddddde±x`.
pub fn to_json_17<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Float17::default());
    value.serialize(&mut ser).expect("report serializes");
    String::from_utf8(out).expect("JSON is UTF-8")
}

#[derive(Default)]
struct Float17 {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

impl Float17 {
    fn float<W: ?Sized + io::Write>(writer: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            write!(writer, "{v:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

impl Formatter for Float17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        Float17::float(writer, value)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        Float17::float(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json_17(&vec![0.1f64, -2.5e-12, 3.0]);
        let v: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(v, vec![0.1, -2.5e-12, 3.0]);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("-2.4999999999999998e-12"), "{s}");
    }

    #[test]
    fn non_finite_becomes_null() {
        assert!(to_json_17(&f64::NAN).contains("null"));
    }
}
