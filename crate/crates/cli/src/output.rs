//! File formats. Every float goes through [`num`] so output is byte-stable.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

pub const TOOL_VERSION: &str = concat!("ssps ", env!("CARGO_PKG_VERSION"));

/// 17 significant digits, scientific.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new() -> Self {
        Csv { buf: String::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.buf, "# {key}={value}");
    }

    pub fn header(&mut self, cols: &[&str]) {
        self.buf.push_str(&cols.join(","));
        self.buf.push('\n');
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| num(v)).collect();
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

/// The machine-readable result of `ssps verify`.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub model: &'static str,
    pub r: f64,
    pub modulus: f64,
    pub offset_c: f64,
    pub period: f64,
    pub residual_max: f64,
    pub antisymmetry_max: f64,
    pub period_defect_max: f64,
    pub quad_order: usize,
    pub grid_points: usize,
    pub pass: bool,
    pub tool_version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleDocument {
    pub model: &'static str,
    pub r: f64,
    pub modulus: f64,
    pub c: f64,
    pub period: f64,
    pub tool_version: &'static str,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub dx: Vec<f64>,
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents are plain data");
    s.push('\n');
    s
}

/// Writes to `out`, or stdout when no path is given.
pub fn emit(out: Option<&Path>, contents: &str) -> io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, contents),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            stdout.flush()
        }
    }
}
