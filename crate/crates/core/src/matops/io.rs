//! Plain-text matrix and vector files.
//!
//! Matrix files start with a `rows cols` header line followed by one line per
//! row. Blank lines and lines starting with `#` are ignored. Writers emit 17
//! significant digits so that a round trip is exact.

use super::Matrix;
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_real(line: usize, tok: &str) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| parse_err(line, format!("not a number: {tok:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value {tok:?}")));
    }
    Ok(v)
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty matrix file"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_err(hline, "header must be `rows cols`"));
    }
    let parse_dim = |s: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(parse_err(hline, format!("bad dimension {s:?}"))),
        }
    };
    let (rows, cols) = (parse_dim(dims[0])?, parse_dim(dims[1])?);

    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (ln, line) in lines {
        if seen == rows {
            return Err(parse_err(ln, format!("more than {rows} rows")));
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(parse_real(ln, tok)?);
        }
        if data.len() - before != cols {
            return Err(parse_err(
                ln,
                format!("expected {cols} values, found {}", data.len() - before),
            ));
        }
        seen += 1;
    }
    if seen != rows {
        return Err(parse_err(text.lines().count().max(1), format!("expected {rows} rows, found {seen}")));
    }
    Matrix::new(rows, cols, data)
}

/// Whitespace-separated reals, spread over any number of lines.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (ln, line) in content_lines(text) {
        for tok in line.split_whitespace() {
            out.push(parse_real(ln, tok)?);
        }
    }
    if out.is_empty() {
        return Err(parse_err(1, "empty vector file"));
    }
    Ok(out)
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut s = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn format_vector(v: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.16e}");
    }
    s.push('\n');
    s
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_vector(&std::fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    Ok(std::fs::write(path, format_matrix(m))?)
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    Ok(std::fs::write(path, format_vector(v))?)
}
