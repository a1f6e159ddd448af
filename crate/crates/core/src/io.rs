//! Text formats for graphs and orbit matrices.
//!
//! Graph files start with a `v k t lambda mu` header followed by `v` lines
//! of `0`/`1` characters. Orbit matrix files have the same header, then
//! `p b R` (or `C`), the orbit lengths, and `b` rows of integers. Lines
//! beginning with `#` are comments and may precede the header.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::digraph::AdjacencyMatrix;
use crate::error::{parse_err, DsrgError, Result};
use crate::orbit_matrix::{ColumnOrbitMatrix, RowOrbitMatrix};
use crate::params::DsrgParams;

/// A graph together with the parameters it claims to satisfy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub params: DsrgParams,
    pub matrix: AdjacencyMatrix,
}

/// An orbit matrix file holds either orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitMatrixFile {
    Row(RowOrbitMatrix),
    Column(ColumnOrbitMatrix),
}

/// Non-comment, non-blank lines with their 1-based line numbers.
/// Comments are allowed only before the first content line.
fn content_lines(text: &str) -> Result<Vec<(usize, &str)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if !out.is_empty() {
                return Err(parse_err(idx + 1, "comments are only allowed before the header"));
            }
            continue;
        }
        out.push((idx + 1, line));
    }
    Ok(out)
}

fn numbers(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|w| w.parse().map_err(|_| parse_err(line, format!("not a non-negative integer: {w:?}"))))
        .collect()
}

fn parse_header(lines: &[(usize, &str)]) -> Result<DsrgParams> {
    let &(line, text) = lines.first().ok_or_else(|| parse_err(1, "missing header"))?;
    let nums = numbers(line, text)?;
    let [v, k, t, lambda, mu] = nums[..] else {
        return Err(parse_err(line, "header must be `v k t lambda mu`"));
    };
    DsrgParams::new(v, k, t, lambda, mu).map_err(|e| parse_err(line, e.to_string()))
}

fn write_header(out: &mut String, p: &DsrgParams) {
    writeln!(out, "{} {} {} {} {}", p.v, p.k, p.t, p.lambda, p.mu).unwrap();
}

/// Canonical adjacency text, ending in a newline.
pub fn write_graph(params: &DsrgParams, matrix: &AdjacencyMatrix) -> String {
    let mut out = String::new();
    write_header(&mut out, params);
    for row in matrix.row_strings() {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let lines = content_lines(text)?;
    let params = parse_header(&lines)?;
    let rows = &lines[1..];
    if rows.len() != params.v {
        let line = rows.last().map_or(lines[0].0, |r| r.0);
        return Err(parse_err(line, format!("expected {} matrix rows, found {}", params.v, rows.len())));
    }
    for &(line, row) in rows {
        if row.len() != params.v {
            return Err(parse_err(line, format!("row has {} characters, expected {}", row.len(), params.v)));
        }
        if let Some(c) = row.chars().find(|c| *c != '0' && *c != '1') {
            return Err(parse_err(line, format!("unexpected character {c:?}")));
        }
    }
    let strings: Vec<&str> = rows.iter().map(|r| r.1).collect();
    let matrix = AdjacencyMatrix::from_row_strings(&strings)
        .map_err(|e| parse_err(rows.first().map_or(1, |r| r.0), e.to_string()))?;
    Ok(GraphFile { params, matrix })
}

impl GraphFile {
    pub fn to_text(&self) -> String {
        write_graph(&self.params, &self.matrix)
    }
}

pub fn parse_orbit_matrix(text: &str) -> Result<OrbitMatrixFile> {
    let lines = content_lines(text)?;
    let params = parse_header(&lines)?;
    let &(line, shape) = lines.get(1).ok_or_else(|| parse_err(lines[0].0, "missing `p b R|C` line"))?;
    let words: Vec<&str> = shape.split_whitespace().collect();
    let [p, b, tag] = words[..] else {
        return Err(parse_err(line, "expected `p b R` or `p b C`"));
    };
    let p: usize = p.parse().map_err(|_| parse_err(line, format!("bad group order {p:?}")))?;
    let b: usize = b.parse().map_err(|_| parse_err(line, format!("bad orbit count {b:?}")))?;
    let column = match tag {
        "R" => false,
        "C" => true,
        other => return Err(parse_err(line, format!("orientation must be R or C, found {other:?}"))),
    };
    let &(len_line, len_text) = lines.get(2).ok_or_else(|| parse_err(line, "missing orbit lengths"))?;
    let lengths = numbers(len_line, len_text)?;
    if lengths.len() != b {
        return Err(parse_err(len_line, format!("expected {b} orbit lengths, found {}", lengths.len())));
    }
    if lengths.iter().any(|&n| n != 1 && n != p) {
        return Err(parse_err(len_line, format!("orbit lengths must be 1 or {p}")));
    }
    let body = &lines[3..];
    if body.len() != b {
        return Err(parse_err(len_line, format!("expected {b} matrix rows, found {}", body.len())));
    }
    let mut rows = Vec::with_capacity(b);
    for &(l, text) in body {
        let row = numbers(l, text)?;
        if row.len() != b {
            return Err(parse_err(l, format!("expected {b} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    let wrap = |e: DsrgError| parse_err(line, e.to_string());
    Ok(if column {
        OrbitMatrixFile::Column(ColumnOrbitMatrix::new(params, p, lengths, rows).map_err(wrap)?)
    } else {
        OrbitMatrixFile::Row(RowOrbitMatrix::new(params, p, lengths, rows).map_err(wrap)?)
    })
}

impl OrbitMatrixFile {
    pub fn to_text(&self) -> String {
        match self {
            OrbitMatrixFile::Row(r) => r.to_string(),
            OrbitMatrixFile::Column(c) => c.to_string(),
        }
    }

    /// The row orientation, converting if necessary.
    pub fn into_row(self) -> Result<RowOrbitMatrix> {
        match self {
            OrbitMatrixFile::Row(r) => Ok(r),
            OrbitMatrixFile::Column(c) => crate::orbit_matrix::column_to_row(&c),
        }
    }
}

pub fn read_graph(path: &Path) -> Result<GraphFile> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn read_orbit_matrix(path: &Path) -> Result<OrbitMatrixFile> {
    parse_orbit_matrix(&fs::read_to_string(path)?)
}
