use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{DsrgError, Result};
use crate::params::{DsrgParams, MAX_VERTICES};
use crate::perm::Permutation;

/// Adjacency matrix of a simple digraph: binary entries, zero diagonal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdjacencyMatrix {
    v: usize,
    entries: Vec<u8>,
}

impl AdjacencyMatrix {
    pub fn zeros(v: usize) -> Self {
        assert!(v <= MAX_VERTICES, "v = {v} exceeds {MAX_VERTICES}");
        AdjacencyMatrix {
            v,
            entries: vec![0; v * v],
        }
    }

    /// Builds a matrix from rows, rejecting loops and non-binary entries.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let v = rows.len();
        if v > MAX_VERTICES {
            return Err(DsrgError::InvalidMatrix(format!("v = {v} exceeds {MAX_VERTICES}")));
        }
        let mut entries = Vec::with_capacity(v * v);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != v {
                return Err(DsrgError::InvalidMatrix(format!(
                    "row {i} has length {}, expected {v}",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                if x > 1 {
                    return Err(DsrgError::InvalidMatrix(format!("entry ({i},{j}) = {x} is not binary")));
                }
                if i == j && x != 0 {
                    return Err(DsrgError::InvalidMatrix(format!("loop at vertex {i}")));
                }
            }
            entries.extend_from_slice(row);
        }
        Ok(AdjacencyMatrix { v, entries })
    }

    /// Builds a matrix from an arc list `x -> y`.
    pub fn from_arcs(v: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut m = AdjacencyMatrix::zeros(v);
        for &(x, y) in arcs {
            if x >= v || y >= v {
                return Err(DsrgError::InvalidMatrix(format!("arc ({x},{y}) out of range")));
            }
            if x == y {
                return Err(DsrgError::InvalidMatrix(format!("loop at vertex {x}")));
            }
            m.set(x, y, true);
        }
        Ok(m)
    }

    /// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
    pub fn directed_cycle(n: usize) -> Self {
        let mut m = AdjacencyMatrix::zeros(n);
        if n > 1 {
            for i in 0..n {
                m.set(i, (i + 1) % n, true);
            }
        }
        m
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.v
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.v + j] != 0
    }

    /// Sets an entry. Loops are a logic error and panic.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, arc: bool) {
        assert!(!(arc && i == j), "loop at vertex {i}");
        self.entries[i * self.v + j] = arc as u8;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.entries[i * self.v..(i + 1) * self.v]
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.entries
    }

    pub fn out_neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().filter(|(_, &x)| x != 0).map(|(j, _)| j)
    }

    pub fn arc_count(&self) -> usize {
        self.entries.iter().map(|&x| x as usize).sum()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.v).map(|i| self.row(i).iter().map(|&x| x as usize).sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.v];
        for i in 0..self.v {
            for (j, &x) in self.row(i).iter().enumerate() {
                sums[j] += x as usize;
            }
        }
        sums
    }

    pub fn is_regular(&self, k: usize) -> bool {
        self.row_sums().iter().all(|&s| s == k) && self.col_sums().iter().all(|&s| s == k)
    }

    /// Relabels vertices by `g`: the result has an arc `g(x) -> g(y)` exactly
    /// when `self` has `x -> y` (the matrix `P A P^T`).
    pub fn relabel(&self, g: &Permutation) -> Self {
        assert_eq!(g.degree(), self.v, "permutation degree differs from graph order");
        let mut out = AdjacencyMatrix::zeros(self.v);
        for x in 0..self.v {
            let gx = g.apply(x);
            for y in self.out_neighbours(x) {
                out.entries[gx * self.v + g.apply(y)] = 1;
            }
        }
        out
    }

    /// Rows as strings of `0`/`1`.
    pub fn row_strings(&self) -> Vec<String> {
        (0..self.v)
            .map(|i| self.row(i).iter().map(|&x| if x != 0 { '1' } else { '0' }).collect())
            .collect()
    }

    pub fn from_row_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let parsed: Vec<Vec<u8>> = rows
            .iter()
            .map(|r| {
                r.as_ref()
                    .bytes()
                    .map(|c| match c {
                        b'0' => Ok(0),
                        b'1' => Ok(1),
                        other => Err(DsrgError::InvalidMatrix(format!(
                            "unexpected character {:?}",
                            other as char
                        ))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        AdjacencyMatrix::from_rows(&parsed)
    }
}

impl fmt::Debug for AdjacencyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "AdjacencyMatrix({})", self.v)?;
        for r in self.row_strings() {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

impl Serialize for AdjacencyMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.row_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for AdjacencyMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<String>::deserialize(d)?;
        AdjacencyMatrix::from_row_strings(&rows).map_err(serde::de::Error::custom)
    }
}

/// Entry `(i, j)` is the number of directed 2-paths `i -> s -> j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCountMatrix {
    v: usize,
    entries: Vec<u32>,
}

impl PathCountMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.v + j]
    }

    pub fn order(&self) -> usize {
        self.v
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.v..(i + 1) * self.v]
    }
}

/// The matrix square of `a`, accumulated over out-neighbour lists.
pub fn two_path_counts(a: &AdjacencyMatrix) -> PathCountMatrix {
    let v = a.order();
    let adj: Vec<Vec<usize>> = (0..v).map(|i| a.out_neighbours(i).collect()).collect();
    let mut entries = vec![0u32; v * v];
    for i in 0..v {
        let row = &mut entries[i * v..(i + 1) * v];
        for &s in &adj[i] {
            for &j in &adj[s] {
                row[j] += 1;
            }
        }
    }
    PathCountMatrix { v, entries }
}

/// First reason a matrix fails the DSRG equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DsrgViolation {
    OutDegree { vertex: usize, degree: usize },
    InDegree { vertex: usize, degree: usize },
    Closed { vertex: usize, paths: u32 },
    Arc { from: usize, to: usize, paths: u32 },
    NonArc { from: usize, to: usize, paths: u32 },
}

impl fmt::Display for DsrgViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DsrgViolation::OutDegree { vertex, degree } => {
                write!(f, "regularity: vertex {vertex} has out-degree {degree}")
            }
            DsrgViolation::InDegree { vertex, degree } => {
                write!(f, "regularity: vertex {vertex} has in-degree {degree}")
            }
            DsrgViolation::Closed { vertex, paths } => {
                write!(f, "t: vertex {vertex} lies on {paths} closed 2-paths")
            }
            DsrgViolation::Arc { from, to, paths } => {
                write!(f, "lambda: arc {from}->{to} carries {paths} 2-paths")
            }
            DsrgViolation::NonArc { from, to, paths } => {
                write!(f, "mu: non-arc {from}->{to} carries {paths} 2-paths")
            }
        }
    }
}

fn check_dim(a: &AdjacencyMatrix, params: &DsrgParams) -> Result<()> {
    if a.order() != params.v {
        return Err(DsrgError::DimensionMismatch {
            expected: params.v,
            found: a.order(),
        });
    }
    Ok(())
}

/// Checks `AJ = JA = kJ` and `A^2 + (mu - lambda)A - (t - mu)I = mu J`
/// entrywise and reports the first violation.
pub fn dsrg_violation(a: &AdjacencyMatrix, params: &DsrgParams) -> Result<Option<DsrgViolation>> {
    check_dim(a, params)?;
    for (vertex, degree) in a.row_sums().into_iter().enumerate() {
        if degree != params.k {
            return Ok(Some(DsrgViolation::OutDegree { vertex, degree }));
        }
    }
    for (vertex, degree) in a.col_sums().into_iter().enumerate() {
        if degree != params.k {
            return Ok(Some(DsrgViolation::InDegree { vertex, degree }));
        }
    }
    let x = two_path_counts(a);
    for i in 0..a.order() {
        for j in 0..a.order() {
            let paths = x.get(i, j);
            let violation = if i == j {
                (paths as usize != params.t).then_some(DsrgViolation::Closed { vertex: i, paths })
            } else if a.get(i, j) {
                (paths as usize != params.lambda).then_some(DsrgViolation::Arc { from: i, to: j, paths })
            } else {
                (paths as usize != params.mu).then_some(DsrgViolation::NonArc { from: i, to: j, paths })
            };
            if violation.is_some() {
                return Ok(violation);
            }
        }
    }
    Ok(None)
}

pub fn verify_dsrg(a: &AdjacencyMatrix, params: &DsrgParams) -> Result<bool> {
    Ok(dsrg_violation(a, params)?.is_none())
}

/// Capped 2-path score. Every ordered pair `(i, j)` contributes its path
/// count capped at `t` (diagonal), `lambda` (arc) or `mu` (non-arc).
pub fn fitness(a: &AdjacencyMatrix, params: &DsrgParams) -> Result<u64> {
    check_dim(a, params)?;
    Ok(fitness_unchecked(a, params))
}

pub(crate) fn fitness_unchecked(a: &AdjacencyMatrix, params: &DsrgParams) -> u64 {
    let x = two_path_counts(a);
    let (t, lambda, mu) = (params.t as u64, params.lambda as u64, params.mu as u64);
    let mut total = 0u64;
    for i in 0..a.order() {
        let arcs = a.row(i);
        for (j, &paths) in x.row(i).iter().enumerate() {
            let cap = if i == j {
                t
            } else if arcs[j] != 0 {
                lambda
            } else {
                mu
            };
            total += (paths as u64).min(cap);
        }
    }
    total
}
