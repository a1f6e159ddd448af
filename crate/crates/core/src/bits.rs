//! Blocks ("bits") of an adjacency matrix at the intersection of two orbits.
//!
//! A block is determined by its first row. With both orbits listed in
//! generator-power order (`x, x^g, x^{g^2}, ...`), an automorphism `g`
//! forces `A[x^{g^a}][y^{g^c}] = A[x][y^{g^{c-a}}]`, so block entry
//! `(a, c)` equals `first_row[(c - a) mod p]`: a circulant. A fixed vertex
//! sees a full orbit uniformly, which makes `p x 1` blocks constant columns
//! and `1 x p` blocks constant rows.

use itertools::Itertools;

use crate::digraph::AdjacencyMatrix;
use crate::error::{DsrgError, Result};
use crate::orbits::OrbitPartition;

/// One orbit matrix entry together with the shape of its block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitSpec {
    pub source_orbit: usize,
    pub target_orbit: usize,
    pub row_sum: usize,
    pub rows: usize,
    pub cols: usize,
    pub diagonal: bool,
}

impl BitSpec {
    pub fn new(source_orbit: usize, target_orbit: usize, row_sum: usize, rows: usize, cols: usize) -> Self {
        BitSpec {
            source_orbit,
            target_orbit,
            row_sum,
            rows,
            cols,
            diagonal: source_orbit == target_orbit,
        }
    }

    /// Column sum `r * n_i / n_j` of the block, when integral.
    pub fn col_sum(&self) -> Option<usize> {
        let scaled = self.row_sum * self.rows;
        scaled.is_multiple_of(self.cols).then_some(scaled / self.cols)
    }

    fn inconsistent(&self, reason: impl Into<String>) -> DsrgError {
        DsrgError::InconsistentBit {
            source_orbit: self.source_orbit,
            target_orbit: self.target_orbit,
            reason: reason.into(),
        }
    }
}

/// Every admissible first row of the block, in lexicographic order of the
/// positions of its ones.
pub fn enumerate_bit_candidates(spec: &BitSpec, p: usize) -> Result<Vec<Vec<u8>>> {
    let BitSpec {
        row_sum: r,
        rows,
        cols,
        diagonal,
        ..
    } = *spec;
    let allowed = |n: usize| n == 1 || n == p;
    if !allowed(rows) || !allowed(cols) {
        return Err(spec.inconsistent(format!("orbit lengths {rows}x{cols} not in {{1, {p}}}")));
    }
    if diagonal && rows != cols {
        return Err(spec.inconsistent("diagonal block must be square"));
    }
    match spec.col_sum() {
        Some(c) if c <= rows => {}
        _ => return Err(spec.inconsistent(format!("row sum {r} gives no integral column sum"))),
    }
    if r > cols {
        return Err(spec.inconsistent(format!("row sum {r} exceeds {cols} columns")));
    }
    match (rows, cols) {
        (_, 1) => {
            if diagonal && r != 0 {
                return Err(spec.inconsistent("a fixed vertex cannot have a loop"));
            }
            Ok(vec![vec![r as u8]])
        }
        (1, _) => {
            if r != 0 && r != cols {
                return Err(spec.inconsistent(format!("a fixed vertex sees an orbit of {cols} uniformly")));
            }
            Ok(vec![vec![u8::from(r == cols); cols]])
        }
        _ => {
            let first = usize::from(diagonal);
            let candidates: Vec<Vec<u8>> = (first..cols)
                .combinations(r)
                .map(|ones| {
                    let mut row = vec![0u8; cols];
                    for c in ones {
                        row[c] = 1;
                    }
                    row
                })
                .collect();
            if candidates.is_empty() {
                return Err(spec.inconsistent(format!("no first row of weight {r} avoids the diagonal")));
            }
            Ok(candidates)
        }
    }
}

/// True iff the entry admits exactly one block.
pub fn is_fixed_bit(spec: &BitSpec, p: usize) -> bool {
    enumerate_bit_candidates(spec, p).is_ok_and(|c| c.len() == 1)
}

/// Block entry `(a, c)` generated by `first_row` for the given block shape.
#[inline]
pub fn block_entry(first_row: &[u8], rows: usize, cols: usize, a: usize, c: usize) -> u8 {
    match (rows, cols) {
        (_, 1) => first_row[0],
        (1, _) => first_row[c],
        _ => first_row[(c + cols - a) % cols],
    }
}

/// Writes the block for orbits `(i, j)` of `part` into `m`.
pub fn write_block(m: &mut AdjacencyMatrix, part: &OrbitPartition, i: usize, j: usize, first_row: &[u8]) {
    let (oi, oj) = (part.orbit(i), part.orbit(j));
    for (a, &x) in oi.iter().enumerate() {
        for (c, &y) in oj.iter().enumerate() {
            m.set(x, y, block_entry(first_row, oi.len(), oj.len(), a, c) != 0);
        }
    }
}

/// First row of block `(i, j)`: the representative of orbit `i` against orbit `j`.
pub fn read_first_row(m: &AdjacencyMatrix, part: &OrbitPartition, i: usize, j: usize) -> Vec<u8> {
    let x = part.orbit(i)[0];
    part.orbit(j).iter().map(|&y| m.get(x, y) as u8).collect()
}
