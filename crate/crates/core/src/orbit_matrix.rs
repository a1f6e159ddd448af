//! Row and column orbit matrices: the quotient matrices of the equitable
//! partition a prescribed automorphism group induces on a DSRG.
//!
//! For orbits `O_1..O_b` of lengths `n_i`, block `A_ij` of the adjacency
//! matrix has constant row sum `r_ij` and constant column sum `c_ij`, and
//! `r_ij * n_i = c_ij * n_j`.

use std::fmt;

use num_rational::Ratio;

use crate::automorphism::is_automorphism;
use crate::digraph::AdjacencyMatrix;
use crate::error::{DsrgError, Result};
use crate::orbits::OrbitPartition;
use crate::params::DsrgParams;

/// Which of the five defining conditions failed, with the first offending indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// (a) entry outside `[0, n]`
    EntryBound { i: usize, j: usize, value: usize, bound: usize },
    /// (b) diagonal entry above `n_i - 1`
    DiagonalBound { i: usize, value: usize, bound: usize },
    /// (c) plain line sum differs from `k`
    DegreeSum { index: usize, sum: usize },
    /// (d) length-weighted line sum differs from `k`
    WeightedSum { index: usize, sum: Ratio<u64> },
    /// (e) product identity fails
    Product { i: usize, j: usize, lhs: i64, rhs: i64 },
}

impl Violation {
    pub fn condition(&self) -> char {
        match self {
            Violation::EntryBound { .. } => 'a',
            Violation::DiagonalBound { .. } => 'b',
            Violation::DegreeSum { .. } => 'c',
            Violation::WeightedSum { .. } => 'd',
            Violation::Product { .. } => 'e',
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EntryBound { i, j, value, bound } => {
                write!(f, "condition (a): entry ({i},{j}) = {value} exceeds {bound}")
            }
            Violation::DiagonalBound { i, value, bound } => {
                write!(f, "condition (b): diagonal entry ({i},{i}) = {value} exceeds {bound}")
            }
            Violation::DegreeSum { index, sum } => {
                write!(f, "condition (c): line {index} sums to {sum}")
            }
            Violation::WeightedSum { index, sum } => {
                write!(f, "condition (d): weighted line {index} sums to {sum}")
            }
            Violation::Product { i, j, lhs, rhs } => {
                write!(f, "condition (e): at ({i},{j}) the product is {lhs}, expected {rhs}")
            }
        }
    }
}

/// Row or column variant of an orbit matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Row,
    Column,
}

/// Entries plus the metadata shared by both orientations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrbitMatrixData {
    pub params: DsrgParams,
    /// order of the acting group: a prime, or 1 for the trivial action
    pub prime: usize,
    pub lengths: Vec<usize>,
    entries: Vec<usize>,
}

impl OrbitMatrixData {
    pub fn new(params: DsrgParams, prime: usize, lengths: Vec<usize>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let b = lengths.len();
        if b == 0 {
            return Err(DsrgError::Shape("no orbits".into()));
        }
        if lengths.contains(&0) {
            return Err(DsrgError::Shape("orbit lengths must be positive".into()));
        }
        let total: usize = lengths.iter().sum();
        if total != params.v {
            return Err(DsrgError::Shape(format!("orbit lengths sum to {total}, expected v = {}", params.v)));
        }
        if rows.len() != b || rows.iter().any(|r| r.len() != b) {
            return Err(DsrgError::Shape(format!("entries must form a {b}x{b} matrix")));
        }
        Ok(OrbitMatrixData {
            params,
            prime,
            lengths,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn b(&self) -> usize {
        self.lengths.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.b() + j]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.entries.chunks(self.b()).map(<[usize]>::to_vec).collect()
    }

    /// Shared check. `row_side` selects the row conditions; the column
    /// conditions are the mirror image.
    fn validate(&self, orientation: Orientation) -> std::result::Result<(), Violation> {
        let b = self.b();
        let n = &self.lengths;
        let DsrgParams { k, t, lambda, mu, .. } = self.params;
        let row_side = orientation == Orientation::Row;

        for i in 0..b {
            for j in 0..b {
                let bound = if row_side { n[j] } else { n[i] };
                let value = self.get(i, j);
                if value > bound {
                    return Err(Violation::EntryBound { i, j, value, bound });
                }
            }
        }
        for i in 0..b {
            let value = self.get(i, i);
            if value + 1 > n[i] {
                return Err(Violation::DiagonalBound { i, value, bound: n[i] - 1 });
            }
        }
        for index in 0..b {
            let sum: usize = (0..b)
                .map(|s| if row_side { self.get(index, s) } else { self.get(s, index) })
                .sum();
            if sum != k {
                return Err(Violation::DegreeSum { index, sum });
            }
        }
        for index in 0..b {
            let sum: Ratio<u64> = (0..b)
                .map(|s| {
                    let (value, num, den) = if row_side {
                        (self.get(s, index), n[s], n[index])
                    } else {
                        (self.get(index, s), n[s], n[index])
                    };
                    Ratio::new((num * value) as u64, den as u64)
                })
                .sum();
            if sum != Ratio::from_integer(k as u64) {
                return Err(Violation::WeightedSum { index, sum });
            }
        }
        let (t, lambda, mu) = (t as i64, lambda as i64, mu as i64);
        for i in 0..b {
            for j in 0..b {
                let lhs: i64 = (0..b).map(|s| (self.get(i, s) * self.get(s, j)) as i64).sum();
                let x = self.get(i, j) as i64;
                let len = if row_side { n[j] } else { n[i] } as i64;
                let delta = if i == j { t - mu } else { 0 };
                let rhs = delta + x * lambda + (len - x) * mu;
                if lhs != rhs {
                    return Err(Violation::Product { i, j, lhs, rhs });
                }
            }
        }
        Ok(())
    }

    fn write_text(&self, f: &mut fmt::Formatter<'_>, tag: char) -> fmt::Result {
        let p = &self.params;
        writeln!(f, "{} {} {} {} {}", p.v, p.k, p.t, p.lambda, p.mu)?;
        writeln!(f, "{} {} {}", self.prime, self.b(), tag)?;
        let lens: Vec<String> = self.lengths.iter().map(|n| n.to_string()).collect();
        writeln!(f, "{}", lens.join(" "))?;
        for row in self.entries.chunks(self.b()) {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// `r_ij`: out-arcs from one vertex of orbit `i` into orbit `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RowOrbitMatrix(pub OrbitMatrixData);

/// `c_ij`: in-arcs into one vertex of orbit `j` from orbit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColumnOrbitMatrix(pub OrbitMatrixData);

impl RowOrbitMatrix {
    pub fn new(params: DsrgParams, prime: usize, lengths: Vec<usize>, rows: Vec<Vec<usize>>) -> Result<Self> {
        OrbitMatrixData::new(params, prime, lengths, rows).map(RowOrbitMatrix)
    }

    pub fn data(&self) -> &OrbitMatrixData {
        &self.0
    }

    pub fn params(&self) -> &DsrgParams {
        &self.0.params
    }

    pub fn lengths(&self) -> &[usize] {
        &self.0.lengths
    }

    pub fn prime(&self) -> usize {
        self.0.prime
    }

    pub fn b(&self) -> usize {
        self.0.b()
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.0.get(i, j)
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.0.rows()
    }
}

impl ColumnOrbitMatrix {
    pub fn new(params: DsrgParams, prime: usize, lengths: Vec<usize>, rows: Vec<Vec<usize>>) -> Result<Self> {
        OrbitMatrixData::new(params, prime, lengths, rows).map(ColumnOrbitMatrix)
    }

    pub fn data(&self) -> &OrbitMatrixData {
        &self.0
    }

    pub fn lengths(&self) -> &[usize] {
        &self.0.lengths
    }

    pub fn b(&self) -> usize {
        self.0.b()
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.0.get(i, j)
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.0.rows()
    }
}

impl fmt::Display for RowOrbitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write_text(f, 'R')
    }
}

impl fmt::Display for ColumnOrbitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write_text(f, 'C')
    }
}

/// Conditions (a)-(e) for a row orbit matrix:
/// `r_ij <= n_j`, `r_ii <= n_i - 1`, `sum_j r_ij = k`,
/// `sum_i (n_i/n_j) r_ij = k`, and
/// `sum_s r_is r_sj = [i=j](t - mu) + r_ij lambda + (n_j - r_ij) mu`.
pub fn validate_row_orbit_matrix(r: &RowOrbitMatrix) -> std::result::Result<(), Violation> {
    r.0.validate(Orientation::Row)
}

/// Mirror of [`validate_row_orbit_matrix`] with the roles of rows and
/// columns exchanged and `n_i` in place of `n_j`.
pub fn validate_column_orbit_matrix(c: &ColumnOrbitMatrix) -> std::result::Result<(), Violation> {
    c.0.validate(Orientation::Column)
}

fn rescale(data: &OrbitMatrixData, to_column: bool) -> Result<OrbitMatrixData> {
    let b = data.b();
    let n = &data.lengths;
    let mut rows = vec![vec![0; b]; b];
    for i in 0..b {
        for j in 0..b {
            let (num, den) = if to_column { (n[i], n[j]) } else { (n[j], n[i]) };
            let scaled = data.get(i, j) * num;
            if !scaled.is_multiple_of(den) {
                return Err(DsrgError::NonIntegralRescale { i, j });
            }
            rows[i][j] = scaled / den;
        }
    }
    OrbitMatrixData::new(data.params, data.prime, n.clone(), rows)
}

/// `c_ij = r_ij * n_i / n_j`.
pub fn row_to_column(r: &RowOrbitMatrix) -> Result<ColumnOrbitMatrix> {
    let c = ColumnOrbitMatrix(rescale(&r.0, true)?);
    debug_assert!(validate_row_orbit_matrix(r).is_err() || validate_column_orbit_matrix(&c).is_ok());
    Ok(c)
}

/// `r_ij = c_ij * n_j / n_i`.
pub fn column_to_row(c: &ColumnOrbitMatrix) -> Result<RowOrbitMatrix> {
    Ok(RowOrbitMatrix(rescale(&c.0, false)?))
}

fn check_derivation(a: &AdjacencyMatrix, part: &OrbitPartition, params: &DsrgParams) -> Result<()> {
    if a.order() != params.v {
        return Err(DsrgError::DimensionMismatch {
            expected: params.v,
            found: a.order(),
        });
    }
    if !is_automorphism(a, part.generator())? {
        return Err(DsrgError::NotAutomorphism);
    }
    Ok(())
}

/// Row orbit matrix of `a` under the action behind `part`. Fails loudly if
/// a block has non-constant row sums.
pub fn derive_row_orbit_matrix(
    a: &AdjacencyMatrix,
    part: &OrbitPartition,
    params: &DsrgParams,
) -> Result<RowOrbitMatrix> {
    check_derivation(a, part, params)?;
    let b = part.num_orbits();
    let mut rows = vec![vec![0; b]; b];
    for i in 0..b {
        for j in 0..b {
            let mut sums = part
                .orbit(i)
                .iter()
                .map(|&x| part.orbit(j).iter().filter(|&&y| a.get(x, y)).count());
            let first = sums.next().unwrap_or(0);
            if sums.any(|s| s != first) {
                return Err(DsrgError::NotEquitable {
                    row_orbit: i,
                    col_orbit: j,
                    what: "row sums",
                });
            }
            rows[i][j] = first;
        }
    }
    RowOrbitMatrix::new(*params, part.order(), part.lengths(), rows)
}

/// Column orbit matrix of `a` under the action behind `part`.
pub fn derive_column_orbit_matrix(
    a: &AdjacencyMatrix,
    part: &OrbitPartition,
    params: &DsrgParams,
) -> Result<ColumnOrbitMatrix> {
    check_derivation(a, part, params)?;
    let b = part.num_orbits();
    let mut rows = vec![vec![0; b]; b];
    for i in 0..b {
        for j in 0..b {
            let mut sums = part
                .orbit(j)
                .iter()
                .map(|&y| part.orbit(i).iter().filter(|&&x| a.get(x, y)).count());
            let first = sums.next().unwrap_or(0);
            if sums.any(|s| s != first) {
                return Err(DsrgError::NotEquitable {
                    row_orbit: i,
                    col_orbit: j,
                    what: "column sums",
                });
            }
            rows[i][j] = first;
        }
    }
    ColumnOrbitMatrix::new(*params, part.order(), part.lengths(), rows)
}
