use itertools::Itertools;

use crate::digraph::{verify_dsrg, AdjacencyMatrix};
use crate::error::{DsrgError, Result};
use crate::params::DsrgParams;

/// Recommended ceiling for [`brute_force_enumerate`].
pub const DEFAULT_VERTEX_CAP: usize = 8;

/// Every labeled DSRG adjacency matrix for `params`, in lexicographic row order.
///
/// Rows are filled top to bottom with out-neighbour sets of size `k`. A
/// branch is cut when a column sum exceeds `k`, when a column can no longer
/// reach `k`, or when a partial 2-path count already exceeds its cap.
/// Intended as a test oracle for `v <= vertex_cap`.
pub fn brute_force_enumerate(params: &DsrgParams, vertex_cap: usize) -> Result<Vec<AdjacencyMatrix>> {
    if params.v > vertex_cap {
        return Err(DsrgError::EnumerationCap {
            v: params.v,
            cap: vertex_cap,
        });
    }
    if params.k >= params.v {
        return Ok(Vec::new());
    }
    let mut search = Search {
        params: *params,
        v: params.v,
        rows: vec![Vec::new(); params.v],
        adj: vec![false; params.v * params.v],
        col: vec![0; params.v],
        paths: vec![0; params.v * params.v],
        out: Vec::new(),
    };
    search.fill(0);
    Ok(search.out)
}

struct Search {
    params: DsrgParams,
    v: usize,
    rows: Vec<Vec<usize>>,
    adj: Vec<bool>,
    col: Vec<usize>,
    paths: Vec<usize>,
    out: Vec<AdjacencyMatrix>,
}

impl Search {
    fn cap(&self, a: usize, b: usize) -> usize {
        if a == b {
            self.params.t
        } else if self.adj[a * self.v + b] {
            self.params.lambda
        } else {
            self.params.mu
        }
    }

    fn fill(&mut self, i: usize) {
        let v = self.v;
        if i == v {
            let rows: Vec<Vec<u8>> = (0..v)
                .map(|r| (0..v).map(|c| self.adj[r * v + c] as u8).collect())
                .collect();
            let m = AdjacencyMatrix::from_rows(&rows).expect("search only places off-diagonal 0/1 entries");
            if verify_dsrg(&m, &self.params).unwrap_or(false) {
                self.out.push(m);
            }
            return;
        }
        let k = self.params.k;
        let choices: Vec<usize> = (0..v).filter(|&j| j != i).collect();
        for set in choices.into_iter().combinations(k) {
            if set.iter().any(|&j| self.col[j] >= k) {
                continue;
            }
            for &j in &set {
                self.adj[i * v + j] = true;
                self.col[j] += 1;
            }
            // every later row r (other than j itself) may still add one arc into column j
            let reachable = (0..v).all(|j| {
                let later = (i + 1..v).filter(|&r| r != j).count();
                self.col[j] + later >= k
            });
            if reachable {
                let mut bumped = Vec::new();
                let ok = self.add_paths(i, &set, &mut bumped);
                if ok {
                    self.rows[i] = set.clone();
                    self.fill(i + 1);
                }
                for idx in bumped {
                    self.paths[idx] -= 1;
                }
            }
            for &j in &set {
                self.adj[i * v + j] = false;
                self.col[j] -= 1;
            }
        }
    }

    /// Adds the 2-paths completed by row `i` and reports whether every
    /// touched count stays within its cap.
    fn add_paths(&mut self, i: usize, set: &[usize], bumped: &mut Vec<usize>) -> bool {
        let v = self.v;
        let mut ok = true;
        // paths a -> i -> b for earlier rows a with an arc into i
        for a in 0..i {
            if !self.adj[a * v + i] {
                continue;
            }
            for &b in set {
                let idx = a * v + b;
                self.paths[idx] += 1;
                bumped.push(idx);
                ok &= self.paths[idx] <= self.cap(a, b);
            }
        }
        // paths i -> s -> b through earlier rows s
        for &s in set.iter().filter(|&&s| s < i) {
            for &b in &self.rows[s] {
                let idx = i * v + b;
                self.paths[idx] += 1;
                bumped.push(idx);
                ok &= self.paths[idx] <= self.cap(i, b);
            }
        }
        // a -> i -> i closes a loop through i only when a = i, impossible
        ok
    }
}
