use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{DsrgError, Result};

/// Largest vertex count accepted. Every count the library computes
/// (fitness totals, path counts) stays well inside `u64` below this.
pub const MAX_VERTICES: usize = 10_000;

/// Parameter tuple `(v, k, t, lambda, mu)` of a directed strongly regular graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DsrgParams {
    pub v: usize,
    pub k: usize,
    pub t: usize,
    pub lambda: usize,
    pub mu: usize,
}

impl DsrgParams {
    /// Builds a tuple without checking feasibility; only the vertex count
    /// is bounded. Use [`check_feasibility`] to gate a search.
    pub fn new(v: usize, k: usize, t: usize, lambda: usize, mu: usize) -> Result<Self> {
        if v == 0 {
            return Err(DsrgError::InvalidParams("v must be positive".into()));
        }
        if v > MAX_VERTICES {
            return Err(DsrgError::InvalidParams(format!(
                "v = {v} exceeds the supported maximum {MAX_VERTICES}"
            )));
        }
        Ok(DsrgParams { v, k, t, lambda, mu })
    }

    /// Left and right sides of `k^2 = t + lambda*k + mu*(v-k-1)`.
    /// The right side is `None` when `k >= v` (the non-neighbour count is negative).
    pub fn counting_identity(&self) -> (u128, Option<u128>) {
        let lhs = (self.k as u128) * (self.k as u128);
        let rhs = (self.v as u128)
            .checked_sub(self.k as u128 + 1)
            .map(|non| self.t as u128 + self.lambda as u128 * self.k as u128 + self.mu as u128 * non);
        (lhs, rhs)
    }

    pub fn bounds_hold(&self) -> bool {
        self.k > 0
            && self.k < self.v
            && self.t <= self.k
            && self.lambda <= self.k
            && self.mu <= self.k
    }
}

impl fmt::Display for DsrgParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{},{})", self.v, self.k, self.t, self.lambda, self.mu)
    }
}

/// Necessary condition for existence: parameter bounds plus the counting
/// identity obtained by multiplying the defining matrix equation by `J`.
pub fn check_feasibility(params: &DsrgParams) -> bool {
    if !params.bounds_hold() {
        return false;
    }
    let (lhs, rhs) = params.counting_identity();
    rhs == Some(lhs)
}

/// Fitness of a DSRG adjacency matrix: `v*t + v*k*lambda + v*(v-k-1)*mu`.
/// Returns 0 for `k >= v`, where no graph exists.
pub fn max_fitness(params: &DsrgParams) -> u64 {
    let DsrgParams { v, k, t, lambda, mu } = *params;
    let (v, k, t, lambda, mu) = (v as u64, k as u64, t as u64, lambda as u64, mu as u64);
    let non = v.saturating_sub(k + 1);
    v * t + v * k * lambda + v * non * mu
}
