use std::fmt;

use crate::error::{parse_err, DsrgError, Result};
use crate::perm::{is_prime, Permutation};

/// Vertex orbits of a cyclic group of prime order `p` (or of the trivial
/// group, `p = 1`).
///
/// Orbits are listed fixed points first (ascending), then the nontrivial
/// orbits by ascending representative. Each orbit starts at its smallest
/// vertex `x` and continues `x^g, x^{g^2}, ...`; block expansion relies on
/// this order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    orbits: Vec<Vec<usize>>,
    generator: Permutation,
    order: usize,
    /// vertex -> (orbit index, position within orbit)
    position: Vec<(usize, usize)>,
}

impl OrbitPartition {
    fn build(orbits: Vec<Vec<usize>>, generator: Permutation, order: usize) -> Self {
        let mut position = vec![(0, 0); generator.degree()];
        for (oi, orbit) in orbits.iter().enumerate() {
            for (pos, &x) in orbit.iter().enumerate() {
                position[x] = (oi, pos);
            }
        }
        OrbitPartition {
            orbits,
            generator,
            order,
            position,
        }
    }

    /// All-singleton partition of the trivial group. With it every orbit
    /// matrix entry is a fixed 1x1 bit.
    pub fn trivial(degree: usize) -> Self {
        let orbits = (0..degree).map(|x| vec![x]).collect();
        Self::build(orbits, Permutation::identity(degree), 1)
    }

    /// Partition with contiguous orbits of the given lengths, generated by
    /// the product of the cycles `(a a+1 ... a+p-1)`. Lengths must be in
    /// canonical order: all 1s before all `p`s.
    pub fn from_lengths(lengths: &[usize], p: usize) -> Result<Self> {
        if p == 1 {
            if lengths.iter().any(|&n| n != 1) {
                return Err(DsrgError::Shape("trivial action requires all orbit lengths 1".into()));
            }
            return Ok(Self::trivial(lengths.len()));
        }
        if !is_prime(p) {
            return Err(DsrgError::NotPrimeOrder(p));
        }
        if lengths.iter().any(|&n| n != 1 && n != p) {
            return Err(DsrgError::Shape(format!("orbit lengths must be 1 or {p}: {lengths:?}")));
        }
        if lengths.windows(2).any(|w| w[0] == p && w[1] == 1) {
            return Err(DsrgError::Shape(format!(
                "orbit lengths must list fixed points first: {lengths:?}"
            )));
        }
        if lengths.iter().all(|&n| n == 1) {
            return Err(DsrgError::Shape("a prime-order action must move some vertex".into()));
        }
        let degree: usize = lengths.iter().sum();
        let mut cycles = Vec::new();
        let mut start = 0;
        for &n in lengths {
            if n > 1 {
                cycles.push((start..start + n).collect::<Vec<_>>());
            }
            start += n;
        }
        let g = Permutation::from_cycles(degree, &cycles)?;
        orbits_of(&g)
    }

    pub fn degree(&self) -> usize {
        self.generator.degree()
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit(&self, i: usize) -> &[usize] {
        &self.orbits[i]
    }

    pub fn num_orbits(&self) -> usize {
        self.orbits.len()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }

    pub fn representatives(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o[0]).collect()
    }

    pub fn generator(&self) -> &Permutation {
        &self.generator
    }

    /// Group order: the prime `p`, or 1 for the trivial action.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Orbit index and generator power of a vertex.
    pub fn locate(&self, x: usize) -> (usize, usize) {
        self.position[x]
    }

    /// Parses `p=<prime>; lengths=<n_1,...,n_b>; generator=<cycles>`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = None;
        let mut lengths = None;
        let mut generator = None;
        for field in s.split(';') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| parse_err(1, format!("expected key=value, found {field:?}")))?;
            match key.trim() {
                "p" => {
                    p = Some(value.trim().parse::<usize>().map_err(|e| parse_err(1, e.to_string()))?)
                }
                "lengths" => {
                    lengths = Some(
                        value
                            .split(',')
                            .map(|t| t.trim().parse::<usize>().map_err(|e| parse_err(1, e.to_string())))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "generator" => generator = Some(value.trim().to_string()),
                other => return Err(parse_err(1, format!("unknown key {other:?}"))),
            }
        }
        let p = p.ok_or_else(|| parse_err(1, "missing p"))?;
        let lengths: Vec<usize> = lengths.ok_or_else(|| parse_err(1, "missing lengths"))?;
        let generator = generator.ok_or_else(|| parse_err(1, "missing generator"))?;
        let degree = lengths.iter().sum();
        let g = Permutation::parse_cycles(&generator, degree)?;
        let part = if p == 1 {
            if !g.is_identity() {
                return Err(parse_err(1, "p=1 requires the identity generator"));
            }
            OrbitPartition::trivial(degree)
        } else {
            orbits_of(&g)?
        };
        if part.order != p || part.lengths() != lengths {
            return Err(parse_err(
                1,
                format!("generator {generator} does not produce p={p}, lengths={lengths:?}"),
            ));
        }
        Ok(part)
    }
}

impl fmt::Display for OrbitPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lengths: Vec<String> = self.lengths().iter().map(|n| n.to_string()).collect();
        write!(
            f,
            "p={}; lengths={}; generator={}",
            self.order,
            lengths.join(","),
            self.generator
        )
    }
}

/// Orbits of the cyclic group generated by `g`, which must have prime order.
pub fn orbits_of(g: &Permutation) -> Result<OrbitPartition> {
    let order = g.order();
    if !is_prime(order) {
        return Err(DsrgError::NotPrimeOrder(order));
    }
    let n = g.degree();
    let mut fixed = Vec::new();
    let mut moved = Vec::new();
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut x = g.apply(start);
        while x != start {
            seen[x] = true;
            orbit.push(x);
            x = g.apply(x);
        }
        if orbit.len() == 1 {
            fixed.push(orbit);
        } else {
            moved.push(orbit);
        }
    }
    fixed.extend(moved);
    Ok(OrbitPartition::build(fixed, g.clone(), order))
}
