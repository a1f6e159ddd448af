use rand::seq::index::sample;
use rand::Rng;

use crate::bits::{enumerate_bit_candidates, write_block, BitSpec};
use crate::digraph::AdjacencyMatrix;
use crate::error::{DsrgError, Result};
use crate::orbit_matrix::{validate_row_orbit_matrix, RowOrbitMatrix};
use crate::orbits::OrbitPartition;
use crate::params::DsrgParams;

/// Everything an individual needs to know about the prescribed structure:
/// the orbit matrix, the orbits, and the admissible first rows of every
/// bit. Built once per search and shared read-only.
#[derive(Debug, Clone)]
pub struct Layout {
    orbit_matrix: RowOrbitMatrix,
    partition: OrbitPartition,
    specs: Vec<BitSpec>,
    candidates: Vec<Vec<Vec<u8>>>,
    free: Vec<usize>,
}

impl Layout {
    pub fn new(orbit_matrix: &RowOrbitMatrix, partition: &OrbitPartition) -> Result<Self> {
        if partition.lengths() != orbit_matrix.lengths() {
            return Err(DsrgError::Shape(format!(
                "partition lengths {:?} differ from orbit matrix lengths {:?}",
                partition.lengths(),
                orbit_matrix.lengths()
            )));
        }
        if partition.order() != orbit_matrix.prime() {
            return Err(DsrgError::Shape(format!(
                "partition has group order {}, orbit matrix expects {}",
                partition.order(),
                orbit_matrix.prime()
            )));
        }
        if let Err(v) = validate_row_orbit_matrix(orbit_matrix) {
            return Err(DsrgError::InvalidOrbitMatrix(v));
        }
        let b = orbit_matrix.b();
        let n = orbit_matrix.lengths();
        let mut specs = Vec::with_capacity(b * b);
        let mut candidates = Vec::with_capacity(b * b);
        for i in 0..b {
            for j in 0..b {
                let spec = BitSpec::new(i, j, orbit_matrix.get(i, j), n[i], n[j]);
                candidates.push(enumerate_bit_candidates(&spec, partition.order())?);
                specs.push(spec);
            }
        }
        let free = (0..b * b).filter(|&idx| candidates[idx].len() > 1).collect();
        Ok(Layout {
            orbit_matrix: orbit_matrix.clone(),
            partition: partition.clone(),
            specs,
            candidates,
            free,
        })
    }

    pub fn params(&self) -> &DsrgParams {
        self.orbit_matrix.params()
    }

    pub fn orbit_matrix(&self) -> &RowOrbitMatrix {
        &self.orbit_matrix
    }

    pub fn partition(&self) -> &OrbitPartition {
        &self.partition
    }

    /// Number of genes (orbits).
    pub fn genes(&self) -> usize {
        self.orbit_matrix.b()
    }

    pub fn spec(&self, i: usize, j: usize) -> &BitSpec {
        &self.specs[i * self.genes() + j]
    }

    pub fn candidates(&self, i: usize, j: usize) -> &[Vec<u8>] {
        &self.candidates[i * self.genes() + j]
    }

    /// Flat indices `i * b + j` of the non-fixed bits.
    pub fn free_bits(&self) -> &[usize] {
        &self.free
    }

    /// Size of the search space, saturating.
    pub fn search_space_size(&self) -> u128 {
        self.candidates
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128))
    }

    fn expand(&self, choices: &[u32]) -> AdjacencyMatrix {
        let b = self.genes();
        let mut m = AdjacencyMatrix::zeros(self.params().v);
        for i in 0..b {
            for j in 0..b {
                let fr = &self.candidates[i * b + j][choices[i * b + j] as usize];
                write_block(&mut m, &self.partition, i, j, fr);
            }
        }
        m
    }

    /// Individual with the given candidate index for every bit, row-major.
    pub fn individual_from_choices(&self, choices: Vec<u32>) -> Result<Individual> {
        let b = self.genes();
        if choices.len() != b * b {
            return Err(DsrgError::Shape(format!("expected {} bit choices, got {}", b * b, choices.len())));
        }
        for (idx, &c) in choices.iter().enumerate() {
            if c as usize >= self.candidates[idx].len() {
                return Err(DsrgError::Shape(format!("bit {idx} has no candidate {c}")));
            }
        }
        let matrix = self.expand(&choices);
        Ok(Individual {
            choices,
            matrix,
            fitness: None,
        })
    }

    /// Reads the bit choices back from a matrix that expands this layout.
    pub fn individual_from_matrix(&self, m: &AdjacencyMatrix) -> Option<Individual> {
        let b = self.genes();
        let mut choices = Vec::with_capacity(b * b);
        for i in 0..b {
            for j in 0..b {
                let fr = crate::bits::read_first_row(m, &self.partition, i, j);
                let idx = self.candidates[i * b + j].iter().position(|c| *c == fr)?;
                choices.push(idx as u32);
            }
        }
        let ind = self.individual_from_choices(choices).ok()?;
        (ind.matrix == *m).then_some(ind)
    }
}

/// A candidate adjacency matrix that expands the prescribed orbit matrix.
///
/// Gene `i` is block row `i`; bit `(i, j)` is stored as an index into the
/// layout's candidate list for that entry. The matrix is always the
/// expansion of the choices.
#[derive(Debug, Clone)]
pub struct Individual {
    choices: Vec<u32>,
    matrix: AdjacencyMatrix,
    fitness: Option<u64>,
}

impl PartialEq for Individual {
    fn eq(&self, other: &Self) -> bool {
        self.choices == other.choices
    }
}

impl Eq for Individual {}

impl Individual {
    pub fn matrix(&self) -> &AdjacencyMatrix {
        &self.matrix
    }

    pub fn choices(&self) -> &[u32] {
        &self.choices
    }

    /// Cached fitness; `None` after a modification until re-evaluated.
    pub fn fitness(&self) -> Option<u64> {
        self.fitness
    }

    pub fn set_fitness(&mut self, f: u64) {
        self.fitness = Some(f);
    }

    pub fn first_row<'a>(&self, layout: &'a Layout, i: usize, j: usize) -> &'a [u8] {
        &layout.candidates(i, j)[self.choices[i * layout.genes() + j] as usize]
    }
}

/// Uniform random candidate index; a fixed bit draws nothing from `rng`.
fn draw(count: usize, rng: &mut impl Rng) -> u32 {
    if count == 1 {
        0
    } else {
        rng.gen_range(0..count) as u32
    }
}

/// A uniformly random admissible first row for `spec`.
pub fn new_bit(spec: &BitSpec, p: usize, rng: &mut impl Rng) -> Result<Vec<u8>> {
    let mut cands = enumerate_bit_candidates(spec, p)?;
    let idx = draw(cands.len(), rng) as usize;
    Ok(cands.swap_remove(idx))
}

/// Random expansion of the layout's orbit matrix, bit by bit in row-major order.
pub fn new_individual(layout: &Layout, rng: &mut impl Rng) -> Individual {
    let choices = layout.candidates.iter().map(|c| draw(c.len(), rng)).collect();
    layout
        .individual_from_choices(choices)
        .expect("drawn choices are in range")
}

/// Redraws `n_bits` distinct non-fixed bits (all of them if fewer exist).
/// A redraw may return the current pattern.
pub fn mutate(layout: &Layout, ind: &Individual, n_bits: usize, rng: &mut impl Rng) -> Result<Individual> {
    let free = layout.free_bits();
    if free.is_empty() {
        return Err(DsrgError::NoFreeBits);
    }
    let amount = n_bits.min(free.len());
    let mut choices = ind.choices.clone();
    let mut matrix = ind.matrix.clone();
    let b = layout.genes();
    for pick in sample(rng, free.len(), amount).into_iter() {
        let idx = free[pick];
        choices[idx] = draw(layout.candidates[idx].len(), rng);
        let (i, j) = (idx / b, idx % b);
        write_block(&mut matrix, &layout.partition, i, j, &layout.candidates[idx][choices[idx] as usize]);
    }
    Ok(Individual {
        choices,
        matrix,
        fitness: None,
    })
}

/// Swaps `n_genes` randomly chosen block rows between the parents.
pub fn crossover(
    layout: &Layout,
    p1: &Individual,
    p2: &Individual,
    n_genes: usize,
    rng: &mut impl Rng,
) -> Result<(Individual, Individual)> {
    let b = layout.genes();
    if n_genes > b {
        return Err(DsrgError::TooManyGenes {
            requested: n_genes,
            available: b,
        });
    }
    let mut c1 = Individual {
        fitness: None,
        ..p1.clone()
    };
    let mut c2 = Individual {
        fitness: None,
        ..p2.clone()
    };
    for gene in sample(rng, b, n_genes).into_iter() {
        c1.choices[gene * b..(gene + 1) * b].copy_from_slice(&p2.choices[gene * b..(gene + 1) * b]);
        c2.choices[gene * b..(gene + 1) * b].copy_from_slice(&p1.choices[gene * b..(gene + 1) * b]);
        for &x in layout.partition.orbit(gene) {
            for y in 0..layout.params().v {
                c1.matrix.set(x, y, p2.matrix.get(x, y));
                c2.matrix.set(x, y, p1.matrix.get(x, y));
            }
        }
    }
    Ok((c1, c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit_matrix::derive_row_orbit_matrix;
    use crate::perm::Permutation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cycle_layout() -> Layout {
        let params = DsrgParams::new(3, 1, 0, 0, 1).unwrap();
        let m = RowOrbitMatrix::new(params, 3, vec![3], vec![vec![1]]).unwrap();
        Layout::new(&m, &OrbitPartition::from_lengths(&[3], 3).unwrap()).unwrap()
    }

    #[test]
    fn cycle_individuals_are_three_cycles() {
        let layout = cycle_layout();
        assert_eq!(layout.free_bits(), &[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = *layout.params();
        for _ in 0..20 {
            let ind = new_individual(&layout, &mut rng);
            assert!(crate::digraph::verify_dsrg(ind.matrix(), &params).unwrap());
        }
    }

    #[test]
    fn all_fixed_layout_reproduces_matrix() {
        let params = DsrgParams::new(3, 1, 0, 0, 1).unwrap();
        let c3 = AdjacencyMatrix::directed_cycle(3);
        let triv = OrbitPartition::trivial(3);
        let m = derive_row_orbit_matrix(&c3, &triv, &params).unwrap();
        let layout = Layout::new(&m, &triv).unwrap();
        assert!(layout.free_bits().is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ind = new_individual(&layout, &mut rng);
        assert_eq!(ind.matrix(), &c3);
        assert_eq!(mutate(&layout, &ind, 1, &mut rng), Err(DsrgError::NoFreeBits));
    }

    #[test]
    fn crossover_extremes() {
        let layout = cycle_layout();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = layout.individual_from_choices(vec![0]).unwrap();
        let b = layout.individual_from_choices(vec![1]).unwrap();
        let (c1, c2) = crossover(&layout, &a, &b, 1, &mut rng).unwrap();
        assert_eq!((&c1, &c2), (&b, &a));
        assert_eq!(c1.matrix(), b.matrix());
        let (c1, c2) = crossover(&layout, &a, &b, 0, &mut rng).unwrap();
        assert_eq!((&c1, &c2), (&a, &b));
        assert!(matches!(crossover(&layout, &a, &b, 2, &mut rng), Err(DsrgError::TooManyGenes { .. })));
    }

    #[test]
    fn rejects_mismatched_partition() {
        let params = DsrgParams::new(3, 1, 0, 0, 1).unwrap();
        let m = RowOrbitMatrix::new(params, 3, vec![3], vec![vec![1]]).unwrap();
        assert!(Layout::new(&m, &OrbitPartition::trivial(3)).is_err());
        let bad = RowOrbitMatrix::new(params, 3, vec![3], vec![vec![2]]).unwrap();
        let part = OrbitPartition::from_lengths(&[3], 3).unwrap();
        assert!(Layout::new(&bad, &part).is_err());
    }

    #[test]
    fn matrix_round_trips_through_choices() {
        let layout = cycle_layout();
        let g = Permutation::parse_cycles("(0 1 2)", 3).unwrap();
        assert_eq!(layout.partition().generator(), &g);
        for c in 0..2 {
            let ind = layout.individual_from_choices(vec![c]).unwrap();
            assert_eq!(layout.individual_from_matrix(ind.matrix()), Some(ind));
        }
    }
}
