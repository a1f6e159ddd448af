use std::io::Write;
use std::time::Instant;

use log::warn;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::GaConfig;
use super::individual::{crossover, mutate, new_individual, Individual, Layout};
use crate::digraph::{fitness_unchecked, verify_dsrg, AdjacencyMatrix};
use crate::error::{DsrgError, Result};
use crate::orbit_matrix::RowOrbitMatrix;
use crate::orbits::OrbitPartition;
use crate::params::{check_feasibility, max_fitness, DsrgParams};

/// Cap on the uniqueness loops (distinct parents, novel children, distinct
/// initial individuals). On exhaustion the current candidate is accepted.
pub const UNIQUENESS_RETRY_CAP: usize = 1000;

/// Scores individuals; the search stops a run once `target` is reached.
pub trait FitnessFn {
    fn evaluate(&self, m: &AdjacencyMatrix) -> u64;
    fn target(&self) -> u64;
}

/// The capped 2-path fitness, maximal exactly on DSRG adjacency matrices.
#[derive(Debug, Clone, Copy)]
pub struct DsrgFitness(pub DsrgParams);

impl FitnessFn for DsrgFitness {
    fn evaluate(&self, m: &AdjacencyMatrix) -> u64 {
        fitness_unchecked(m, &self.0)
    }

    fn target(&self) -> u64 {
        max_fitness(&self.0)
    }
}

/// RNG used by every search: ChaCha with 8 rounds, seeded from a `u64`.
pub fn search_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunEnd {
    Solved,
    Stagnation,
    GenerationCap,
    Budget,
}

/// One population lifetime between resets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub complete_reset: usize,
    pub partial_reset: usize,
    /// individuals carried over from the previous run
    pub seeded: usize,
    pub generations: u64,
    pub best_fitness: u64,
    pub end: RunEnd,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub matrix: AdjacencyMatrix,
    pub complete_reset: usize,
    pub partial_reset: usize,
    pub generation: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub runs: Vec<RunStats>,
    /// `(total generations so far, best fitness)` whenever the best changes
    /// or a new population starts
    pub trajectory: Vec<(u64, u64)>,
    pub retry_exhaustions: u64,
    pub duplicate_fills: u64,
}

/// Result of a search. `elapsed_secs` is excluded from serialization so
/// that identical configurations serialize identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub seed: u64,
    pub target_fitness: u64,
    pub solutions: Vec<Solution>,
    pub stats: SearchStats,
    pub budget_exhausted: bool,
    #[serde(skip)]
    pub elapsed_secs: f64,
}

impl SearchOutcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outcome serializes")
    }
}

fn contains(pop: &[Individual], ind: &Individual) -> bool {
    pop.iter().any(|x| x == ind)
}

fn fitness_of(ind: &Individual) -> u64 {
    ind.fitness().expect("population members are evaluated")
}

/// Population indices by fitness, best first; ties go to the lower index.
fn ranked(pop: &[Individual], indices: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut idx: Vec<usize> = indices.collect();
    idx.sort_by_key(|&i| (std::cmp::Reverse(fitness_of(&pop[i])), i));
    idx
}

/// Keeps `starting` and fills up to `target_size` with fresh random
/// individuals, rejecting duplicates of current members. When the search
/// space is too small, duplicates are admitted after the retry cap.
pub fn generate_population(
    layout: &Layout,
    target_size: usize,
    starting: Vec<Individual>,
    rng: &mut impl Rng,
) -> (Vec<Individual>, u64) {
    assert!(starting.len() <= target_size, "starting population larger than target");
    let mut pop = starting;
    let mut duplicate_fills = 0;
    while pop.len() < target_size {
        let mut candidate = new_individual(layout, rng);
        let mut tries = 1;
        while contains(&pop, &candidate) && tries < UNIQUENESS_RETRY_CAP {
            candidate = new_individual(layout, rng);
            tries += 1;
        }
        if contains(&pop, &candidate) {
            if duplicate_fills == 0 {
                warn!("search space too small for {target_size} distinct individuals; admitting duplicates");
            }
            duplicate_fills += 1;
        }
        pop.push(candidate);
    }
    (pop, duplicate_fills)
}

struct Engine<'a, F: FitnessFn, R: Rng> {
    layout: &'a Layout,
    config: &'a GaConfig,
    fitness: &'a F,
    rng: &'a mut R,
    retry_exhaustions: u64,
}

impl<F: FitnessFn, R: Rng> Engine<'_, F, R> {
    fn evaluate(&self, ind: &mut Individual) {
        if ind.fitness().is_none() {
            ind.set_fitness(self.fitness.evaluate(ind.matrix()));
        }
    }

    fn mutate(&mut self, ind: &Individual) -> Individual {
        mutate(self.layout, ind, self.config.bits_per_mutation, self.rng).expect("layout has free bits")
    }

    /// Mutates `child` until the result is not already in the population.
    fn novel_mutation(&mut self, pop: &[Individual], child: &Individual) -> Individual {
        let mut mutated = self.mutate(child);
        let mut tries = 1;
        while contains(pop, &mutated) {
            if tries == UNIQUENESS_RETRY_CAP {
                warn!("no novel mutation after {tries} attempts; keeping a duplicate child");
                self.retry_exhaustions += 1;
                break;
            }
            mutated = self.mutate(child);
            tries += 1;
        }
        mutated
    }

    /// 4-tournament on positions `start..start+4`: the two best become
    /// parents, their mutated children replace the two worst.
    fn work_on_four(&mut self, start: usize, pop: &mut [Individual]) {
        let order = ranked(pop, start..start + 4);
        let parent1 = pop[order[0]].clone();
        let mut parent2 = pop[order[1]].clone();
        let mut tries = 0;
        while parent1 == parent2 {
            if tries == UNIQUENESS_RETRY_CAP {
                warn!("parents still equal after {tries} mutations");
                self.retry_exhaustions += 1;
                break;
            }
            tries += 1;
            let mutated = self.mutate(&parent2);
            if !contains(pop, &mutated) {
                parent2 = mutated;
            }
        }
        let (child1, child2) = if self.rng.gen_bool(self.config.crossover_probability) {
            let genes = self.config.genes_per_crossover;
            crossover(self.layout, &parent1, &parent2, genes, self.rng).expect("gene count validated")
        } else {
            (parent1, parent2)
        };
        let mut child1 = if self.rng.gen_bool(self.config.mutation_probability) {
            self.novel_mutation(pop, &child1)
        } else {
            child1
        };
        let mut child2 = if self.rng.gen_bool(self.config.mutation_probability) {
            self.novel_mutation(pop, &child2)
        } else {
            child2
        };
        self.evaluate(&mut child1);
        self.evaluate(&mut child2);
        pop[order[2]] = child1;
        pop[order[3]] = child2;
    }
}

/// Runs one 4-tournament on `population[group_start..group_start + 4]`.
pub fn work_on_four<F: FitnessFn>(
    group_start: usize,
    population: &mut [Individual],
    layout: &Layout,
    config: &GaConfig,
    fitness: &F,
    rng: &mut impl Rng,
) -> Result<()> {
    if population.len() < group_start + 4 {
        return Err(DsrgError::InvalidConfig(format!(
            "tournament at {group_start} needs 4 individuals, population has {}",
            population.len()
        )));
    }
    if layout.free_bits().is_empty() {
        return Err(DsrgError::NoFreeBits);
    }
    if config.genes_per_crossover > layout.genes() {
        return Err(DsrgError::TooManyGenes {
            requested: config.genes_per_crossover,
            available: layout.genes(),
        });
    }
    let mut engine = Engine {
        layout,
        config,
        fitness,
        rng,
        retry_exhaustions: 0,
    };
    for ind in population.iter_mut() {
        engine.evaluate(ind);
    }
    engine.work_on_four(group_start, population);
    Ok(())
}

/// Genetic search for expansions of `orbit_matrix` that are DSRGs.
pub fn run_ga(orbit_matrix: &RowOrbitMatrix, partition: &OrbitPartition, config: &GaConfig) -> Result<SearchOutcome> {
    let params = *orbit_matrix.params();
    if !check_feasibility(&params) {
        return Err(DsrgError::InvalidParams(format!("{params} fails the feasibility check")));
    }
    let layout = Layout::new(orbit_matrix, partition)?;
    search(&layout, config, &DsrgFitness(params), None)
}

/// The search loop with a pluggable fitness and an optional per-generation
/// log (`gen f_best f_mean resets_partial resets_complete`).
///
/// Complete resets wrap partial resets, which wrap generations. A run ends
/// on reaching the target fitness, after `MaxNrOfGenerations`, or after
/// `FitnessForDSRGNrOfRepeatsMax` generations without improvement; the
/// next run keeps the best `StartingPercentage` of the population (none
/// after a complete reset). Solutions are collected and, unless
/// `stop_on_first` is set, excluded from the carried-over individuals.
pub fn search<F: FitnessFn>(
    layout: &Layout,
    config: &GaConfig,
    fitness: &F,
    mut log: Option<&mut dyn Write>,
) -> Result<SearchOutcome> {
    config.validate()?;
    if config.genes_per_crossover > layout.genes() {
        return Err(DsrgError::TooManyGenes {
            requested: config.genes_per_crossover,
            available: layout.genes(),
        });
    }
    let started = Instant::now();
    let budget = config.wall_clock_budget();
    let target = fitness.target();
    let params = *layout.params();
    let mut rng = search_rng(config.rng_seed);
    let mut outcome = SearchOutcome {
        seed: config.rng_seed,
        target_fitness: target,
        solutions: Vec::new(),
        stats: SearchStats {
            runs: Vec::new(),
            trajectory: Vec::new(),
            retry_exhaustions: 0,
            duplicate_fills: 0,
        },
        budget_exhausted: false,
        elapsed_secs: 0.0,
    };
    let mut seen_solutions = std::collections::HashSet::new();
    let mut record = |pop: &[Individual], outcome: &mut SearchOutcome, cr: usize, pr: usize, generation: u64| {
        for ind in pop.iter().filter(|i| fitness_of(i) >= target) {
            if !verify_dsrg(ind.matrix(), &params).unwrap_or(false) {
                continue;
            }
            if seen_solutions.insert(ind.matrix().clone()) {
                outcome.solutions.push(Solution {
                    matrix: ind.matrix().clone(),
                    complete_reset: cr,
                    partial_reset: pr,
                    generation,
                });
            }
        }
    };

    if layout.free_bits().is_empty() {
        // a single expansion: nothing to evolve
        let mut ind = new_individual(layout, &mut rng);
        ind.set_fitness(fitness.evaluate(ind.matrix()));
        let best = fitness_of(&ind);
        record(std::slice::from_ref(&ind), &mut outcome, 0, 0, 0);
        outcome.stats.trajectory.push((0, best));
        outcome.stats.runs.push(RunStats {
            complete_reset: 0,
            partial_reset: 0,
            seeded: 0,
            generations: 0,
            best_fitness: best,
            end: if best >= target { RunEnd::Solved } else { RunEnd::Stagnation },
        });
        outcome.elapsed_secs = started.elapsed().as_secs_f64();
        return Ok(outcome);
    }

    let mut engine = Engine {
        layout,
        config,
        fitness,
        rng: &mut rng,
        retry_exhaustions: 0,
    };
    let mut total_generations = 0u64;
    'complete: for complete in 0..config.max_complete_resets {
        let mut starting: Vec<Individual> = Vec::new();
        for partial in 0..config.max_partial_resets {
            let seeded = starting.len();
            let (mut pop, dups) = generate_population(layout, config.pop_size, std::mem::take(&mut starting), engine.rng);
            outcome.stats.duplicate_fills += dups;
            for ind in pop.iter_mut() {
                engine.evaluate(ind);
            }
            let mut f_best = pop.iter().map(fitness_of).max().unwrap_or(0);
            outcome.stats.trajectory.push((total_generations, f_best));
            record(&pop, &mut outcome, complete, partial, 0);
            let mut generations = 0u64;
            let mut repeats = 0u64;
            let end = loop {
                if f_best >= target {
                    break RunEnd::Solved;
                }
                if generations >= config.max_generations {
                    break RunEnd::GenerationCap;
                }
                if budget.is_some_and(|b| started.elapsed() >= b) {
                    break RunEnd::Budget;
                }
                pop.shuffle(engine.rng);
                for start in (0..pop.len()).step_by(4) {
                    engine.work_on_four(start, &mut pop);
                }
                generations += 1;
                total_generations += 1;
                let best = pop.iter().map(fitness_of).max().unwrap_or(0);
                if best > f_best {
                    f_best = best;
                    repeats = 0;
                    outcome.stats.trajectory.push((total_generations, f_best));
                } else {
                    repeats += 1;
                }
                if let Some(w) = log.as_deref_mut() {
                    let mean = pop.iter().map(fitness_of).sum::<u64>() as f64 / pop.len() as f64;
                    writeln!(w, "{generations} {f_best} {mean:.3} {partial} {complete}")?;
                }
                record(&pop, &mut outcome, complete, partial, generations);
                if repeats == config.stagnation_threshold && f_best < target {
                    break RunEnd::Stagnation;
                }
            };
            outcome.stats.runs.push(RunStats {
                complete_reset: complete,
                partial_reset: partial,
                seeded,
                generations,
                best_fitness: f_best,
                end,
            });
            match end {
                RunEnd::Budget => {
                    outcome.budget_exhausted = true;
                    break 'complete;
                }
                RunEnd::Solved if config.stop_on_first => break 'complete,
                _ => {}
            }
            let keep = config.retained_count();
            starting = ranked(&pop, 0..pop.len())
                .into_iter()
                .filter(|&i| fitness_of(&pop[i]) < target)
                .take(keep)
                .map(|i| pop[i].clone())
                .collect();
        }
    }
    outcome.stats.retry_exhaustions = engine.retry_exhaustions;
    outcome.elapsed_secs = started.elapsed().as_secs_f64();
    Ok(outcome)
}
