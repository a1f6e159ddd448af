//! Genetic search over expansions of a row orbit matrix.

mod config;
mod individual;
mod search;

pub use config::GaConfig;
pub use individual::{crossover, mutate, new_bit, new_individual, Individual, Layout};
pub use search::{
    generate_population, run_ga, search, search_rng, work_on_four, DsrgFitness, FitnessFn, RunEnd, RunStats,
    SearchOutcome, SearchStats, Solution, UNIQUENESS_RETRY_CAP,
};
