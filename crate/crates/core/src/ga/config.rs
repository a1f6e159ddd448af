use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{DsrgError, Result};

/// Genetic search settings. Serialized keys keep the names of the tuned
/// parameter list (`POP`, `MaxNrOfGenerations`, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaConfig {
    #[serde(rename = "POP")]
    pub pop_size: usize,
    #[serde(rename = "MaxNrOfGenerations")]
    pub max_generations: u64,
    #[serde(rename = "p_m")]
    pub mutation_probability: f64,
    #[serde(rename = "p_c")]
    pub crossover_probability: f64,
    #[serde(rename = "NrGenesForCrossover")]
    pub genes_per_crossover: usize,
    #[serde(rename = "NrBitsForMutation")]
    pub bits_per_mutation: usize,
    /// Generations without an increase of the best fitness before a partial reset.
    #[serde(rename = "FitnessForDSRGNrOfRepeatsMax")]
    pub stagnation_threshold: u64,
    #[serde(rename = "MaxNrOfPartialResets")]
    pub max_partial_resets: usize,
    #[serde(rename = "MaxNrOfCompleteResets")]
    pub max_complete_resets: usize,
    #[serde(rename = "StartingPercentage")]
    pub starting_percentage: f64,
    #[serde(rename = "seed")]
    pub rng_seed: u64,
    #[serde(rename = "wall_clock_budget_secs", default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_budget_secs: Option<f64>,
    /// Stop at the first solution instead of resetting to look for more.
    #[serde(default)]
    pub stop_on_first: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            pop_size: 100,
            max_generations: 100_000,
            mutation_probability: 1.0,
            crossover_probability: 1.0,
            genes_per_crossover: 1,
            bits_per_mutation: 1,
            stagnation_threshold: 100,
            max_partial_resets: 10,
            max_complete_resets: 100,
            starting_percentage: 0.10,
            rng_seed: 0,
            wall_clock_budget_secs: None,
            stop_on_first: false,
        }
    }
}

impl GaConfig {
    pub fn with_seed(seed: u64) -> Self {
        GaConfig {
            rng_seed: seed,
            ..GaConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(DsrgError::InvalidConfig(msg));
        if self.pop_size == 0 || !self.pop_size.is_multiple_of(4) {
            return bad(format!("POP = {} must be a positive multiple of 4", self.pop_size));
        }
        for (name, p) in [
            ("p_m", self.mutation_probability),
            ("p_c", self.crossover_probability),
            ("StartingPercentage", self.starting_percentage),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is outside [0, 1]"));
            }
        }
        if self.bits_per_mutation == 0 {
            return bad("NrBitsForMutation must be at least 1".into());
        }
        if self.stagnation_threshold == 0 {
            return bad("FitnessForDSRGNrOfRepeatsMax must be at least 1".into());
        }
        if let Some(s) = self.wall_clock_budget_secs {
            if !(s.is_finite() && s >= 0.0) {
                return bad(format!("wall-clock budget {s} is not a non-negative number of seconds"));
            }
        }
        Ok(())
    }

    /// Individuals kept across a partial reset: `ceil(StartingPercentage * POP)`.
    pub fn retained_count(&self) -> usize {
        let exact = self.starting_percentage * self.pop_size as f64;
        // 0.1 * 100 is not exactly 10 in binary; ignore the rounding noise
        ((exact - 1e-9).ceil().max(0.0) as usize).min(self.pop_size)
    }

    pub fn wall_clock_budget(&self) -> Option<Duration> {
        self.wall_clock_budget_secs.map(Duration::from_secs_f64)
    }
}
