//! End-to-end workflows: deriving orbit matrices from a known graph, and
//! running seeded searches into a catalog.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use log::info;
use rayon::prelude::*;

use dsrg::automorphism::find_prime_order_automorphisms;
use dsrg::catalog::{Catalog, CatalogEntry, Insert, Provenance};
use dsrg::digraph::{dsrg_violation, verify_dsrg};
use dsrg::error::{DsrgError, Result};
use dsrg::ga::{search, DsrgFitness, GaConfig, Layout, SearchOutcome};
use dsrg::io::GraphFile;
use dsrg::orbit_matrix::{derive_row_orbit_matrix, RowOrbitMatrix};
use dsrg::orbits::orbits_of;
use dsrg::params::check_feasibility;
use dsrg::perm::Permutation;

use crate::manifest::ResolvedRun;

/// One distinct orbit matrix with the automorphisms that induce it.
#[derive(Debug, Clone)]
pub struct DerivedMatrix {
    pub matrix: RowOrbitMatrix,
    pub generators: Vec<Permutation>,
}

/// Distinct row orbit matrices of `graph` under its order-`p`
/// automorphisms, in order of first appearance among the sorted
/// automorphisms.
pub fn derive(graph: &GraphFile, p: usize) -> Result<Vec<DerivedMatrix>> {
    if let Some(v) = dsrg_violation(&graph.matrix, &graph.params)? {
        return Err(DsrgError::InvalidMatrix(format!("graph is not a DSRG{}: {v}", graph.params)));
    }
    let mut out: Vec<DerivedMatrix> = Vec::new();
    for g in find_prime_order_automorphisms(&graph.matrix, p)? {
        let part = orbits_of(&g)?;
        let m = derive_row_orbit_matrix(&graph.matrix, &part, &graph.params)?;
        match out.iter_mut().find(|d| d.matrix == m) {
            Some(d) => d.generators.push(g),
            None => out.push(DerivedMatrix {
                matrix: m,
                generators: vec![g],
            }),
        }
    }
    Ok(out)
}

/// Writes `om_NNN.om` per matrix plus `index.tsv`; returns the written paths.
pub fn write_derived(dir: &Path, derived: &[DerivedMatrix]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut index = String::from("file\tlengths\tautomorphisms\tgenerator\n");
    let mut paths = Vec::new();
    for (i, d) in derived.iter().enumerate() {
        let name = format!("om_{:03}.om", i + 1);
        let path = dir.join(&name);
        fs::write(&path, d.matrix.to_string())?;
        let lengths: Vec<String> = d.matrix.lengths().iter().map(usize::to_string).collect();
        index.push_str(&format!(
            "{name}\t{}\t{}\t{}\n",
            lengths.join(","),
            d.generators.len(),
            d.generators[0]
        ));
        paths.push(path);
    }
    fs::write(dir.join("index.tsv"), index)?;
    Ok(paths)
}

/// Results of a multi-seed search.
#[derive(Debug)]
pub struct SearchReport {
    pub catalog: Catalog,
    pub outcomes: Vec<SearchOutcome>,
    /// Solutions over all runs, before isomorphism reduction.
    pub solutions: usize,
    pub logs: Vec<String>,
}

impl SearchReport {
    pub fn budget_exhausted(&self) -> bool {
        self.outcomes.iter().any(|o| o.budget_exhausted)
    }
}

/// Runs `run.runs` searches with seeds `base_seed, base_seed + 1, ...` in
/// parallel and collects the verified solutions into one catalog.
pub fn run_search(run: &ResolvedRun, base_seed: u64) -> Result<SearchReport> {
    let params = *run.orbit_matrix.params();
    if !check_feasibility(&params) {
        return Err(DsrgError::InvalidParams(format!("{params} fails the counting identity")));
    }
    let layout = Layout::new(&run.orbit_matrix, &run.partition)?;
    let catalog = Mutex::new(Catalog::new(params));
    let seeds: Vec<u64> = (0..run.runs as u64).map(|i| base_seed.wrapping_add(i)).collect();

    let results: Vec<Result<(SearchOutcome, String)>> = seeds
        .par_iter()
        .map(|&seed| {
            let config = GaConfig {
                rng_seed: seed,
                ..run.ga.clone()
            };
            let mut log = Vec::new();
            let outcome = search(&layout, &config, &DsrgFitness(params), Some(&mut log))?;
            for (index, sol) in outcome.solutions.iter().enumerate() {
                if !verify_dsrg(&sol.matrix, &params)? {
                    return Err(DsrgError::NotDsrg { index });
                }
                let prov = Provenance {
                    orbit_matrix: run.om_id.clone(),
                    seed,
                    generation: sol.generation,
                };
                let entry = CatalogEntry::new(params, &sol.matrix, Some(prov));
                if catalog.lock().expect("catalog lock").insert_entry(entry) == Insert::NewClass {
                    info!("seed {seed}: new class at generation {}", sol.generation);
                }
            }
            Ok((outcome, String::from_utf8(log).expect("log is ASCII")))
        })
        .collect();

    let mut outcomes = Vec::new();
    let mut logs = Vec::new();
    for r in results {
        let (o, l) = r?;
        outcomes.push(o);
        logs.push(l);
    }
    let solutions = outcomes.iter().map(|o| o.solutions.len()).sum();
    Ok(SearchReport {
        catalog: catalog.into_inner().expect("catalog lock"),
        outcomes,
        solutions,
        logs,
    })
}

/// Writes the catalog, summary tables, per-seed outcomes and logs, and a
/// merged log into `dir`.
pub fn write_report(dir: &Path, report: &SearchReport) -> Result<()> {
    fs::create_dir_all(dir.join("runs"))?;
    fs::write(dir.join("catalog.txt"), report.catalog.to_text())?;
    fs::write(dir.join("summary.txt"), report.catalog.summary_text())?;
    fs::write(dir.join("summary.csv"), report.catalog.summary_csv())?;
    let mut merged = String::new();
    for (o, log) in report.outcomes.iter().zip(&report.logs) {
        fs::write(dir.join("runs").join(format!("seed_{}.json", o.seed)), o.to_json())?;
        fs::write(dir.join("runs").join(format!("seed_{}.log", o.seed)), log)?;
        for line in log.lines() {
            merged.push_str(&format!("{} {line}\n", o.seed));
        }
    }
    fs::write(dir.join("search.log"), merged)?;
    Ok(())
}
