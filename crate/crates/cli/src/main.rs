use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use dsrg::canon::canonical_form;
use dsrg::catalog::Catalog;
use dsrg::digraph::{dsrg_violation, fitness};
use dsrg::error::DsrgError;
use dsrg::io::{read_graph, read_orbit_matrix, write_graph, OrbitMatrixFile};
use dsrg::orbit_matrix::{column_to_row, row_to_column, validate_column_orbit_matrix, validate_row_orbit_matrix};
use dsrg::params::{check_feasibility, max_fitness, DsrgParams};
use dsrg_cli::manifest::{OrbitMatrixSource, RunManifest};
use dsrg_cli::pipeline::{derive, run_search, write_derived, write_report};

#[derive(Parser)]
#[command(name = "dsrg", version, about = "Directed strongly regular graphs with prescribed automorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the counting identity k^2 = t + lambda*k + mu*(v-k-1).
    Check { v: usize, k: usize, t: usize, lambda: usize, mu: usize },
    /// Derive the orbit matrices of a graph under its order-p automorphisms.
    Derive {
        graph: PathBuf,
        #[arg(short, long)]
        p: usize,
        /// output directory; defaults to $DSRG_OUT_DIR, then ./derived
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Validate a row (R) or column (C) orbit matrix file.
    ValidateOm { file: PathBuf },
    /// Run the genetic search described by a manifest.
    Search {
        manifest: PathBuf,
        /// output directory; defaults to the manifest's out_dir, then
        /// $DSRG_OUT_DIR, then ./dsrg-out
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        pop: Option<usize>,
        #[arg(long)]
        max_generations: Option<u64>,
        #[arg(long)]
        budget_secs: Option<f64>,
        #[arg(long)]
        stop_on_first: bool,
    },
    /// Check a graph file against the parameters in its header.
    Verify { graph: PathBuf },
    /// Print the canonical form and automorphism group order of a graph.
    Canon {
        graph: PathBuf,
        /// also print the relabeling that produced the canonical form
        #[arg(long)]
        labeling: bool,
    },
    /// Print the fitness of a graph, the maximum and the deficit.
    Fitness { graph: PathBuf },
    /// Merge catalog files for the same parameters.
    CatalogMerge {
        #[arg(short, long)]
        out: PathBuf,
        inputs: Vec<PathBuf>,
    },
}

/// Exit code 1 for bad input, 2 when an internal check fails.
enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { v, k, t, lambda, mu } => cmd_check(v, k, t, lambda, mu),
        Command::Derive { graph, p, out } => cmd_derive(&graph, p, out),
        Command::ValidateOm { file } => cmd_validate_om(&file),
        Command::Search {
            manifest,
            out,
            seed,
            runs,
            pop,
            max_generations,
            budget_secs,
            stop_on_first,
        } => {
            let overrides = Overrides {
                out,
                seed,
                runs,
                pop,
                max_generations,
                budget_secs,
                stop_on_first,
            };
            cmd_search(&manifest, overrides)
        }
        Command::Verify { graph } => cmd_verify(&graph),
        Command::Canon { graph, labeling } => cmd_canon(&graph, labeling),
        Command::Fitness { graph } => cmd_fitness(&graph),
        Command::CatalogMerge { out, inputs } => cmd_catalog_merge(&out, &inputs),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn pass_fail(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_check(v: usize, k: usize, t: usize, lambda: usize, mu: usize) -> CmdResult {
    let params = DsrgParams::new(v, k, t, lambda, mu)?;
    let (lhs, rhs) = params.counting_identity();
    let ok = check_feasibility(&params);
    match rhs {
        Some(rhs) if lhs == rhs => println!("k^2 = {lhs}, t + lambda*k + mu*(v-k-1) = {rhs}: {lhs} = {rhs}"),
        Some(rhs) => println!("k^2 = {lhs}, t + lambda*k + mu*(v-k-1) = {rhs}: {lhs} \u{2260} {rhs}"),
        None => println!("k^2 = {lhs}, but k >= v"),
    }
    if !params.bounds_hold() {
        println!("parameter bounds violated: need 0 < k < v and t, lambda, mu <= k");
    }
    println!("{params}: {}", if ok { "pass" } else { "fail" });
    Ok(pass_fail(ok))
}

fn out_dir(flag: Option<PathBuf>, fallback: &str) -> PathBuf {
    flag.or_else(|| std::env::var_os("DSRG_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(fallback))
}

fn cmd_derive(graph: &Path, p: usize, out: Option<PathBuf>) -> CmdResult {
    let g = read_graph(graph).with_context(|| format!("reading {}", graph.display()))?;
    let derived = derive(&g, p)?;
    let dir = out_dir(out, "derived");
    let paths = write_derived(&dir, &derived)?;
    println!("{} distinct orbit matrices under order-{p} automorphisms", derived.len());
    for (path, d) in paths.iter().zip(&derived) {
        println!("{}  ({} automorphisms, e.g. {})", path.display(), d.generators.len(), d.generators[0]);
    }
    println!("index: {}", dir.join("index.tsv").display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate_om(file: &Path) -> CmdResult {
    let om = read_orbit_matrix(file).with_context(|| format!("reading {}", file.display()))?;
    let report = match &om {
        OrbitMatrixFile::Row(r) => validate_row_orbit_matrix(r).map(|()| row_to_column(r).map(|c| c.to_string())),
        OrbitMatrixFile::Column(c) => {
            validate_column_orbit_matrix(c).map(|()| column_to_row(c).map(|r| r.to_string()))
        }
    };
    match report {
        Ok(counterpart) => {
            println!("valid");
            match counterpart {
                Ok(text) => print!("{text}"),
                Err(e) => println!("no integral counterpart: {e}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(v) => {
            println!("invalid: {v}");
            Ok(ExitCode::from(1))
        }
    }
}

struct Overrides {
    out: Option<PathBuf>,
    seed: Option<u64>,
    runs: Option<usize>,
    pop: Option<usize>,
    max_generations: Option<u64>,
    budget_secs: Option<f64>,
    stop_on_first: bool,
}

fn cmd_search(manifest_path: &Path, o: Overrides) -> CmdResult {
    let (mut manifest, base) =
        RunManifest::load(manifest_path).with_context(|| format!("reading {}", manifest_path.display()))?;
    if let Some(s) = o.seed {
        manifest.seed = Some(s);
    }
    if let Some(r) = o.runs {
        if r == 0 {
            return Err(anyhow!("--runs must be at least 1").into());
        }
        manifest.runs = r;
    }
    if let Some(p) = o.pop {
        manifest.ga.pop_size = p;
    }
    if let Some(g) = o.max_generations {
        manifest.ga.max_generations = g;
    }
    if let Some(b) = o.budget_secs {
        manifest.ga.wall_clock_budget_secs = Some(b);
    }
    manifest.ga.stop_on_first |= o.stop_on_first;
    manifest.ga.validate()?;
    let dir = o
        .out
        .or_else(|| manifest.out_dir.as_ref().map(|d| base.join(d)))
        .unwrap_or_else(|| out_dir(None, "dsrg-out"));

    let run = manifest.resolve(&base)?;
    let seed = match manifest.seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::random();
            println!("seed {s} (drawn from entropy)");
            manifest.seed = Some(s);
            s
        }
    };
    let report = match run_search(&run, seed) {
        Ok(r) => r,
        Err(e @ DsrgError::NotDsrg { .. }) => return Err(Failure::Internal(e.into())),
        Err(e) => return Err(e.into()),
    };
    fs::create_dir_all(&dir)?;
    write_report(&dir, &report)?;
    // the effective manifest, with its seed, replays this run
    fs::write(dir.join("manifest.toml"), replay_manifest(&manifest, manifest_path, &base))?;
    println!(
        "{} runs, {} solutions, {} isomorphism classes{}",
        report.outcomes.len(),
        report.solutions,
        report.catalog.len(),
        if report.budget_exhausted() { " (budget exhausted)" } else { "" }
    );
    print!("{}", report.catalog.summary_text());
    println!("results in {}", dir.display());
    Ok(ExitCode::SUCCESS)
}

fn replay_manifest(m: &RunManifest, manifest_path: &Path, base: &Path) -> String {
    let mut m = m.clone();
    if let OrbitMatrixSource::Path(p) = &m.orbit_matrix {
        let full = if p.is_absolute() { p.clone() } else { base.join(p) };
        let full = fs::canonicalize(&full).unwrap_or(full);
        m.orbit_matrix = OrbitMatrixSource::Path(full);
    }
    m.out_dir = None;
    format!("# replay of {}\n{}", manifest_path.display(), m.to_toml())
}

fn cmd_verify(graph: &Path) -> CmdResult {
    let g = read_graph(graph).with_context(|| format!("reading {}", graph.display()))?;
    match dsrg_violation(&g.matrix, &g.params)? {
        None => {
            println!("DSRG{}: pass", g.params);
            Ok(ExitCode::SUCCESS)
        }
        Some(v) => {
            println!("DSRG{}: fail at {v}", g.params);
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_canon(graph: &Path, labeling: bool) -> CmdResult {
    let g = read_graph(graph).with_context(|| format!("reading {}", graph.display()))?;
    let cf = canonical_form(&g.matrix);
    println!("# aut {}", cf.automorphism_group_order);
    if labeling {
        println!("# labeling {}", cf.labeling);
    }
    print!("{}", write_graph(&g.params, &cf.matrix()));
    Ok(ExitCode::SUCCESS)
}

fn cmd_fitness(graph: &Path) -> CmdResult {
    let g = read_graph(graph).with_context(|| format!("reading {}", graph.display()))?;
    let f = fitness(&g.matrix, &g.params)?;
    let max = max_fitness(&g.params);
    println!("fitness {f}");
    println!("max {max}");
    println!("deficit {}", max.saturating_sub(f));
    Ok(ExitCode::SUCCESS)
}

fn cmd_catalog_merge(out: &Path, inputs: &[PathBuf]) -> CmdResult {
    let mut merged: Option<Catalog> = None;
    for path in inputs {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cat = Catalog::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
        match merged.as_mut() {
            None => merged = Some(cat),
            Some(m) => m.merge(cat).with_context(|| format!("merging {}", path.display()))?,
        }
    }
    let merged = merged.ok_or_else(|| anyhow!("no input catalogs"))?;
    fs::write(out, merged.to_text())?;
    println!("{} classes", merged.len());
    print!("{}", merged.summary_text());
    Ok(ExitCode::SUCCESS)
}
