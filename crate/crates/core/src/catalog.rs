//! Isomorphism-class catalogs of verified DSRGs.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::canonical_form;
use crate::digraph::{verify_dsrg, AdjacencyMatrix};
use crate::error::{parse_err, DsrgError, Result};
use crate::io::{parse_graph, write_graph};
use crate::params::DsrgParams;

/// Where a graph was first found.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Provenance {
    /// Orbit matrix identifier; must not contain whitespace.
    pub orbit_matrix: String,
    pub seed: u64,
    pub generation: u64,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "om={} seed={} generation={}", self.orbit_matrix, self.seed, self.generation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub params: DsrgParams,
    /// The canonical representative of the class.
    pub canonical: AdjacencyMatrix,
    pub canonical_bytes: Vec<u8>,
    pub automorphism_group_order: BigUint,
    pub provenance: Option<Provenance>,
}

impl CatalogEntry {
    /// Canonicalizes `a`; the expensive part of an insertion, safe to run
    /// outside any lock.
    pub fn new(params: DsrgParams, a: &AdjacencyMatrix, provenance: Option<Provenance>) -> Self {
        let cf = canonical_form(a);
        CatalogEntry {
            params,
            canonical: cf.matrix(),
            canonical_bytes: cf.bytes,
            automorphism_group_order: cf.automorphism_group_order,
            provenance,
        }
    }
}

/// One entry per isomorphism class, keyed by canonical bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    params: DsrgParams,
    entries: BTreeMap<Vec<u8>, CatalogEntry>,
}

/// Outcome of a catalog insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insert {
    NewClass,
    Known,
}

impl Catalog {
    pub fn new(params: DsrgParams) -> Self {
        Catalog {
            params,
            entries: BTreeMap::new(),
        }
    }

    pub fn params(&self) -> &DsrgParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in canonical-bytes order.
    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }

    pub fn contains(&self, a: &AdjacencyMatrix) -> bool {
        self.entries.contains_key(&canonical_form(a).bytes)
    }

    /// Canonicalizes and inserts a graph the caller has already verified.
    /// For a known class the smaller provenance is kept, so the result does
    /// not depend on insertion order.
    pub fn insert(&mut self, a: &AdjacencyMatrix, provenance: Option<Provenance>) -> Insert {
        let entry = self.entry_for(a, provenance);
        self.insert_entry(entry)
    }

    pub fn entry_for(&self, a: &AdjacencyMatrix, provenance: Option<Provenance>) -> CatalogEntry {
        CatalogEntry::new(self.params, a, provenance)
    }

    pub fn insert_entry(&mut self, entry: CatalogEntry) -> Insert {
        match self.entries.get_mut(&entry.canonical_bytes) {
            Some(old) => {
                let keep_new = match (&old.provenance, &entry.provenance) {
                    (None, Some(_)) => true,
                    (Some(a), Some(b)) => b < a,
                    _ => false,
                };
                if keep_new {
                    old.provenance = entry.provenance;
                }
                Insert::Known
            }
            None => {
                self.entries.insert(entry.canonical_bytes.clone(), entry);
                Insert::NewClass
            }
        }
    }

    pub fn merge(&mut self, other: Catalog) -> Result<()> {
        if other.params != self.params {
            return Err(DsrgError::InvalidParams(format!(
                "cannot merge catalogs for {} and {}",
                self.params, other.params
            )));
        }
        for entry in other.entries.into_values() {
            self.insert_entry(entry);
        }
        Ok(())
    }

    /// Class counts per automorphism group order, ascending by order.
    pub fn summary(&self) -> Vec<(BigUint, usize)> {
        let mut counts: BTreeMap<BigUint, usize> = BTreeMap::new();
        for e in self.entries.values() {
            *counts.entry(e.automorphism_group_order.clone()).or_default() += 1;
        }
        counts.into_iter().collect()
    }

    pub fn summary_text(&self) -> String {
        let rows = self.summary();
        let w0 = rows.iter().map(|(o, _)| o.to_string().len()).max().unwrap_or(0).max("|Aut|".len());
        let w1 = rows.iter().map(|(_, c)| c.to_string().len()).max().unwrap_or(0).max("count".len());
        let mut out = format!("{:>w0$}  {:>w1$}\n", "|Aut|", "count");
        for (order, count) in &rows {
            writeln!(out, "{:>w0$}  {:>w1$}", order.to_string(), count).unwrap();
        }
        writeln!(out, "{:>w0$}  {:>w1$}", "total", self.len()).unwrap();
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("aut_order,count\n");
        for (order, count) in self.summary() {
            writeln!(out, "{order},{count}").unwrap();
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        writeln!(out, "catalog {} {} {} {} {}", p.v, p.k, p.t, p.lambda, p.mu).unwrap();
        writeln!(out, "classes {}", self.len()).unwrap();
        for (idx, e) in self.entries.values().enumerate() {
            writeln!(out, "class {}", idx + 1).unwrap();
            writeln!(out, "aut {}", e.automorphism_group_order).unwrap();
            match &e.provenance {
                Some(prov) => writeln!(out, "provenance {prov}").unwrap(),
                None => out.push_str("provenance -\n"),
            }
            out.push_str(&write_graph(&e.params, &e.canonical));
        }
        out
    }

    /// Parses [`Catalog::to_text`] output. Each stored matrix must already
    /// be canonical and its group order must match.
    pub fn parse(text: &str) -> Result<Catalog> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
            .collect();
        let mut it = lines.into_iter().peekable();
        let mut next = |what: &str| it.next().ok_or_else(|| parse_err(0, format!("unexpected end of file, wanted {what}")));

        let (line, head) = next("catalog header")?;
        let nums = keyed_numbers(line, head, "catalog")?;
        let [v, k, t, lambda, mu] = nums[..] else {
            return Err(parse_err(line, "expected `catalog v k t lambda mu`"));
        };
        let params = DsrgParams::new(v, k, t, lambda, mu).map_err(|e| parse_err(line, e.to_string()))?;
        let (line, classes) = next("class count")?;
        let [count] = keyed_numbers(line, classes, "classes")?[..] else {
            return Err(parse_err(line, "expected `classes N`"));
        };

        let mut catalog = Catalog::new(params);
        for idx in 0..count {
            let (line, class) = next("class")?;
            if keyed_numbers(line, class, "class")? != [idx + 1] {
                return Err(parse_err(line, format!("expected `class {}`", idx + 1)));
            }
            let (aut_line, aut) = next("aut")?;
            let order: BigUint = aut
                .strip_prefix("aut ")
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| parse_err(aut_line, "expected `aut N`"))?;
            let (line, prov) = next("provenance")?;
            let provenance = parse_provenance(line, prov)?;
            let mut graph = String::new();
            let (header_line, header) = next("graph header")?;
            graph.push_str(header);
            graph.push('\n');
            for _ in 0..params.v {
                let (_, row) = next("matrix row")?;
                graph.push_str(row);
                graph.push('\n');
            }
            let g = parse_graph(&graph).map_err(|e| parse_err(header_line, e.to_string()))?;
            if g.params != params {
                return Err(parse_err(header_line, "class parameters differ from the catalog header"));
            }
            let entry = catalog.entry_for(&g.matrix, provenance);
            if entry.canonical != g.matrix {
                return Err(parse_err(header_line, "stored matrix is not in canonical form"));
            }
            if entry.automorphism_group_order != order {
                return Err(parse_err(aut_line, format!("group order is {}", entry.automorphism_group_order)));
            }
            if catalog.insert_entry(entry) == Insert::Known {
                return Err(parse_err(header_line, "duplicate class"));
            }
        }
        if let Some((line, _)) = it.next() {
            return Err(parse_err(line, "trailing content after the last class"));
        }
        Ok(catalog)
    }
}

fn keyed_numbers(line: usize, text: &str, key: &str) -> Result<Vec<usize>> {
    let mut words = text.split_whitespace();
    if words.next() != Some(key) {
        return Err(parse_err(line, format!("expected `{key}`")));
    }
    words
        .map(|w| w.parse().map_err(|_| parse_err(line, format!("not an integer: {w:?}"))))
        .collect()
}

fn parse_provenance(line: usize, text: &str) -> Result<Option<Provenance>> {
    let rest = text
        .strip_prefix("provenance ")
        .ok_or_else(|| parse_err(line, "expected `provenance`"))?
        .trim();
    if rest == "-" {
        return Ok(None);
    }
    let mut om = None;
    let mut seed = None;
    let mut generation = None;
    for word in rest.split_whitespace() {
        let (key, value) = word
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key=value, found {word:?}")))?;
        let bad = || parse_err(line, format!("bad value for {key}"));
        match key {
            "om" => om = Some(value.to_string()),
            "seed" => seed = Some(value.parse().map_err(|_| bad())?),
            "generation" => generation = Some(value.parse().map_err(|_| bad())?),
            _ => return Err(parse_err(line, format!("unknown provenance field {key:?}"))),
        }
    }
    match (om, seed, generation) {
        (Some(orbit_matrix), Some(seed), Some(generation)) => Ok(Some(Provenance {
            orbit_matrix,
            seed,
            generation,
        })),
        _ => Err(parse_err(line, "provenance needs om, seed and generation")),
    }
}

/// Verifies every graph, then keeps one representative per isomorphism class.
pub fn dedup_and_classify(graphs: &[AdjacencyMatrix], params: &DsrgParams) -> Result<Catalog> {
    let with_prov: Vec<(AdjacencyMatrix, Option<Provenance>)> = graphs.iter().map(|g| (g.clone(), None)).collect();
    classify_with_provenance(&with_prov, params)
}

pub fn classify_with_provenance(
    graphs: &[(AdjacencyMatrix, Option<Provenance>)],
    params: &DsrgParams,
) -> Result<Catalog> {
    for (index, (g, _)) in graphs.iter().enumerate() {
        if !verify_dsrg(g, params)? {
            return Err(DsrgError::NotDsrg { index });
        }
    }
    let catalog = Catalog::new(*params);
    let entries: Vec<CatalogEntry> = graphs
        .par_iter()
        .map(|(g, prov)| catalog.entry_for(g, prov.clone()))
        .collect();
    let mut catalog = catalog;
    for e in entries {
        catalog.insert_entry(e);
    }
    Ok(catalog)
}
