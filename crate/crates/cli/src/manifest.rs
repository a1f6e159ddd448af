//! TOML run manifests for the search pipeline.
//!
//! ```toml
//! params = { v = 6, k = 2, t = 1, lambda = 0, mu = 1 }
//! orbit_matrix = "z3.om"        # or orbit_matrix_text = """..."""
//! generator = "(0 1 2)(3 4 5)"  # optional
//! out_dir = "runs/z3"           # optional
//! runs = 4
//!
//! [ga]
//! POP = 20
//! seed = 7                      # optional; drawn from entropy when absent
//! ```
//!
//! Keys missing from `[ga]` take the tuned defaults. Run `i` uses seed
//! `seed + i`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dsrg::error::{DsrgError, Result};
use dsrg::ga::GaConfig;
use dsrg::io::{parse_orbit_matrix, read_orbit_matrix};
use dsrg::orbit_matrix::{validate_row_orbit_matrix, RowOrbitMatrix};
use dsrg::orbits::{orbits_of, OrbitPartition};
use dsrg::params::DsrgParams;
use dsrg::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitMatrixSource {
    Path(PathBuf),
    /// Orbit matrix in its text format.
    Inline(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub params: DsrgParams,
    pub orbit_matrix: OrbitMatrixSource,
    /// Cycle notation; defaults to the contiguous generator for the lengths.
    pub generator: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub runs: usize,
    pub seed: Option<u64>,
    /// Search settings; its own seed field is ignored in favour of `seed`.
    pub ga: GaConfig,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    params: DsrgParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orbit_matrix: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orbit_matrix_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out_dir: Option<PathBuf>,
    #[serde(default = "one")]
    runs: usize,
    #[serde(default)]
    ga: toml::Table,
}

fn one() -> usize {
    1
}

fn config_err(msg: impl std::fmt::Display) -> DsrgError {
    DsrgError::InvalidConfig(msg.to_string())
}

impl RunManifest {
    pub fn new(params: DsrgParams, orbit_matrix: OrbitMatrixSource) -> Self {
        RunManifest {
            params,
            orbit_matrix,
            generator: None,
            out_dir: None,
            runs: 1,
            seed: None,
            ga: GaConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: Raw = toml::from_str(text).map_err(config_err)?;
        let p = raw.params;
        let params = DsrgParams::new(p.v, p.k, p.t, p.lambda, p.mu)?;
        let orbit_matrix = match (raw.orbit_matrix, raw.orbit_matrix_text) {
            (Some(path), None) => OrbitMatrixSource::Path(path),
            (None, Some(text)) => OrbitMatrixSource::Inline(text),
            _ => return Err(config_err("exactly one of orbit_matrix and orbit_matrix_text is required")),
        };
        if raw.runs == 0 {
            return Err(config_err("runs must be at least 1"));
        }
        let seed = match raw.ga.get("seed") {
            None => None,
            Some(toml::Value::Integer(s)) if *s >= 0 => Some(*s as u64),
            Some(other) => return Err(config_err(format!("seed must be a non-negative integer, found {other}"))),
        };
        let mut table = toml::Table::try_from(GaConfig::default()).map_err(config_err)?;
        table.extend(raw.ga);
        let mut ga: GaConfig = table.try_into().map_err(config_err)?;
        ga.rng_seed = seed.unwrap_or(0);
        ga.validate()?;
        Ok(RunManifest {
            params,
            orbit_matrix,
            generator: raw.generator,
            out_dir: raw.out_dir,
            runs: raw.runs,
            seed,
            ga,
        })
    }

    pub fn to_toml(&self) -> String {
        let mut ga = toml::Table::try_from(&self.ga).expect("config serializes");
        match self.seed {
            Some(s) => ga.insert("seed".into(), toml::Value::Integer(s as i64)),
            None => ga.remove("seed"),
        };
        let (orbit_matrix, orbit_matrix_text) = match &self.orbit_matrix {
            OrbitMatrixSource::Path(p) => (Some(p.clone()), None),
            OrbitMatrixSource::Inline(t) => (None, Some(t.clone())),
        };
        let raw = Raw {
            params: self.params,
            orbit_matrix,
            orbit_matrix_text,
            generator: self.generator.clone(),
            out_dir: self.out_dir.clone(),
            runs: self.runs,
            ga,
        };
        toml::to_string(&raw).expect("manifest serializes")
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::from_toml(&text)?, base))
    }

    /// Loads the orbit matrix and builds the orbit partition. Relative
    /// paths are taken against `base`.
    pub fn resolve(&self, base: &Path) -> Result<ResolvedRun> {
        let (file, om_id) = match &self.orbit_matrix {
            OrbitMatrixSource::Path(p) => {
                let full = if p.is_absolute() { p.clone() } else { base.join(p) };
                let id = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().replace(char::is_whitespace, "_"))
                    .unwrap_or_else(|| "om".into());
                (read_orbit_matrix(&full)?, id)
            }
            OrbitMatrixSource::Inline(t) => (parse_orbit_matrix(t)?, "inline".to_string()),
        };
        let orbit_matrix = file.into_row()?;
        if orbit_matrix.params() != &self.params {
            return Err(config_err(format!(
                "orbit matrix is for {}, manifest asks for {}",
                orbit_matrix.params(),
                self.params
            )));
        }
        validate_row_orbit_matrix(&orbit_matrix).map_err(DsrgError::InvalidOrbitMatrix)?;
        let partition = match &self.generator {
            Some(cycles) => {
                let g = Permutation::parse_cycles(cycles, self.params.v)?;
                let part = if g.is_identity() { OrbitPartition::trivial(self.params.v) } else { orbits_of(&g)? };
                if part.lengths() != orbit_matrix.lengths() || part.order() != orbit_matrix.prime() {
                    return Err(DsrgError::Shape(format!(
                        "generator orbits {:?} (order {}) do not match the orbit matrix lengths {:?} (order {})",
                        part.lengths(),
                        part.order(),
                        orbit_matrix.lengths(),
                        orbit_matrix.prime()
                    )));
                }
                part
            }
            None => OrbitPartition::from_lengths(orbit_matrix.lengths(), orbit_matrix.prime())?,
        };
        Ok(ResolvedRun {
            orbit_matrix,
            om_id,
            partition,
            runs: self.runs,
            seed: self.seed,
            ga: self.ga.clone(),
        })
    }
}

/// A manifest with its orbit matrix loaded and checked.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub orbit_matrix: RowOrbitMatrix,
    pub om_id: String,
    pub partition: OrbitPartition,
    pub runs: usize,
    pub seed: Option<u64>,
    pub ga: GaConfig,
}

#[cfg(test)]
mod tests {
    use super::*;

    const CYCLE_OM: &str = "3 1 0 0 1\n3 1 R\n3\n1\n";

    fn manifest_text() -> String {
        format!(
            "params = {{ v = 3, k = 1, t = 0, lambda = 0, mu = 1 }}\norbit_matrix_text = \"\"\"\n{CYCLE_OM}\"\"\"\nruns = 2\n\n[ga]\nPOP = 20\nseed = 11\n"
        )
    }

    #[test]
    fn parses_and_fills_defaults() {
        let m = RunManifest::from_toml(&manifest_text()).unwrap();
        assert_eq!(m.runs, 2);
        assert_eq!(m.seed, Some(11));
        assert_eq!(m.ga.pop_size, 20);
        assert_eq!(m.ga.max_partial_resets, 10);
        let r = m.resolve(Path::new(".")).unwrap();
        assert_eq!(r.partition.lengths(), vec![3]);
        assert_eq!(r.om_id, "inline");
    }

    #[test]
    fn round_trips() {
        let m = RunManifest::from_toml(&manifest_text()).unwrap();
        let text = m.to_toml();
        assert_eq!(RunManifest::from_toml(&text).unwrap(), m);
        assert_eq!(RunManifest::from_toml(&text).unwrap().to_toml(), text);

        let mut m2 = RunManifest::new(m.params, OrbitMatrixSource::Path("a/b.om".into()));
        m2.generator = Some("(0 1 2)".into());
        m2.out_dir = Some("out".into());
        assert_eq!(RunManifest::from_toml(&m2.to_toml()).unwrap(), m2);
    }

    #[test]
    fn rejects_bad_manifests() {
        let base = manifest_text();
        assert!(RunManifest::from_toml(&base.replace("POP = 20", "POP = 21")).is_err());
        assert!(RunManifest::from_toml(&base.replace("POP = 20", "Pop = 20")).is_err());
        assert!(RunManifest::from_toml(&base.replace("runs = 2", "runs = 0")).is_err());
        assert!(RunManifest::from_toml("params = { v = 3, k = 1, t = 0, lambda = 0, mu = 1 }\n").is_err());
    }

    #[test]
    fn resolve_checks_orbit_matrix() {
        let bad = manifest_text().replace("3\n1\n\"\"\"", "3\n2\n\"\"\"");
        let m = RunManifest::from_toml(&bad).unwrap();
        assert!(matches!(m.resolve(Path::new(".")), Err(DsrgError::InvalidOrbitMatrix(_))));

        let mut m = RunManifest::from_toml(&manifest_text()).unwrap();
        m.generator = Some("(0 1)".into());
        assert!(m.resolve(Path::new(".")).is_err());
        m.generator = Some("(0 2 1)".into());
        assert!(m.resolve(Path::new(".")).is_ok());
    }
}
