//! TOML batch manifests.
//!
//! ```toml
//! seeds = [1, 2, 3]
//! workers = 4
//! reference = "best-known.txt"   # optional, relative to the manifest
//! oracle_reference = false       # fill missing references by enumeration
//! audit = false
//! instances = ["a.txt", "b.txt"]
//!
//! [[generate]]
//! m = 3
//! n = 4
//! agents = 2
//! structure = "general-dag"
//! seed = 7
//!
//! [[config]]
//! variant = "cacm"               # cacm | cacm-ex | cls
//! rule = "approval"              # approval | borda | rawls
//! ballot = 1
//! class = "s"                    # defaults for s | m | l
//! budget = 20000                 # optional overrides
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use super::generate::{generate_instance, GenerateError, GeneratorConfig};
use super::io::{load_instance, LoadError, ParseError, ReferenceTable};
use super::oracle::{brute_force_optimum, OracleError, MAX_FREE_BITS};
use crate::colony::PheromoneParams;
use crate::model::{Instance, Money};
use crate::negotiation::VotingRule;
use crate::solver::{default_params, SizeClass, SolverParams, Variant};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEntry {
    pub variant: Variant,
    #[serde(default = "default_rule")]
    pub rule: VotingRule,
    #[serde(default = "default_ballot")]
    pub ballot: usize,
    #[serde(default = "default_class")]
    pub class: SizeClass,
    pub budget: Option<u64>,
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub rho: Option<f64>,
    pub sigma: Option<f64>,
}

fn default_rule() -> VotingRule {
    VotingRule::Approval
}

fn default_ballot() -> usize {
    1
}

fn default_class() -> SizeClass {
    SizeClass::S
}

fn default_workers() -> usize {
    1
}

impl ConfigEntry {
    pub fn to_params(&self) -> SolverParams {
        let base = default_params(self.class);
        let p = base.pheromone;
        SolverParams {
            budget: self.budget.unwrap_or(base.budget),
            ballot_size: self.ballot,
            rule: self.rule,
            pheromone: PheromoneParams {
                tau_min: self.tau_min.unwrap_or(p.tau_min),
                tau_max: self.tau_max.unwrap_or(p.tau_max),
                rho: self.rho.unwrap_or(p.rho),
                sigma: self.sigma.unwrap_or(p.sigma),
            },
            variant: self.variant,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchManifest {
    pub seeds: Vec<u64>,
    #[serde(default = "default_workers")]
    pub workers: usize,
    pub reference: Option<PathBuf>,
    #[serde(default)]
    pub oracle_reference: bool,
    #[serde(default)]
    pub audit: bool,
    #[serde(default)]
    pub instances: Vec<PathBuf>,
    #[serde(default)]
    pub generate: Vec<GeneratorConfig>,
    #[serde(rename = "config")]
    pub configs: Vec<ConfigEntry>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("manifest: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("manifest lists no instances, seeds or configs")]
    Empty,
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("reference file: {0}")]
    Reference(ParseError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("oracle reference for {instance}: {source}")]
    Oracle { instance: String, source: OracleError },
}

/// Everything needed to call [`super::run_batch`].
#[derive(Debug, Clone)]
pub struct ResolvedBatch {
    pub instances: Vec<Instance>,
    pub configs: Vec<SolverParams>,
    pub seeds: Vec<u64>,
    pub reference: Option<ReferenceTable>,
    pub workers: usize,
    pub audit: bool,
}

impl BatchManifest {
    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ManifestError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// Loads and generates instances and references; relative paths are
    /// taken from `base_dir`.
    pub fn resolve(&self, base_dir: &Path) -> Result<ResolvedBatch, ManifestError> {
        let mut instances = Vec::new();
        for p in &self.instances {
            instances.push(load_instance(&base_dir.join(p))?);
        }
        for g in &self.generate {
            instances.push(generate_instance(g)?);
        }
        if instances.is_empty() || self.seeds.is_empty() || self.configs.is_empty() {
            return Err(ManifestError::Empty);
        }
        let mut reference = match &self.reference {
            Some(p) => {
                let path = base_dir.join(p);
                let text = std::fs::read_to_string(&path)
                    .map_err(|source| ManifestError::Io { path: path.display().to_string(), source })?;
                Some(ReferenceTable::parse(&text).map_err(ManifestError::Reference)?)
            }
            None => None,
        };
        if self.oracle_reference {
            let table = reference.get_or_insert_with(ReferenceTable::new);
            for inst in &instances {
                if table.get(inst.name()).is_some() || inst.m() * inst.n().saturating_sub(1) > MAX_FREE_BITS {
                    continue;
                }
                let (cost, _) = brute_force_optimum(inst)
                    .map_err(|source| ManifestError::Oracle { instance: inst.name().to_string(), source })?;
                if cost > Money::ZERO {
                    // Zero-cost optima have no defined gap; leave them out.
                    let _ = table.insert(inst.name(), cost);
                }
            }
        }
        Ok(ResolvedBatch {
            instances,
            configs: self.configs.iter().map(ConfigEntry::to_params).collect(),
            seeds: self.seeds.clone(),
            reference,
            workers: self.workers,
            audit: self.audit,
        })
    }
}
