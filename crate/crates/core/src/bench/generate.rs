//! Seeded random instance generator.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Arc, Instance, InstanceData, Item, ModelError, Money};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Structure {
    /// Chain m -> m-1 -> ... -> 1.
    Serial,
    /// Tree: every component feeds exactly one lower-numbered item.
    Assembly,
    /// Components may feed one or two lower-numbered items.
    GeneralDag,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::Serial => "serial",
            Structure::Assembly => "assembly",
            Structure::GeneralDag => "general-dag",
        })
    }
}

impl FromStr for Structure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "serial" => Ok(Structure::Serial),
            "assembly" => Ok(Structure::Assembly),
            "general-dag" | "general" => Ok(Structure::GeneralDag),
            other => Err(format!("unknown structure `{other}` (serial|assembly|general-dag)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub m: usize,
    pub n: usize,
    pub agents: usize,
    pub structure: Structure,
    pub seed: u64,
    /// Contiguous equal-size blocks of items per agent instead of round-robin.
    #[serde(default)]
    pub equal_split: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("cannot build a {structure} structure with m={m}, n={n}, agents={agents}")]
    BadShape { structure: Structure, m: usize, n: usize, agents: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Builds a deterministic instance with zero lead times. Setup costs are
/// drawn from 5..=100, holding costs from 1..=10, final-item demand from
/// 0..=10 per period with at least one positive period.
pub fn generate_instance(cfg: &GeneratorConfig) -> Result<Instance, GenerateError> {
    let GeneratorConfig { m, n, agents, structure, seed, equal_split } = *cfg;
    if m == 0 || n == 0 || agents == 0 {
        return Err(GenerateError::BadShape { structure, m, n, agents });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut arcs = Vec::new();
    for k in 2..=m {
        match structure {
            Structure::Serial => arcs.push(Arc::new(k, k - 1)),
            Structure::Assembly => arcs.push(Arc::new(k, rng.gen_range(1..k))),
            Structure::GeneralDag => {
                let fan = if k > 2 && rng.gen_bool(0.5) { 2 } else { 1 };
                for s in sample(&mut rng, k - 1, fan).into_iter() {
                    arcs.push(Arc::new(k, s + 1));
                }
            }
        }
    }

    let items = (1..=m)
        .map(|id| Item {
            id,
            setup_cost: Money::from_units(rng.gen_range(5..=100)),
            holding_cost: Money::from_units(rng.gen_range(1..=10)),
            lead_time: 0,
            owner: if equal_split { (id - 1) * agents / m + 1 } else { (id - 1) % agents + 1 },
        })
        .collect();

    let mut has_succ = vec![false; m];
    for arc in &arcs {
        has_succ[arc.pred - 1] = true;
    }
    let mut demand = BTreeMap::new();
    for id in (1..=m).filter(|&id| !has_succ[id - 1]) {
        let mut row: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=10)).collect();
        if row.iter().all(|&d| d == 0) {
            row[rng.gen_range(0..n)] = rng.gen_range(1..=10);
        }
        for (t, d) in row.into_iter().enumerate() {
            if d > 0 {
                demand.insert((id, t + 1), d);
            }
        }
    }

    let name = format!("gen-{structure}-m{m}-n{n}-a{agents}-s{seed}");
    Ok(Instance::new(InstanceData { name, periods: n, agent_count: agents, items, arcs, demand })?)
}
