//! Gap metric, per-run result records and batch execution.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::io::ReferenceTable;
use crate::agents::AgentPanel;
use crate::model::{Instance, Money};
use crate::negotiation::VotingRule;
use crate::solver::{run, RunResult, SolverError, SolverParams, Variant};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GapError {
    #[error("reference cost must be positive, got {0}")]
    NonpositiveReference(Money),
}

/// Percentage excess of `cost` over `reference`; negative when the run
/// beats the reference.
pub fn gap(cost: Money, reference: Money) -> Result<f64, GapError> {
    if reference <= Money::ZERO {
        return Err(GapError::NonpositiveReference(reference));
    }
    Ok((cost - reference).cents() as f64 / reference.cents() as f64 * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsRecord {
    pub budget: u64,
    pub ballot: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    pub rho: f64,
    pub sigma: f64,
}

/// One JSON document per run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub instance: String,
    pub variant: Variant,
    pub rule: VotingRule,
    pub seed: u64,
    pub params: ParamsRecord,
    pub final_cost: Money,
    pub gap: Option<f64>,
    pub budget_used: u64,
    pub iterations: u64,
    pub trajectory: Vec<(u64, Money)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agent_costs: Option<Vec<Money>>,
    /// Wall-clock time; the only non-deterministic field.
    pub runtime_ms: u64,
}

impl RunRecord {
    pub fn new(
        instance: &str,
        params: &SolverParams,
        result: &RunResult,
        reference: Option<Money>,
        audit: bool,
        runtime_ms: u64,
    ) -> Self {
        RunRecord {
            instance: instance.to_string(),
            variant: params.variant,
            rule: params.rule,
            seed: params.seed,
            params: ParamsRecord {
                budget: params.budget,
                ballot: params.ballot_size,
                tau_min: params.pheromone.tau_min,
                tau_max: params.pheromone.tau_max,
                rho: params.pheromone.rho,
                sigma: params.pheromone.sigma,
            },
            final_cost: result.global_cost,
            gap: reference.and_then(|r| gap(result.global_cost, r).ok()),
            budget_used: result.budget_used,
            iterations: result.iterations,
            trajectory: result.trajectory.iter().map(|p| (p.budget_used, p.global_cost)).collect(),
            agent_costs: audit.then(|| result.agent_costs.clone()),
            runtime_ms,
        }
    }

    /// JSON text without the wall-clock field, for reproducibility checks.
    pub fn deterministic_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("record serializes");
        if let Some(obj) = value.as_object_mut() {
            obj.remove("runtime_ms");
        }
        value.to_string()
    }
}

/// Solves one instance and wraps the result in a record.
pub fn solve_record(
    instance: &Instance,
    params: &SolverParams,
    reference: Option<Money>,
    audit: bool,
) -> Result<(RunRecord, RunResult), SolverError> {
    let panel = AgentPanel::from_instance(instance);
    let started = Instant::now();
    let result = run(instance, &panel, params)?;
    let runtime_ms = started.elapsed().as_millis() as u64;
    let record = RunRecord::new(instance.name(), params, &result, reference, audit, runtime_ms);
    Ok((record, result))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchRow {
    pub name: String,
    pub variant: Variant,
    pub rule: VotingRule,
    pub ballot: usize,
    pub seed: u64,
    pub final_cost: Money,
    pub gap: Option<f64>,
    pub budget_used: u64,
    pub runtime_ms: u64,
}

/// Summary over all rows of one solver configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub variant: Variant,
    pub rule: VotingRule,
    pub ballot: usize,
    pub runs: usize,
    pub gap_count: usize,
    pub median_gap: Option<f64>,
    pub mean_gap: Option<f64>,
    /// Population standard deviation.
    pub stddev_gap: Option<f64>,
    pub mean_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    /// Describes how the spread column is computed.
    pub stddev: &'static str,
    pub rows: Vec<BatchRow>,
    pub aggregates: Vec<Aggregate>,
    pub records: Vec<RunRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapStats {
    pub median: f64,
    pub mean: f64,
    pub stddev: f64,
}

/// Median, mean and population standard deviation; `None` when empty.
pub fn gap_stats(values: &[f64]) -> Option<GapStats> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let median = if k % 2 == 1 { sorted[k / 2] } else { (sorted[k / 2 - 1] + sorted[k / 2]) / 2.0 };
    let mean = values.iter().sum::<f64>() / k as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k as f64;
    Some(GapStats { median, mean, stddev: var.sqrt() })
}

/// Computes aggregates from rows, ordered by variant (cls, cacm-ex, cacm),
/// then rule, then ballot size.
pub fn aggregate(rows: &[BatchRow]) -> Vec<Aggregate> {
    let mut keys: Vec<(Variant, VotingRule, usize)> = Vec::new();
    for r in rows {
        let key = (r.variant, r.rule, r.ballot);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let rank = |v: Variant| Variant::ALL.iter().position(|&x| x == v).unwrap_or(usize::MAX);
    let rule_rank = |r: VotingRule| VotingRule::ALL.iter().position(|&x| x == r).unwrap_or(usize::MAX);
    keys.sort_by_key(|&(v, r, b)| (rank(v), rule_rank(r), b));
    keys.into_iter()
        .map(|(variant, rule, ballot)| {
            let group: Vec<&BatchRow> =
                rows.iter().filter(|r| (r.variant, r.rule, r.ballot) == (variant, rule, ballot)).collect();
            let gaps: Vec<f64> = group.iter().filter_map(|r| r.gap).collect();
            let stats = gap_stats(&gaps);
            Aggregate {
                variant,
                rule,
                ballot,
                runs: group.len(),
                gap_count: gaps.len(),
                median_gap: stats.map(|s| s.median),
                mean_gap: stats.map(|s| s.mean),
                stddev_gap: stats.map(|s| s.stddev),
                mean_cost: group.iter().map(|r| r.final_cost.as_f64()).sum::<f64>() / group.len() as f64,
            }
        })
        .collect()
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("instance {instance}, {variant}/{rule}, seed {seed}: {source}")]
    Run { instance: String, variant: Variant, rule: VotingRule, seed: u64, source: SolverError },
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// Runs every (instance, configuration, seed) cell on up to `workers`
/// threads. Row order is independent of the worker count.
pub fn run_batch(
    instances: &[Instance],
    configs: &[SolverParams],
    seeds: &[u64],
    reference: Option<&ReferenceTable>,
    workers: usize,
    audit: bool,
) -> Result<BatchReport, BatchError> {
    let cells: Vec<(&Instance, SolverParams)> = instances
        .iter()
        .flat_map(|inst| {
            configs.iter().flat_map(move |cfg| seeds.iter().map(move |&seed| (inst, SolverParams { seed, ..*cfg })))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| BatchError::Pool(e.to_string()))?;
    let records: Vec<RunRecord> = pool.install(|| {
        cells
            .par_iter()
            .map(|(inst, params)| {
                let reference = reference.and_then(|t| t.get(inst.name()));
                solve_record(inst, params, reference, audit).map(|(rec, _)| rec).map_err(|source| BatchError::Run {
                    instance: inst.name().to_string(),
                    variant: params.variant,
                    rule: params.rule,
                    seed: params.seed,
                    source,
                })
            })
            .collect::<Result<_, _>>()
    })?;
    let rows: Vec<BatchRow> = records
        .iter()
        .map(|r| BatchRow {
            name: r.instance.clone(),
            variant: r.variant,
            rule: r.rule,
            ballot: r.params.ballot,
            seed: r.seed,
            final_cost: r.final_cost,
            gap: r.gap,
            budget_used: r.budget_used,
            runtime_ms: r.runtime_ms,
        })
        .collect();
    Ok(BatchReport { stddev: "population", aggregates: aggregate(&rows), rows, records })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_values() {
        assert_eq!(gap(Money::from_units(63), Money::from_units(60)), Ok(5.0));
        assert_eq!(gap(Money::from_units(60), Money::from_units(60)), Ok(0.0));
        assert!(gap(Money::from_units(50), Money::from_units(60)).unwrap() < 0.0);
        assert!(matches!(gap(Money::from_units(1), Money::ZERO), Err(GapError::NonpositiveReference(_))));
    }

    #[test]
    fn stats() {
        assert_eq!(gap_stats(&[]), None);
        let s = gap_stats(&[1.0, 3.0, 2.0, 6.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert_eq!(s.mean, 3.0);
        assert!((s.stddev - (14.0f64 / 4.0).sqrt()).abs() < 1e-12);
        assert_eq!(gap_stats(&[4.0]).unwrap(), GapStats { median: 4.0, mean: 4.0, stddev: 0.0 });
    }
}
