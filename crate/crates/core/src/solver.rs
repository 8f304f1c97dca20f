//! The CACM driver and its ablation variants.
//!
//! Budget is counted in generated solutions: an ant solution improved by
//! local search costs `1 + m(n-1)`, a bare ant solution costs 1. The budget
//! is checked after each completed ballot, so the last round may overshoot.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::AgentPanel;
use crate::codec::{decode, global_cost, DecodeError, Encoding, Plan};
use crate::colony::{init_pheromones, ColonyError, PheromoneParams};
use crate::model::{Instance, Money};
use crate::negotiation::{
    collaborative_local_search, select, vote, Ballot, Candidate, VoteError, VoteOutcome, VotingRule,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("budget {budget} is below the cost of one round ({round})")]
    BudgetTooSmall { budget: u64, round: u64 },
    #[error("ballot size must be at least 1")]
    EmptyBallot,
    #[error("panel has {panel} agents, instance has {instance}")]
    PanelMismatch { panel: usize, instance: usize },
    #[error(transparent)]
    Colony(#[from] ColonyError),
    #[error(transparent)]
    Vote(#[from] VoteError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Ant construction followed by collaborative local search.
    #[serde(rename = "cacm")]
    Cacm,
    /// Ant construction only.
    #[serde(rename = "cacm-ex")]
    CacmEx,
    /// Repeated local search passes from the all-ones encoding.
    #[serde(rename = "cls")]
    ClsOnly,
}

impl Variant {
    /// Reporting order: weakest first.
    pub const ALL: [Variant; 3] = [Variant::ClsOnly, Variant::CacmEx, Variant::Cacm];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Cacm => "cacm",
            Variant::CacmEx => "cacm-ex",
            Variant::ClsOnly => "cls",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cacm" => Ok(Variant::Cacm),
            "cacm-ex" | "cacm_ex" => Ok(Variant::CacmEx),
            "cls" | "cls-only" | "cls_only" => Ok(Variant::ClsOnly),
            other => Err(format!("unknown variant `{other}` (cacm|cacm-ex|cls)")),
        }
    }
}

/// Instance size class for default parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    S,
    M,
    L,
}

impl FromStr for SizeClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "s" => Ok(SizeClass::S),
            "m" => Ok(SizeClass::M),
            "l" => Ok(SizeClass::L),
            other => Err(format!("unknown size class `{other}` (s|m|l)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Maximum number of generated solutions.
    pub budget: u64,
    pub ballot_size: usize,
    pub rule: VotingRule,
    pub pheromone: PheromoneParams,
    pub variant: Variant,
    pub seed: u64,
}

/// Evaluation defaults per size class, with ballot size 1 and complete
/// approval voting.
pub fn default_params(class: SizeClass) -> SolverParams {
    let (tau_max, budget) = match class {
        SizeClass::S => (100.0, 50_000),
        SizeClass::M => (1_000.0, 200_000),
        SizeClass::L => (1_500.0, 400_000),
    };
    SolverParams {
        budget,
        ballot_size: 1,
        rule: VotingRule::Approval,
        pheromone: PheromoneParams { tau_min: 1.0, tau_max, rho: 0.05, sigma: 0.05 },
        variant: Variant::Cacm,
        seed: 0,
    }
}

/// An accepted incumbent that changed at least one local cost.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrajectoryPoint {
    pub budget_used: u64,
    pub global_cost: Money,
    /// Local cost per agent; audit data, never fed back into the search.
    pub agent_costs: Vec<Money>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub incumbent: Encoding,
    pub plan: Plan,
    pub global_cost: Money,
    pub agent_costs: Vec<Money>,
    pub budget_used: u64,
    /// Number of voting rounds.
    pub iterations: u64,
    /// The starting incumbent followed by every accepted cost change.
    pub trajectory: Vec<TrajectoryPoint>,
    /// Outcome of every voting round in order.
    pub outcomes: Vec<VoteOutcome>,
}

/// Budget charged for one candidate of the given variant.
pub fn candidate_charge(variant: Variant, m: usize, n: usize) -> u64 {
    match variant {
        Variant::CacmEx => 1,
        Variant::Cacm | Variant::ClsOnly => 1 + (m * n.saturating_sub(1)) as u64,
    }
}

/// RNG for the `index`-th ant of a run: one ChaCha stream per ant.
pub fn ant_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

struct Recorder<'a> {
    instance: &'a Instance,
    panel: &'a AgentPanel,
    trajectory: Vec<TrajectoryPoint>,
    outcomes: Vec<VoteOutcome>,
    last: Option<Vec<Money>>,
}

impl<'a> Recorder<'a> {
    /// Records a trajectory point when an accepted incumbent changes some
    /// agent's cost. Equal-cost swaps, which weak approval admits freely,
    /// are not recorded.
    fn accept(&mut self, budget_used: u64, incumbent: &Candidate) {
        let agent_costs = self.panel.audit_costs(&incumbent.plan);
        if self.last.as_ref() == Some(&agent_costs) {
            return;
        }
        self.last = Some(agent_costs.clone());
        self.trajectory.push(TrajectoryPoint {
            budget_used,
            global_cost: global_cost(self.instance, &incumbent.plan),
            agent_costs,
        });
    }

    fn finish(self, incumbent: Candidate, budget_used: u64) -> RunResult {
        RunResult {
            global_cost: global_cost(self.instance, &incumbent.plan),
            agent_costs: self.panel.audit_costs(&incumbent.plan),
            incumbent: incumbent.encoding,
            plan: incumbent.plan,
            budget_used,
            iterations: self.outcomes.len() as u64,
            trajectory: self.trajectory,
            outcomes: self.outcomes,
        }
    }
}

/// Runs one variant of the metaheuristic on `instance`.
pub fn run(instance: &Instance, panel: &AgentPanel, params: &SolverParams) -> Result<RunResult, SolverError> {
    if panel.len() != instance.agent_count() {
        return Err(SolverError::PanelMismatch { panel: panel.len(), instance: instance.agent_count() });
    }
    if params.ballot_size == 0 {
        return Err(SolverError::EmptyBallot);
    }
    if params.rule == VotingRule::Approval && params.ballot_size > 1 {
        return Err(VoteError::BallotTooLarge(params.ballot_size).into());
    }
    params.pheromone.validate()?;
    let (m, n) = (instance.m(), instance.n());
    let charge = candidate_charge(params.variant, m, n);
    let round = match params.variant {
        Variant::ClsOnly => charge,
        _ => charge * params.ballot_size as u64,
    };
    if params.budget < round {
        return Err(SolverError::BudgetTooSmall { budget: params.budget, round });
    }
    // Lot-for-lot is the latest possible production pattern; if it violates
    // lead times every encoding does.
    decode(instance, &Encoding::ones(m, n))?;

    let recorder = Recorder { instance, panel, trajectory: Vec::new(), outcomes: Vec::new(), last: None };
    match params.variant {
        Variant::ClsOnly => run_local_search_only(recorder, params),
        _ => run_colony(recorder, params, charge),
    }
}

fn run_colony(mut rec: Recorder<'_>, params: &SolverParams, charge: u64) -> Result<RunResult, SolverError> {
    let (instance, panel) = (rec.instance, rec.panel);
    let (m, n) = (instance.m(), instance.n());
    let mut field = init_pheromones(m, n, params.pheromone)?;
    // The all-zeros start decodes to producing everything in period 1; with
    // lead times it may be infeasible, in which case the first feasible
    // candidate is taken as is.
    let mut incumbent = Candidate::decode(instance, Encoding::zeros(m, n)).ok();
    if let Some(inc) = &incumbent {
        rec.accept(0, inc);
    }

    let mut budget_used = 0u64;
    let mut ants = 0u64;
    while budget_used < params.budget {
        let mut candidates = Vec::with_capacity(params.ballot_size);
        for _ in 0..params.ballot_size {
            let mut rng = ant_rng(params.seed, ants);
            ants += 1;
            let encoding = field.construct(&mut rng);
            budget_used += charge;
            let candidate = if params.variant == Variant::Cacm {
                let ls = collaborative_local_search(&encoding, panel, instance);
                ls.plan.map(|plan| Candidate { encoding: ls.encoding, plan })
            } else {
                Candidate::decode(instance, encoding).ok()
            };
            candidates.extend(candidate);
        }

        let outcome = match (Ballot::new(candidates), incumbent.take()) {
            (Err(_), inc) => {
                incumbent = inc;
                VoteOutcome::NONE
            }
            (Ok(ballot), Some(inc)) => {
                let (next, outcome) = vote(ballot, panel, params.rule, inc)?;
                incumbent = Some(next);
                outcome
            }
            (Ok(ballot), None) => {
                let winner = select(&ballot, panel, params.rule)?;
                incumbent = ballot.candidates().get(winner).cloned();
                VoteOutcome { winner: Some(winner), accepted: true }
            }
        };
        if outcome.accepted {
            if let Some(inc) = &incumbent {
                rec.accept(budget_used, inc);
            }
        }
        rec.outcomes.push(outcome);
        if let Some(inc) = &incumbent {
            field.update(&inc.encoding)?;
        }
    }
    // At least one feasible candidate exists: all-ones is feasible and every
    // ant can produce it, but a short run may still miss it.
    let incumbent = match incumbent {
        Some(inc) => inc,
        None => {
            let inc = Candidate::decode(instance, Encoding::ones(m, n))?;
            rec.accept(budget_used, &inc);
            inc
        }
    };
    Ok(rec.finish(incumbent, budget_used))
}

fn run_local_search_only(mut rec: Recorder<'_>, params: &SolverParams) -> Result<RunResult, SolverError> {
    let (instance, panel) = (rec.instance, rec.panel);
    let (m, n) = (instance.m(), instance.n());
    let mut incumbent = Candidate::decode(instance, Encoding::ones(m, n))?;
    let mut budget_used = 1u64;
    rec.accept(budget_used, &incumbent);
    let mut seen = HashSet::from([incumbent.encoding.clone()]);
    let pass_cost = (m * n.saturating_sub(1)) as u64;

    while budget_used < params.budget {
        let ls = collaborative_local_search(&incumbent.encoding, panel, instance);
        budget_used += pass_cost;
        let Some(plan) = ls.plan else { break };
        let fresh = seen.insert(ls.encoding.clone());
        let ballot = Ballot::new(vec![Candidate { encoding: ls.encoding, plan }])?;
        let (next, outcome) = vote(ballot, panel, VotingRule::Approval, incumbent)?;
        incumbent = next;
        if outcome.accepted {
            rec.accept(budget_used, &incumbent);
        }
        rec.outcomes.push(outcome);
        // A revisited encoding means the deterministic pass has cycled.
        if !fresh || pass_cost == 0 {
            break;
        }
    }
    Ok(rec.finish(incumbent, budget_used))
}
