//! Group decisions: collaborative local search under unanimous veto and the
//! voting rules that pick and accept a new incumbent.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::AgentPanel;
use crate::codec::{decode, redecode_item, Encoding, Plan};
use crate::model::{Instance, Money};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VoteError {
    #[error("ballot is empty")]
    EmptyBallot,
    #[error("complete approval voting needs a ballot of size 1, got {0}")]
    BallotTooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VotingRule {
    Approval,
    Borda,
    Rawls,
}

impl VotingRule {
    pub const ALL: [VotingRule; 3] = [VotingRule::Approval, VotingRule::Borda, VotingRule::Rawls];

    pub fn as_str(self) -> &'static str {
        match self {
            VotingRule::Approval => "approval",
            VotingRule::Borda => "borda",
            VotingRule::Rawls => "rawls",
        }
    }
}

impl fmt::Display for VotingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VotingRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "approval" => Ok(VotingRule::Approval),
            "borda" => Ok(VotingRule::Borda),
            "rawls" => Ok(VotingRule::Rawls),
            other => Err(format!("unknown voting rule `{other}` (approval|borda|rawls)")),
        }
    }
}

/// An encoding together with its decoded plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub encoding: Encoding,
    pub plan: Plan,
}

impl Candidate {
    pub fn decode(instance: &Instance, encoding: Encoding) -> Result<Self, crate::codec::DecodeError> {
        let plan = decode(instance, &encoding)?;
        Ok(Candidate { encoding, plan })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ballot {
    candidates: Vec<Candidate>,
}

impl Ballot {
    pub fn new(candidates: Vec<Candidate>) -> Result<Self, VoteError> {
        if candidates.is_empty() {
            return Err(VoteError::EmptyBallot);
        }
        Ok(Ballot { candidates })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    fn plans(&self) -> Vec<&Plan> {
        self.candidates.iter().map(|c| &c.plan).collect()
    }

    fn take(mut self, index: usize) -> Candidate {
        self.candidates.swap_remove(index)
    }
}

/// Result of one election. `winner` is a zero-based ballot position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VoteOutcome {
    pub winner: Option<usize>,
    pub accepted: bool,
}

impl VoteOutcome {
    pub const NONE: VoteOutcome = VoteOutcome { winner: None, accepted: false };
}

/// How local search evaluates a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MoveEvaluator {
    /// Full decode of every neighbour.
    Reference,
    /// Re-decodes only the flipped item and its upstream components.
    #[default]
    Incremental,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSearchResult {
    pub encoding: Encoding,
    /// Plan of `encoding`; `None` if no feasible base was ever reached.
    pub plan: Option<Plan>,
    pub moves_evaluated: usize,
}

/// One pass of bit-flip moves over periods 2..n (outer) and items (inner).
/// A move is kept unless some agent's local cost would rise.
pub fn collaborative_local_search(encoding: &Encoding, panel: &AgentPanel, instance: &Instance) -> LocalSearchResult {
    collaborative_local_search_with(encoding, panel, instance, MoveEvaluator::default())
}

pub fn collaborative_local_search_with(
    encoding: &Encoding,
    panel: &AgentPanel,
    instance: &Instance,
    evaluator: MoveEvaluator,
) -> LocalSearchResult {
    let (m, n) = (instance.m(), instance.n());
    let mut base = encoding.clone();
    let mut base_plan = decode(instance, &base).ok();
    let mut moves_evaluated = 0;
    for t in 1..n {
        for i in 0..m {
            moves_evaluated += 1;
            base.flip(i, t);
            let neighbour = match (&base_plan, evaluator) {
                (Some(bp), MoveEvaluator::Incremental) => redecode_item(instance, &base, bp, i),
                _ => decode(instance, &base),
            };
            let accepted = match (neighbour, &base_plan) {
                // An infeasible base is dominated by any feasible neighbour.
                (Ok(plan), None) => Some(plan),
                (Ok(plan), Some(bp)) if panel.unanimous_not_worse(&plan, bp) => Some(plan),
                _ => None,
            };
            match accepted {
                Some(plan) => base_plan = Some(plan),
                None => base.flip(i, t),
            }
        }
    }
    LocalSearchResult { encoding: base, plan: base_plan, moves_evaluated }
}

/// True iff no agent's local cost increases when moving to `candidate`.
pub fn complete_approval(candidate: &Plan, incumbent: &Plan, panel: &AgentPanel) -> bool {
    panel.unanimous_not_worse(candidate, incumbent)
}

/// Winner maximising the lowest Borda score any agent assigns.
pub fn borda_maximin(ballot: &Ballot, panel: &AgentPanel) -> Result<usize, VoteError> {
    let plans = ballot.plans();
    let b = plans.len();
    let mut min_points = vec![usize::MAX; b];
    for agent in panel.agents() {
        let order = agent.rank_ballot(&plans).map_err(|_| VoteError::EmptyBallot)?;
        for (pos, &k) in order.iter().enumerate() {
            min_points[k] = min_points[k].min(b - pos);
        }
    }
    Ok(first_best(&min_points, |a, b| a > b))
}

/// Winner minimising the largest revealed local cost.
pub fn rawls_minimax(ballot: &Ballot, panel: &AgentPanel) -> Result<usize, VoteError> {
    if ballot.is_empty() {
        return Err(VoteError::EmptyBallot);
    }
    let worst: Vec<Money> = ballot
        .plans()
        .iter()
        .map(|p| panel.agents().iter().map(|a| a.reveal_cost(p)).max().unwrap_or(Money::ZERO))
        .collect();
    Ok(first_best(&worst, |a, b| a < b))
}

/// Index of the first element no later element beats.
fn first_best<T: Copy>(values: &[T], better: impl Fn(T, T) -> bool) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if better(v, values[best]) {
            best = k;
        }
    }
    best
}

/// Picks a candidate by `rule` and lets it replace the incumbent only if
/// complete approval passes. Returns the (possibly new) incumbent.
pub fn vote(
    ballot: Ballot,
    panel: &AgentPanel,
    rule: VotingRule,
    incumbent: Candidate,
) -> Result<(Candidate, VoteOutcome), VoteError> {
    let winner = select(&ballot, panel, rule)?;
    if complete_approval(&ballot.candidates[winner].plan, &incumbent.plan, panel) {
        Ok((ballot.take(winner), VoteOutcome { winner: Some(winner), accepted: true }))
    } else {
        Ok((incumbent, VoteOutcome { winner: Some(winner), accepted: false }))
    }
}

/// Applies the selection stage of `rule` without the approval gate.
pub fn select(ballot: &Ballot, panel: &AgentPanel, rule: VotingRule) -> Result<usize, VoteError> {
    match rule {
        VotingRule::Approval if ballot.len() > 1 => Err(VoteError::BallotTooLarge(ballot.len())),
        VotingRule::Approval => Ok(0),
        VotingRule::Borda => borda_maximin(ballot, panel),
        VotingRule::Rawls => rawls_minimax(ballot, panel),
    }
}
