//! The mediator/agent privacy boundary.
//!
//! Each [`AgentHandle`] carries the setup and holding costs of the items its
//! agent owns. The handle never exposes those parameters: the mediator can
//! ask for a veto ([`AgentHandle::prefers_not_worse`]) or a ranking
//! ([`AgentHandle::rank_ballot`]), and under the Rawls rule a scalar local
//! cost ([`AgentHandle::reveal_cost`]).
//!
//! The cost table is not reachable from outside this module:
//!
//! ```compile_fail
//! let inst = cacm::bench::io::parse_instance(cacm::bench::io::TINY1).unwrap();
//! let panel = cacm::AgentPanel::from_instance(&inst);
//! let _ = &panel.agents()[0].private_costs;
//! ```

use thiserror::Error;

use crate::codec::Plan;
use crate::model::{Instance, Money};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("ballot is empty")]
    EmptyBallot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PrivateCost {
    item: usize,
    setup: Money,
    holding: Money,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentHandle {
    id: usize,
    private_costs: Vec<PrivateCost>,
}

impl AgentHandle {
    /// `costs` holds `(item id, setup cost, holding cost)` for each owned item.
    pub fn new(id: usize, costs: impl IntoIterator<Item = (usize, Money, Money)>) -> Self {
        let mut private_costs: Vec<PrivateCost> =
            costs.into_iter().map(|(item, setup, holding)| PrivateCost { item: item - 1, setup, holding }).collect();
        private_costs.sort_by_key(|c| c.item);
        AgentHandle { id, private_costs }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    /// Number of items this agent is responsible for.
    pub fn item_count(&self) -> usize {
        self.private_costs.len()
    }

    /// Local cost of the plan over the owned items.
    pub fn evaluate(&self, plan: &Plan) -> Money {
        self.private_costs
            .iter()
            .map(|c| {
                let (setups, stock) = plan.item_usage(c.item);
                c.setup * setups + c.holding * stock
            })
            .sum()
    }

    /// Veto test: true unless the candidate raises this agent's cost.
    pub fn prefers_not_worse(&self, candidate: &Plan, reference: &Plan) -> bool {
        self.evaluate(candidate) <= self.evaluate(reference)
    }

    /// Ballot indices from most to least preferred; ties keep ballot order.
    pub fn rank_ballot(&self, ballot: &[&Plan]) -> Result<Vec<usize>, AgentError> {
        if ballot.is_empty() {
            return Err(AgentError::EmptyBallot);
        }
        let costs: Vec<Money> = ballot.iter().map(|p| self.evaluate(p)).collect();
        let mut order: Vec<usize> = (0..ballot.len()).collect();
        order.sort_by_key(|&k| (costs[k], k));
        Ok(order)
    }

    /// Privacy-relaxing query: discloses the local cost to the mediator.
    /// Only the Rawls rule uses it.
    pub fn reveal_cost(&self, plan: &Plan) -> Money {
        self.evaluate(plan)
    }
}

/// All agents of an instance, ordered by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentPanel {
    agents: Vec<AgentHandle>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("agent ids must be exactly 1..={expected}")]
pub struct PanelError {
    pub expected: usize,
}

impl AgentPanel {
    pub fn new(mut agents: Vec<AgentHandle>) -> Result<Self, PanelError> {
        agents.sort_by_key(|a| a.id);
        let expected = agents.len();
        if agents.iter().enumerate().any(|(k, a)| a.id != k + 1) {
            return Err(PanelError { expected });
        }
        Ok(AgentPanel { agents })
    }

    /// Hands every agent the private costs of the items it owns.
    pub fn from_instance(instance: &Instance) -> Self {
        let agents = (1..=instance.agent_count())
            .map(|a| {
                let owned = instance.owned_by(a).unwrap_or(&[]);
                AgentHandle::new(
                    a,
                    owned.iter().map(|&i| {
                        let it = &instance.items()[i];
                        (it.id, it.setup_cost, it.holding_cost)
                    }),
                )
            })
            .collect();
        AgentPanel { agents }
    }

    pub fn agents(&self) -> &[AgentHandle] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    /// True iff no agent vetoes the candidate against the reference.
    pub fn unanimous_not_worse(&self, candidate: &Plan, reference: &Plan) -> bool {
        self.agents.iter().all(|a| a.prefers_not_worse(candidate, reference))
    }

    /// Local costs for audit output; not used by any decision path.
    pub fn audit_costs(&self, plan: &Plan) -> Vec<Money> {
        self.agents.iter().map(|a| a.evaluate(plan)).collect()
    }
}
