//! Collaborative ant colony metaheuristic (CACM) for the distributed
//! multi-level uncapacitated lot-sizing problem.
//!
//! A neutral mediator searches over encoded setup matrices with an ant
//! colony, while self-interested agents that own subsets of the items keep
//! their cost parameters private and only answer veto, ranking and (when
//! explicitly allowed) cost-revealing queries.
//!
//! Module map:
//!
//! * [`model`] — instance data, validation, product levels.
//! * [`codec`] — encodings, decoding into production plans, costs.
//! * [`agents`] — the privacy boundary between mediator and agents.
//! * [`colony`] — search graph, pheromone field, construction and update.
//! * [`negotiation`] — collaborative local search and voting rules.
//! * [`solver`] — the CACM driver and its ablation variants.
//! * [`bench`] — instance I/O, generation, brute-force oracle, batch runs.

pub mod agents;
pub mod bench;
pub mod codec;
pub mod colony;
pub mod model;
pub mod negotiation;
pub mod solver;

pub use agents::{AgentHandle, AgentPanel};
pub use codec::{decode, Encoding, Plan};
pub use colony::{PheromoneField, PheromoneParams};
pub use model::{Instance, InstanceData, Money};
pub use negotiation::{VoteOutcome, VotingRule};
pub use solver::{run, RunResult, SolverParams, Variant};
