//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::collections::BTreeMap;

use cacm::bench::{generate_instance, GeneratorConfig, Structure};
use cacm::model::{Arc, Item};
use cacm::{Encoding, Instance, InstanceData, Money};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape of a random instance.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_m: usize,
    pub max_n: usize,
    pub max_agents: usize,
    pub max_lead: usize,
    pub max_quantity: u64,
}

pub const SMALL: Shape = Shape { max_m: 5, max_n: 6, max_agents: 3, max_lead: 0, max_quantity: 3 };
pub const WITH_LEADS: Shape = Shape { max_m: 5, max_n: 6, max_agents: 3, max_lead: 2, max_quantity: 3 };

/// Random valid instance with shuffled item ids, random arc quantities and
/// optional lead times.
pub fn random_instance(seed: u64, shape: Shape) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=shape.max_m);
    let n = rng.gen_range(1..=shape.max_n);
    let agents = rng.gen_range(1..=shape.max_agents.min(m));
    let mut ids: Vec<usize> = (1..=m).collect();
    ids.shuffle(&mut rng);

    let mut arcs = Vec::new();
    for p in 1..m {
        let fan = rng.gen_range(0..=2.min(p));
        let mut targets: Vec<usize> = (0..p).collect();
        targets.shuffle(&mut rng);
        for &q in targets.iter().take(fan) {
            arcs.push(Arc { pred: ids[p], succ: ids[q], quantity: rng.gen_range(1..=shape.max_quantity) });
        }
    }
    let mut has_succ = vec![false; m + 1];
    for a in &arcs {
        has_succ[a.pred] = true;
    }
    // every agent owns at least one item
    let mut owners: Vec<usize> = (0..m).map(|k| if k < agents { k + 1 } else { rng.gen_range(1..=agents) }).collect();
    owners.shuffle(&mut rng);
    let items = (1..=m)
        .map(|id| Item {
            id,
            setup_cost: Money::from_cents(rng.gen_range(0..=10_000)),
            holding_cost: Money::from_cents(rng.gen_range(0..=1_000)),
            lead_time: rng.gen_range(0..=shape.max_lead),
            owner: owners[id - 1],
        })
        .collect();
    let mut demand = BTreeMap::new();
    for id in (1..=m).filter(|&id| !has_succ[id]) {
        for t in 1..=n {
            if rng.gen_bool(0.7) {
                demand.insert((id, t), rng.gen_range(0..=9));
            }
        }
    }
    let data = InstanceData { name: format!("random-{seed}"), periods: n, agent_count: agents, items, arcs, demand };
    Instance::new(data).expect("random instance is valid")
}

pub fn random_encoding(rng: &mut impl Rng, m: usize, n: usize) -> Encoding {
    let rows: Vec<Vec<u8>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(0..=1)).collect()).collect();
    Encoding::from_rows(&rows)
}

/// Plan computed by a deliberately plain decoder that shares no code with
/// the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaivePlan {
    pub lots: Vec<Vec<u64>>,
    pub demand: Vec<Vec<u64>>,
    pub cost: Money,
}

/// Returns `None` when some induced demand would fall before period 1.
pub fn naive_decode(inst: &Instance, enc: &Encoding) -> Option<NaivePlan> {
    let (m, n) = (inst.m(), inst.n());
    let mut demand = vec![vec![0u64; n]; m];
    for (&(id, t), &q) in &inst.data().demand {
        demand[id - 1][t - 1] += q;
    }
    let mut lots = vec![vec![0u64; n]; m];
    let mut done = vec![false; m];
    for _ in 0..m {
        // an item is ready once every successor has been planned
        let i = (0..m)
            .find(|&i| !done[i] && inst.arcs().iter().filter(|a| a.pred == i + 1).all(|a| done[a.succ - 1]))
            .expect("acyclic");
        for (t, &need) in demand[i].iter().enumerate() {
            let s = (0..=t).rev().find(|&s| s == 0 || enc.get(i, s)).unwrap();
            lots[i][s] += need;
        }
        for a in inst.arcs().iter().filter(|a| a.succ == i + 1) {
            let k = a.pred - 1;
            let lead = inst.items()[k].lead_time;
            for t in 0..n {
                if lots[i][t] > 0 {
                    if t < lead {
                        return None;
                    }
                    demand[k][t - lead] += a.quantity * lots[i][t];
                }
            }
        }
        done[i] = true;
    }
    let mut cost = Money::ZERO;
    for i in 0..m {
        let item = &inst.items()[i];
        let mut stock = 0u64;
        for (&lot, &need) in lots[i].iter().zip(&demand[i]) {
            stock = stock + lot - need;
            cost += item.holding_cost * stock;
            if lot > 0 {
                cost += item.setup_cost;
            }
        }
    }
    Some(NaivePlan { lots, demand, cost })
}

/// The 30-instance desk-scale suite: m ∈ {2, 3}, n ∈ {3, 4, 6} with
/// m(n−1) ≤ 12, six instances per shape across the three structures.
pub fn desk_suite(agents: usize) -> Vec<Instance> {
    let shapes = [(2, 3), (2, 4), (2, 6), (3, 3), (3, 4)];
    let structures = [Structure::Serial, Structure::Assembly, Structure::GeneralDag];
    let mut out = Vec::new();
    for (s, &(m, n)) in shapes.iter().enumerate() {
        for k in 0..6u64 {
            let cfg = GeneratorConfig {
                m,
                n,
                agents,
                structure: structures[k as usize % 3],
                seed: 1000 + 10 * s as u64 + k,
                equal_split: false,
            };
            out.push(generate_instance(&cfg).expect("suite instance"));
        }
    }
    out
}

pub const TINY1: &str = cacm::bench::io::TINY1;
