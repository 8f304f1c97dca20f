//! Problem instances: items, product structure, exogenous demand and the
//! partition of items among agents.
//!
//! Item, agent and period ids are 1-based in every public type that carries
//! an id. Matrix accessors on [`Instance`], [`crate::Encoding`] and
//! [`crate::Plan`] take zero-based row/column indices.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// Exact money amount stored in hundredths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Money(i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub const fn from_cents(cents: i64) -> Self {
        Money(cents)
    }

    pub const fn from_units(units: i64) -> Self {
        Money(units * 100)
    }

    pub const fn cents(self) -> i64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    /// Compact decimal form: `10`, `10.5`, `0.25`.
    pub fn to_compact_string(self) -> String {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let (whole, frac) = (abs / 100, abs % 100);
        match frac {
            0 => format!("{sign}{whole}"),
            f if f % 10 == 0 => format!("{sign}{whole}.{}", f / 10),
            f => format!("{sign}{whole}.{f:02}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid money amount `{0}` (at most two decimal places)")]
pub struct ParseMoneyError(pub String);

impl FromStr for Money {
    type Err = ParseMoneyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseMoneyError(s.to_string());
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (whole, frac) = match body.split_once('.') {
            Some((w, f)) => (w, f),
            None => (body, ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(err());
        }
        if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        if frac.len() > 2 || (body.contains('.') && frac.is_empty()) {
            return Err(err());
        }
        let whole: i64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| err())? };
        let frac: i64 = match frac.len() {
            0 => 0,
            1 => frac.parse::<i64>().map_err(|_| err())? * 10,
            _ => frac.parse().map_err(|_| err())?,
        };
        let cents = whole.checked_mul(100).and_then(|w| w.checked_add(frac)).ok_or_else(err)?;
        Ok(Money(if neg { -cents } else { cents }))
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", abs / 100, abs % 100)
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        Ok(Money((v * 100.0).round() as i64))
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl Mul<u64> for Money {
    type Output = Money;
    fn mul(self, rhs: u64) -> Money {
        Money(self.0 * rhs as i64)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub id: usize,
    pub setup_cost: Money,
    pub holding_cost: Money,
    pub lead_time: usize,
    pub owner: usize,
}

/// Assembly arc: `quantity` units of `pred` go into one unit of `succ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub pred: usize,
    pub succ: usize,
    pub quantity: u64,
}

impl Arc {
    pub fn new(pred: usize, succ: usize) -> Self {
        Arc { pred, succ, quantity: 1 }
    }
}

/// Raw, unvalidated instance data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceData {
    pub name: String,
    pub periods: usize,
    pub agent_count: usize,
    pub items: Vec<Item>,
    pub arcs: Vec<Arc>,
    /// (item id, period) → units, both 1-based.
    pub demand: BTreeMap<(usize, usize), u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("instance needs at least one item, one period and one agent")]
    EmptyDimension,
    #[error("item ids must be exactly 1..={expected}; problem with id {id}")]
    BadItemIds { id: usize, expected: usize },
    #[error("unknown item {0}")]
    UnknownItem(usize),
    #[error("item {0} has a negative cost")]
    NegativeCost(usize),
    #[error("item {item} is owned by agent {owner}, outside 1..={agents}")]
    BadPartition { item: usize, owner: usize, agents: usize },
    #[error("arc {0} -> {0} is a self-loop")]
    SelfLoop(usize),
    #[error("arc {pred} -> {succ} has zero quantity")]
    ZeroQuantity { pred: usize, succ: usize },
    #[error("duplicate arc {pred} -> {succ}")]
    DuplicateArc { pred: usize, succ: usize },
    #[error("product structure contains a cycle through item {0}")]
    CyclicStructure(usize),
    #[error("demand on item {item} which has successors")]
    DemandOnNonFinal { item: usize },
    #[error("demand for item {item} in period {period} outside 1..={periods}")]
    PeriodOutOfRange { item: usize, period: usize, periods: usize },
}

/// Checks every structural invariant of the raw data.
pub fn validate(data: &InstanceData) -> Result<(), ModelError> {
    let m = data.items.len();
    if m == 0 || data.periods == 0 || data.agent_count == 0 {
        return Err(ModelError::EmptyDimension);
    }
    let mut seen = vec![false; m];
    for item in &data.items {
        if item.id == 0 || item.id > m || seen[item.id - 1] {
            return Err(ModelError::BadItemIds { id: item.id, expected: m });
        }
        seen[item.id - 1] = true;
        if item.setup_cost.is_negative() || item.holding_cost.is_negative() {
            return Err(ModelError::NegativeCost(item.id));
        }
        if item.owner == 0 || item.owner > data.agent_count {
            return Err(ModelError::BadPartition { item: item.id, owner: item.owner, agents: data.agent_count });
        }
    }

    let mut pairs = BTreeSet::new();
    for arc in &data.arcs {
        for id in [arc.pred, arc.succ] {
            if id == 0 || id > m {
                return Err(ModelError::UnknownItem(id));
            }
        }
        if arc.pred == arc.succ {
            return Err(ModelError::SelfLoop(arc.pred));
        }
        if arc.quantity == 0 {
            return Err(ModelError::ZeroQuantity { pred: arc.pred, succ: arc.succ });
        }
        if !pairs.insert((arc.pred, arc.succ)) {
            return Err(ModelError::DuplicateArc { pred: arc.pred, succ: arc.succ });
        }
    }
    topological_levels(m, &data.arcs)?;

    let has_succ: BTreeSet<usize> = data.arcs.iter().map(|a| a.pred).collect();
    for &(item, period) in data.demand.keys() {
        if item == 0 || item > m {
            return Err(ModelError::UnknownItem(item));
        }
        if period == 0 || period > data.periods {
            return Err(ModelError::PeriodOutOfRange { item, period, periods: data.periods });
        }
    }
    for &(item, _) in data.demand.keys() {
        if has_succ.contains(&item) {
            return Err(ModelError::DemandOnNonFinal { item });
        }
    }
    Ok(())
}

/// Levels by zero-based index, final products at level 0. Fails on cycles.
fn topological_levels(m: usize, arcs: &[Arc]) -> Result<Vec<usize>, ModelError> {
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut pending_succ = vec![0usize; m];
    for arc in arcs {
        preds[arc.succ - 1].push(arc.pred - 1);
        pending_succ[arc.pred - 1] += 1;
    }
    let mut level = vec![0usize; m];
    let mut queue: VecDeque<usize> = (0..m).filter(|&i| pending_succ[i] == 0).collect();
    let mut done = 0;
    while let Some(i) = queue.pop_front() {
        done += 1;
        for &k in &preds[i] {
            level[k] = level[k].max(level[i] + 1);
            pending_succ[k] -= 1;
            if pending_succ[k] == 0 {
                queue.push_back(k);
            }
        }
    }
    if done < m {
        let culprit = (0..m).find(|&i| pending_succ[i] > 0).unwrap_or(0);
        return Err(ModelError::CyclicStructure(culprit + 1));
    }
    Ok(level)
}

/// A validated, immutable instance with derived structure.
#[derive(Debug, Clone)]
pub struct Instance {
    data: InstanceData,
    /// (successor index, r) per zero-based item index.
    succ: Vec<Vec<(usize, u64)>>,
    /// (predecessor index, r) per zero-based item index.
    pred: Vec<Vec<(usize, u64)>>,
    level: Vec<usize>,
    order: Vec<usize>,
    /// Exogenous demand, row-major m×n.
    exogenous: Vec<u64>,
    owned: Vec<Vec<usize>>,
    /// The item itself plus all transitive predecessors, in decode order.
    upstream: Vec<Vec<usize>>,
}

impl Instance {
    pub fn new(mut data: InstanceData) -> Result<Self, ModelError> {
        validate(&data)?;
        data.items.sort_by_key(|it| it.id);
        data.arcs.sort();
        let m = data.items.len();
        let n = data.periods;

        let mut succ = vec![Vec::new(); m];
        let mut pred = vec![Vec::new(); m];
        for arc in &data.arcs {
            succ[arc.pred - 1].push((arc.succ - 1, arc.quantity));
            pred[arc.succ - 1].push((arc.pred - 1, arc.quantity));
        }
        let level = topological_levels(m, &data.arcs)?;
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&i| (level[i], i));
        let mut position = vec![0; m];
        for (pos, &i) in order.iter().enumerate() {
            position[i] = pos;
        }

        let mut exogenous = vec![0u64; m * n];
        for (&(item, period), &qty) in &data.demand {
            exogenous[(item - 1) * n + period - 1] = qty;
        }
        let mut owned = vec![Vec::new(); data.agent_count];
        for item in &data.items {
            owned[item.owner - 1].push(item.id - 1);
        }

        let upstream = (0..m)
            .map(|start| {
                let mut seen = vec![false; m];
                let mut stack = vec![start];
                seen[start] = true;
                while let Some(i) = stack.pop() {
                    for &(k, _) in &pred[i] {
                        if !seen[k] {
                            seen[k] = true;
                            stack.push(k);
                        }
                    }
                }
                let mut set: Vec<usize> = (0..m).filter(|&i| seen[i]).collect();
                set.sort_by_key(|&i| position[i]);
                set
            })
            .collect();

        Ok(Instance { data, succ, pred, level, order, exogenous, owned, upstream })
    }

    pub fn data(&self) -> &InstanceData {
        &self.data
    }

    pub fn into_data(self) -> InstanceData {
        self.data
    }

    pub fn name(&self) -> &str {
        &self.data.name
    }

    /// Number of items.
    pub fn m(&self) -> usize {
        self.data.items.len()
    }

    /// Number of periods.
    pub fn n(&self) -> usize {
        self.data.periods
    }

    pub fn agent_count(&self) -> usize {
        self.data.agent_count
    }

    /// Items sorted by id, so `items()[i]` has id `i + 1`.
    pub fn items(&self) -> &[Item] {
        &self.data.items
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.data.arcs
    }

    pub fn lead_time(&self, idx: usize) -> usize {
        self.data.items[idx].lead_time
    }

    pub fn exogenous(&self, idx: usize, period: usize) -> u64 {
        self.exogenous[idx * self.n() + period]
    }

    pub(crate) fn successor_edges(&self, idx: usize) -> &[(usize, u64)] {
        &self.succ[idx]
    }

    pub(crate) fn predecessor_edges(&self, idx: usize) -> &[(usize, u64)] {
        &self.pred[idx]
    }

    pub(crate) fn upstream(&self, idx: usize) -> &[usize] {
        &self.upstream[idx]
    }

    /// Zero-based item indices in decode order: ascending level, then id.
    pub fn decode_order(&self) -> &[usize] {
        &self.order
    }

    pub fn level(&self, idx: usize) -> usize {
        self.level[idx]
    }

    /// Zero-based indices of the items owned by `agent` (1-based).
    pub fn owned_by(&self, agent: usize) -> Option<&[usize]> {
        agent.checked_sub(1).and_then(|a| self.owned.get(a)).map(Vec::as_slice)
    }

    pub fn is_final(&self, idx: usize) -> bool {
        self.succ[idx].is_empty()
    }
}

/// Product level per item id: 0 for final products, otherwise one more than
/// the deepest successor.
pub fn compute_levels(instance: &Instance) -> BTreeMap<usize, usize> {
    (0..instance.m()).map(|i| (i + 1, instance.level(i))).collect()
}

pub fn successors(instance: &Instance, item: usize) -> Result<BTreeSet<usize>, ModelError> {
    check_item(instance, item)?;
    Ok(instance.successor_edges(item - 1).iter().map(|&(j, _)| j + 1).collect())
}

pub fn predecessors(instance: &Instance, item: usize) -> Result<BTreeSet<usize>, ModelError> {
    check_item(instance, item)?;
    Ok(instance.predecessor_edges(item - 1).iter().map(|&(k, _)| k + 1).collect())
}

fn check_item(instance: &Instance, item: usize) -> Result<(), ModelError> {
    if item == 0 || item > instance.m() {
        Err(ModelError::UnknownItem(item))
    } else {
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn item(id: usize, setup: i64, holding: i64, owner: usize) -> Item {
        Item { id, setup_cost: Money::from_units(setup), holding_cost: Money::from_units(holding), lead_time: 0, owner }
    }

    pub fn tiny1_data() -> InstanceData {
        InstanceData {
            name: "TINY-1".into(),
            periods: 3,
            agent_count: 2,
            items: vec![item(1, 10, 1, 1), item(2, 20, 2, 2)],
            arcs: vec![Arc::new(2, 1)],
            demand: BTreeMap::from([((1, 1), 2), ((1, 3), 3)]),
        }
    }

    pub fn tiny1() -> Instance {
        Instance::new(tiny1_data()).unwrap()
    }

    /// Structure-only instance over `m` items with final item 1 demand.
    pub fn structure(m: usize, arcs: &[(usize, usize)]) -> Instance {
        let mut finals: BTreeSet<usize> = (1..=m).collect();
        for &(p, _) in arcs {
            finals.remove(&p);
        }
        Instance::new(InstanceData {
            name: "s".into(),
            periods: 2,
            agent_count: 1,
            items: (1..=m).map(|id| item(id, 1, 1, 1)).collect(),
            arcs: arcs.iter().map(|&(p, s)| Arc::new(p, s)).collect(),
            demand: finals.into_iter().map(|i| ((i, 1), 1)).collect(),
        })
        .unwrap()
    }
}
