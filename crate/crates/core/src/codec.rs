//! Encoded setup matrices and their decoding into production plans.
//!
//! An encoding bit `e[i][t] = 1` marks period `t` as a *possible* setup of
//! item `i`. Decoding walks the items by non-decreasing product level and
//! produces each demand in the latest encoded setup period not after it;
//! period 1 is always treated as a setup so every encoding is decodable
//! when lead times permit.

use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::{Instance, Money};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("encoding is {found_m}x{found_n}, instance needs {m}x{n}")]
    DimensionMismatch { m: usize, n: usize, found_m: usize, found_n: usize },
    #[error(
        "lot of item {source_item} in period {period} needs item {item} {lead} periods earlier, before the horizon"
    )]
    LeadTimeUnderflow { item: usize, source_item: usize, period: usize, lead: usize },
    #[error("unknown agent {0}")]
    UnknownAgent(usize),
}

/// Binary m×n matrix of encoded setup decisions, row-major by item.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Encoding {
    m: usize,
    n: usize,
    bits: Vec<bool>,
}

impl Encoding {
    pub fn zeros(m: usize, n: usize) -> Self {
        Encoding { m, n, bits: vec![false; m * n] }
    }

    pub fn ones(m: usize, n: usize) -> Self {
        Encoding { m, n, bits: vec![true; m * n] }
    }

    /// Builds an encoding from rows of 0/1 values. Any non-zero counts as 1.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == n), "ragged encoding rows");
        let bits = rows.iter().flat_map(|r| r.as_ref().iter().map(|&b| b != 0)).collect();
        Encoding { m, n, bits }
    }

    pub(crate) fn from_bits(m: usize, n: usize, bits: Vec<bool>) -> Self {
        debug_assert_eq!(bits.len(), m * n);
        Encoding { m, n, bits }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, item: usize, period: usize) -> bool {
        self.bits[item * self.n + period]
    }

    pub fn set(&mut self, item: usize, period: usize, value: bool) {
        self.bits[item * self.n + period] = value;
    }

    pub fn flip(&mut self, item: usize, period: usize) {
        let b = &mut self.bits[item * self.n + period];
        *b = !*b;
    }

    pub fn row(&self, item: usize) -> &[bool] {
        &self.bits[item * self.n..(item + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.m).map(|i| self.row(i).iter().map(|&b| b as u8).collect()).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl fmt::Debug for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Encoding[")?;
        for i in 0..self.m {
            if i > 0 {
                write!(f, "|")?;
            }
            for &b in self.row(i) {
                write!(f, "{}", b as u8)?;
            }
        }
        write!(f, "]")
    }
}

impl Serialize for Encoding {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.m))?;
        for row in self.rows() {
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Decoded production plan. All matrices are m×n, row-major by item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    m: usize,
    n: usize,
    lots: Vec<u64>,
    setups: Vec<bool>,
    inventory: Vec<u64>,
    demand: Vec<u64>,
}

impl Plan {
    fn empty(m: usize, n: usize) -> Self {
        Plan {
            m,
            n,
            lots: vec![0; m * n],
            setups: vec![false; m * n],
            inventory: vec![0; m * n],
            demand: vec![0; m * n],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lot(&self, item: usize, period: usize) -> u64 {
        self.lots[item * self.n + period]
    }

    pub fn setup(&self, item: usize, period: usize) -> bool {
        self.setups[item * self.n + period]
    }

    pub fn inventory(&self, item: usize, period: usize) -> u64 {
        self.inventory[item * self.n + period]
    }

    pub fn demand(&self, item: usize, period: usize) -> u64 {
        self.demand[item * self.n + period]
    }

    pub fn lots_row(&self, item: usize) -> &[u64] {
        &self.lots[item * self.n..(item + 1) * self.n]
    }

    pub fn inventory_row(&self, item: usize) -> &[u64] {
        &self.inventory[item * self.n..(item + 1) * self.n]
    }

    pub fn setups_row(&self, item: usize) -> &[bool] {
        &self.setups[item * self.n..(item + 1) * self.n]
    }

    pub fn demand_row(&self, item: usize) -> &[u64] {
        &self.demand[item * self.n..(item + 1) * self.n]
    }

    /// Setup count and total stock-periods of one item.
    pub fn item_usage(&self, item: usize) -> (u64, u64) {
        let setups = self.setups_row(item).iter().filter(|&&s| s).count() as u64;
        let stock = self.inventory_row(item).iter().sum();
        (setups, stock)
    }

    fn row_range(&self, item: usize) -> std::ops::Range<usize> {
        item * self.n..(item + 1) * self.n
    }
}

fn check_dims(instance: &Instance, encoding: &Encoding) -> Result<(), DecodeError> {
    if encoding.m() != instance.m() || encoding.n() != instance.n() {
        return Err(DecodeError::DimensionMismatch {
            m: instance.m(),
            n: instance.n(),
            found_m: encoding.m(),
            found_n: encoding.n(),
        });
    }
    Ok(())
}

/// Decodes `encoding` into a feasible plan.
pub fn decode(instance: &Instance, encoding: &Encoding) -> Result<Plan, DecodeError> {
    check_dims(instance, encoding)?;
    let (m, n) = (instance.m(), instance.n());
    let mut plan = Plan::empty(m, n);
    for i in 0..m {
        for t in 0..n {
            plan.demand[i * n + t] = instance.exogenous(i, t);
        }
    }
    for &i in instance.decode_order() {
        place_lots(&mut plan, encoding, i);
        propagate(instance, &mut plan, i)?;
    }
    Ok(plan)
}

/// Re-decodes after a single bit of `item` changed. `base` must be the plan
/// of the encoding before the flip; the result is identical to a full
/// [`decode`] of `encoding`.
pub fn redecode_item(instance: &Instance, encoding: &Encoding, base: &Plan, item: usize) -> Result<Plan, DecodeError> {
    check_dims(instance, encoding)?;
    let n = instance.n();
    let mut plan = base.clone();
    for &k in instance.upstream(item) {
        if k != item {
            let range = plan.row_range(k);
            plan.demand[range].fill(0);
            let lead = instance.lead_time(k);
            for &(j, r) in instance.successor_edges(k) {
                for t in 0..n {
                    let x = plan.lots[j * n + t];
                    if x == 0 {
                        continue;
                    }
                    if t < lead {
                        return Err(underflow(k, j, t, lead));
                    }
                    plan.demand[k * n + t - lead] += r * x;
                }
            }
        }
        place_lots(&mut plan, encoding, k);
    }
    Ok(plan)
}

/// Assigns each demand of `item` to the latest effective setup not after it.
fn place_lots(plan: &mut Plan, encoding: &Encoding, item: usize) {
    let n = plan.n;
    let base = item * n;
    plan.lots[base..base + n].fill(0);
    let mut last = 0;
    for t in 0..n {
        if t == 0 || encoding.get(item, t) {
            last = t;
        }
        plan.lots[base + last] += plan.demand[base + t];
    }
    let mut stock = 0u64;
    for t in 0..n {
        let idx = base + t;
        plan.setups[idx] = plan.lots[idx] > 0;
        stock = stock + plan.lots[idx] - plan.demand[idx];
        plan.inventory[idx] = stock;
    }
}

/// Pushes the induced demand of `item`'s lots onto its predecessors.
fn propagate(instance: &Instance, plan: &mut Plan, item: usize) -> Result<(), DecodeError> {
    let n = plan.n;
    for &(k, r) in instance.predecessor_edges(item) {
        let lead = instance.lead_time(k);
        for t in 0..n {
            let x = plan.lots[item * n + t];
            if x == 0 {
                continue;
            }
            if t < lead {
                return Err(underflow(k, item, t, lead));
            }
            plan.demand[k * n + t - lead] += r * x;
        }
    }
    Ok(())
}

fn underflow(k: usize, source: usize, t: usize, lead: usize) -> DecodeError {
    DecodeError::LeadTimeUnderflow { item: k + 1, source_item: source + 1, period: t + 1, lead }
}

fn item_cost(instance: &Instance, plan: &Plan, item: usize) -> Money {
    let it = &instance.items()[item];
    let (setups, stock) = plan.item_usage(item);
    it.setup_cost * setups + it.holding_cost * stock
}

/// Total setup plus holding cost over all items.
pub fn global_cost(instance: &Instance, plan: &Plan) -> Money {
    (0..instance.m()).map(|i| item_cost(instance, plan, i)).sum()
}

/// Local cost of one agent (1-based id) over the items it owns.
pub fn agent_cost(instance: &Instance, plan: &Plan, agent: usize) -> Result<Money, DecodeError> {
    let owned = instance.owned_by(agent).ok_or(DecodeError::UnknownAgent(agent))?;
    Ok(owned.iter().map(|&i| item_cost(instance, plan, i)).sum())
}

/// Checks the plan against the model constraints directly: inventory
/// balance, non-negative stock, setup/lot consistency and demand
/// propagation. Returns a description of the first violation.
pub fn verify_plan(instance: &Instance, plan: &Plan) -> Result<(), String> {
    let (m, n) = (instance.m(), instance.n());
    if plan.m() != m || plan.n() != n {
        return Err("plan dimensions differ from instance".into());
    }
    for i in 0..m {
        let mut prev: i128 = 0;
        for t in 0..n {
            let (x, d, l) = (plan.lot(i, t) as i128, plan.demand(i, t) as i128, plan.inventory(i, t) as i128);
            if l != prev + x - d {
                return Err(format!("balance violated at item {} period {}", i + 1, t + 1));
            }
            if prev + x - d < 0 {
                return Err(format!("negative stock at item {} period {}", i + 1, t + 1));
            }
            if plan.setup(i, t) != (x > 0) {
                return Err(format!("setup/lot mismatch at item {} period {}", i + 1, t + 1));
            }
            prev = l;
        }
        if instance.is_final(i) {
            for t in 0..n {
                if plan.demand(i, t) != instance.exogenous(i, t) {
                    return Err(format!("final item {} demand differs from exogenous", i + 1));
                }
            }
        } else {
            let lead = instance.lead_time(i);
            let mut required_total = 0u64;
            for t in 0..n {
                let expected: u64 = instance
                    .successor_edges(i)
                    .iter()
                    .map(|&(j, r)| if t + lead < n { r * plan.lot(j, t + lead) } else { 0 })
                    .sum();
                if plan.demand(i, t) != expected {
                    return Err(format!("demand propagation violated at item {} period {}", i + 1, t + 1));
                }
            }
            for &(j, r) in instance.successor_edges(i) {
                required_total += r * plan.lots_row(j).iter().sum::<u64>();
            }
            if plan.demand_row(i).iter().sum::<u64>() != required_total {
                return Err(format!("item {} requirement falls outside the horizon", i + 1));
            }
        }
    }
    Ok(())
}
