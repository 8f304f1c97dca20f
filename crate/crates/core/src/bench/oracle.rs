//! Exhaustive search over all encodings, for desk-scale verification.

use thiserror::Error;

use crate::codec::{decode, global_cost, DecodeError, Encoding};
use crate::model::{Instance, Money};

/// Largest number of free bits (cells in periods 2..n) the oracle accepts.
pub const MAX_FREE_BITS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {bits} free encoding bits, enumeration limit is {MAX_FREE_BITS}")]
    TooLarge { bits: usize },
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// Minimum total cost over every encoding and the lexicographically
/// smallest (row-major) encoding attaining it. Period-1 bits are reported
/// as 1, matching what the decoder uses.
pub fn brute_force_optimum(instance: &Instance) -> Result<(Money, Encoding), OracleError> {
    let (m, n) = (instance.m(), instance.n());
    let bits = m * n.saturating_sub(1);
    if bits > MAX_FREE_BITS {
        return Err(OracleError::TooLarge { bits });
    }
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (1..n).map(move |t| (i, t))).collect();
    let mut best: Option<(Money, Encoding)> = None;
    let mut first_error = None;
    for mask in 0u32..(1u32 << bits) {
        let mut enc = Encoding::zeros(m, n);
        for i in 0..m {
            enc.set(i, 0, true);
        }
        // First cell is the most significant bit so masks ascend in
        // lexicographic order.
        for (k, &(i, t)) in cells.iter().enumerate() {
            if mask >> (bits - 1 - k) & 1 == 1 {
                enc.set(i, t, true);
            }
        }
        match decode(instance, &enc) {
            Ok(plan) => {
                let cost = global_cost(instance, &plan);
                if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                    best = Some((cost, enc));
                }
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    match (best, first_error) {
        (Some(found), _) => Ok(found),
        (None, Some(e)) => Err(e.into()),
        (None, None) => unreachable!("enumeration visits at least one encoding"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::tiny1;
    use crate::model::InstanceData;

    #[test]
    fn tiny1_optimum() {
        let (cost, enc) = brute_force_optimum(&tiny1()).unwrap();
        assert_eq!(cost, Money::from_units(36));
        assert_eq!(enc, Encoding::from_rows(&[[1, 0, 0], [1, 0, 0]]));
    }

    #[test]
    fn zero_demand_costs_nothing() {
        let mut data: InstanceData = crate::model::fixtures::tiny1_data();
        data.demand.clear();
        let inst = Instance::new(data).unwrap();
        assert_eq!(brute_force_optimum(&inst).unwrap().0, Money::ZERO);
    }

    #[test]
    fn guard() {
        let mut data = crate::model::fixtures::tiny1_data();
        data.items.push(crate::model::fixtures::item(3, 1, 1, 1));
        data.periods = 10;
        let inst = Instance::new(data).unwrap();
        assert_eq!(brute_force_optimum(&inst), Err(OracleError::TooLarge { bits: 27 }));
    }
}
