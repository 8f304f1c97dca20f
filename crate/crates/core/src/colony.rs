//! Search graph, max-min pheromone field, ant construction and update.
//!
//! The search graph has an initial node plus one black (`e = 1`) and one
//! white (`e = 0`) node per (item, period) cell, chained item-major. Both
//! edges entering a node carry the same pheromone for construction, so the
//! field stores a single black and white value per cell.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::Encoding;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ColonyError {
    #[error("invalid pheromone parameters: {0}")]
    BadParams(String),
    #[error("encoding is {found_m}x{found_n}, field is {m}x{n}")]
    DimensionMismatch { m: usize, n: usize, found_m: usize, found_n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PheromoneParams {
    pub tau_min: f64,
    pub tau_max: f64,
    /// Evaporation rate.
    pub rho: f64,
    /// Intensification rate.
    pub sigma: f64,
}

impl PheromoneParams {
    pub fn validate(&self) -> Result<(), ColonyError> {
        let PheromoneParams { tau_min, tau_max, rho, sigma } = *self;
        if !(tau_min.is_finite() && tau_max.is_finite()) || tau_min < 1.0 || tau_min >= tau_max {
            return Err(ColonyError::BadParams(format!("need 1 <= tau_min < tau_max, got {tau_min} and {tau_max}")));
        }
        if !(0.0..=1.0).contains(&rho) || !(0.0..=1.0).contains(&sigma) {
            return Err(ColonyError::BadParams(format!("rho and sigma must lie in [0, 1], got {rho} and {sigma}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub node_count: u64,
    pub edge_count: u64,
}

/// Node and edge counts of the search graph for `m` items and `n` periods.
pub fn graph_stats(m: usize, n: usize) -> GraphStats {
    let cells = (m * n) as u64;
    GraphStats { node_count: 2 * cells + 1, edge_count: 4 * cells - 2 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneField {
    m: usize,
    n: usize,
    black: Vec<f64>,
    white: Vec<f64>,
    params: PheromoneParams,
}

/// Initial field biased toward black nodes: white edges start at 1, black
/// edges at `tau_max - 1`, both clamped into the bounds.
pub fn init_pheromones(m: usize, n: usize, params: PheromoneParams) -> Result<PheromoneField, ColonyError> {
    params.validate()?;
    let clamp = |v: f64| v.clamp(params.tau_min, params.tau_max);
    Ok(PheromoneField { m, n, black: vec![clamp(params.tau_max - 1.0); m * n], white: vec![clamp(1.0); m * n], params })
}

impl PheromoneField {
    pub fn params(&self) -> &PheromoneParams {
        &self.params
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn black(&self, item: usize, period: usize) -> f64 {
        self.black[item * self.n + period]
    }

    pub fn white(&self, item: usize, period: usize) -> f64 {
        self.white[item * self.n + period]
    }

    /// Overwrites one cell; values are clamped into the bounds.
    pub fn set(&mut self, item: usize, period: usize, black: f64, white: f64) {
        let (lo, hi) = (self.params.tau_min, self.params.tau_max);
        self.black[item * self.n + period] = black.clamp(lo, hi);
        self.white[item * self.n + period] = white.clamp(lo, hi);
    }

    /// Probability that an ant moves to the black node of the cell.
    pub fn probability_one(&self, item: usize, period: usize) -> f64 {
        let idx = item * self.n + period;
        self.black[idx] / (self.black[idx] + self.white[idx])
    }

    /// Walks the graph once, drawing exactly one uniform number per cell in
    /// item-major order.
    pub fn construct<R: Rng + ?Sized>(&self, rng: &mut R) -> Encoding {
        let bits = self.black.iter().zip(&self.white).map(|(&b, &w)| rng.gen::<f64>() < b / (b + w)).collect();
        Encoding::from_bits(self.m, self.n, bits)
    }

    /// Evaporates every edge and reinforces those on the accepted path.
    pub fn update(&mut self, accepted: &Encoding) -> Result<(), ColonyError> {
        if accepted.m() != self.m || accepted.n() != self.n {
            return Err(ColonyError::DimensionMismatch {
                m: self.m,
                n: self.n,
                found_m: accepted.m(),
                found_n: accepted.n(),
            });
        }
        let PheromoneParams { tau_min, tau_max, rho, sigma } = self.params;
        let keep = 1.0 - rho;
        // Both results are clamped on both sides: with a small sigma and a
        // large rho a reinforced edge can still drop below tau_min.
        let on_path = |tau: f64| (keep * tau + sigma * tau_max).clamp(tau_min, tau_max);
        let off_path = |tau: f64| (keep * tau).clamp(tau_min, tau_max);
        for i in 0..self.m {
            for t in 0..self.n {
                let idx = i * self.n + t;
                if accepted.get(i, t) {
                    self.black[idx] = on_path(self.black[idx]);
                    self.white[idx] = off_path(self.white[idx]);
                } else {
                    self.black[idx] = off_path(self.black[idx]);
                    self.white[idx] = on_path(self.white[idx]);
                }
            }
        }
        Ok(())
    }

    pub fn within_bounds(&self) -> bool {
        let (lo, hi) = (self.params.tau_min, self.params.tau_max);
        self.black.iter().chain(&self.white).all(|&v| (lo..=hi).contains(&v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(tau_max: f64) -> PheromoneParams {
        PheromoneParams { tau_min: 1.0, tau_max, rho: 0.05, sigma: 0.05 }
    }

    #[test]
    fn initialization() {
        let f = init_pheromones(2, 3, params(100.0)).unwrap();
        assert!((0..2).all(|i| (0..3).all(|t| f.black(i, t) == 99.0 && f.white(i, t) == 1.0)));
        let f = init_pheromones(1, 1, params(1000.0)).unwrap();
        assert_eq!((f.black(0, 0), f.white(0, 0)), (999.0, 1.0));
        let bad = PheromoneParams { tau_min: 5.0, tau_max: 5.0, rho: 0.05, sigma: 0.05 };
        assert!(matches!(init_pheromones(1, 1, bad), Err(ColonyError::BadParams(_))));
        let bad = PheromoneParams { rho: 1.5, ..params(100.0) };
        assert!(init_pheromones(1, 1, bad).is_err());
    }

    #[test]
    fn stats() {
        assert_eq!(graph_stats(2, 3), GraphStats { node_count: 13, edge_count: 22 });
        assert_eq!(graph_stats(1, 1), GraphStats { node_count: 3, edge_count: 2 });
        assert_eq!(graph_stats(500, 52), GraphStats { node_count: 52_001, edge_count: 103_998 });
    }

    #[test]
    fn update_values() {
        let mut f = init_pheromones(1, 1, params(100.0)).unwrap();
        f.update(&Encoding::ones(1, 1)).unwrap();
        assert!((f.black(0, 0) - 99.05).abs() < 1e-12);
        assert_eq!(f.white(0, 0), 1.0);

        f.set(0, 0, 100.0, 1.0);
        f.update(&Encoding::ones(1, 1)).unwrap();
        assert_eq!(f.black(0, 0), 100.0);

        assert!(matches!(f.update(&Encoding::ones(2, 1)), Err(ColonyError::DimensionMismatch { .. })));
    }

    #[test]
    fn zero_path_reinforces_white() {
        let mut f = init_pheromones(1, 1, params(100.0)).unwrap();
        f.update(&Encoding::zeros(1, 1)).unwrap();
        assert!((f.white(0, 0) - 5.95).abs() < 1e-12);
        assert!((f.black(0, 0) - 94.05).abs() < 1e-12);
    }

    #[test]
    fn construction_is_seed_deterministic() {
        let f = init_pheromones(4, 6, params(100.0)).unwrap();
        let a = f.construct(&mut ChaCha8Rng::seed_from_u64(9));
        let b = f.construct(&mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn balanced_field_is_fair_coin() {
        let mut f = init_pheromones(10, 10, params(100.0)).unwrap();
        for i in 0..10 {
            for t in 0..10 {
                f.set(i, t, 50.0, 50.0);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ones: usize = (0..200).map(|_| f.construct(&mut rng).count_ones()).sum();
        let frac = ones as f64 / 20_000.0;
        assert!((frac - 0.5).abs() < 0.01, "{frac}");
    }
}
