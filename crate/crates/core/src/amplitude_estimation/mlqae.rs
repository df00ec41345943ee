//! Amplitude estimation without phase estimation: sample after several
//! Grover powers and maximize the joint Bernoulli likelihood.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::mle::{maximize_on_quarter_turn, MleSearch};
use super::{build_grover, StatePrepOracle};
use crate::error::{QkcError, Result};
use crate::rng::stream_rng;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlqaeConfig {
    pub schedule: Vec<u64>,
    pub shots_per_round: u64,
    pub grid_points: usize,
}

impl MlqaeConfig {
    pub fn new(schedule: Vec<u64>, shots_per_round: u64) -> Result<Self> {
        let c = Self {
            schedule,
            shots_per_round,
            grid_points: MleSearch::default().grid_points,
        };
        c.validate()?;
        Ok(c)
    }

    /// Powers `0, 1, 2, 4, …, 2^{k-1}`.
    pub fn exponential(k: u32, shots_per_round: u64) -> Result<Self> {
        let schedule = std::iter::once(0)
            .chain((0..k).map(|j| 1u64 << j))
            .collect();
        Self::new(schedule, shots_per_round)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() {
            return Err(QkcError::Empty("Grover schedule"));
        }
        if self.schedule.windows(2).any(|w| w[1] < w[0]) {
            return Err(QkcError::InvalidConfig(
                "schedule must be nondecreasing".into(),
            ));
        }
        if self.shots_per_round == 0 {
            return Err(QkcError::ZeroShots);
        }
        if self.grid_points < 2 {
            return Err(QkcError::InvalidConfig(
                "grid needs at least 2 points".into(),
            ));
        }
        Ok(())
    }

    /// Oracle applications per shot across all rounds, `Σ (2 m_k + 1)`.
    pub fn queries_per_shot(&self) -> u64 {
        self.schedule.iter().map(|m| 2 * m + 1).sum()
    }

    /// Total oracle applications, `Σ (2 m_k + 1) · shots`.
    pub fn total_queries(&self) -> u64 {
        self.queries_per_shot() * self.shots_per_round
    }

    fn search(&self) -> MleSearch {
        MleSearch {
            grid_points: self.grid_points,
            ..MleSearch::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlqaeEstimate {
    pub a_hat: f64,
    pub theta_hat: f64,
    /// Good outcomes observed in each round.
    pub hits: Vec<u64>,
    pub total_queries: u64,
}

/// Exact good-state probability after each scheduled Grover power.
pub fn mlqae_round_probabilities<T: Real>(
    oracle: &StatePrepOracle<T>,
    schedule: &[u64],
) -> Result<Vec<f64>> {
    let grover = build_grover(oracle);
    let mut state = oracle.prepared_state()?;
    let mut applied = 0;
    let mut out = Vec::with_capacity(schedule.len());
    for &m in schedule {
        while applied < m {
            state.apply_all(&grover)?;
            applied += 1;
        }
        out.push(oracle.good_probability(&state)?.as_f64());
    }
    Ok(out)
}

/// Samples every round from precomputed probabilities and maximizes the
/// likelihood.
pub fn mlqae_from_probabilities<R: Rng + ?Sized>(
    probs: &[f64],
    config: &MlqaeConfig,
    rng: &mut R,
) -> Result<MlqaeEstimate> {
    config.validate()?;
    if probs.len() != config.schedule.len() {
        return Err(QkcError::DimensionMismatch {
            expected: config.schedule.len(),
            found: probs.len(),
        });
    }
    let shots = config.shots_per_round;
    let hits: Vec<u64> = probs
        .iter()
        .map(|&p| {
            let p = p.clamp(0.0, 1.0);
            Binomial::new(shots, p).expect("valid binomial").sample(rng)
        })
        .collect();
    let rounds: Vec<(f64, f64, f64)> = config
        .schedule
        .iter()
        .zip(&hits)
        .map(|(&m, &h)| ((2 * m + 1) as f64, h as f64, (shots - h) as f64))
        .collect();
    let loglik = |theta: f64| {
        rounds
            .iter()
            .map(|&(k, h, miss)| {
                let s = (k * theta).sin().powi(2);
                let mut v = 0.0;
                if h > 0.0 {
                    v += h * s.max(1e-300).ln();
                }
                if miss > 0.0 {
                    v += miss * (1.0 - s).max(1e-300).ln();
                }
                v
            })
            .sum::<f64>()
    };
    let theta_hat = maximize_on_quarter_turn(loglik, &config.search());
    Ok(MlqaeEstimate {
        a_hat: theta_hat.sin().powi(2),
        theta_hat,
        hits,
        total_queries: config.total_queries(),
    })
}

pub fn run_mlqae<T: Real>(
    oracle: &StatePrepOracle<T>,
    config: &MlqaeConfig,
    rng_seed: u64,
) -> Result<MlqaeEstimate> {
    config.validate()?;
    let probs = mlqae_round_probabilities(oracle, &config.schedule)?;
    let mut rng = stream_rng(rng_seed, 0);
    mlqae_from_probabilities(&probs, config, &mut rng)
}
