//! Misclassification rate of the exact classifier on random small
//! training sets drawn from a labeled pool.

use std::io::Write;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::classify;
use crate::datasets::FeaturePool;
use crate::encoding::{Flavor, LabeledDataset};
use crate::error::{QkcError, Result};
use crate::rng::stream_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InherentConfig {
    pub flavor: Flavor,
    /// Training-set sizes, each split evenly between the classes.
    pub train_counts: Vec<usize>,
    pub iterations: usize,
    pub seed: u64,
    /// Iterations completed before the first recorded point.
    pub warmup: usize,
    pub record_every: usize,
}

impl InherentConfig {
    pub fn new(train_counts: Vec<usize>, iterations: usize, seed: u64) -> Self {
        Self {
            flavor: Flavor::Ssc,
            train_counts,
            iterations,
            seed,
            warmup: 1000,
            record_every: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub train_count: usize,
    /// `(iteration, cumulative misclassification rate)`.
    pub points: Vec<(usize, f64)>,
    pub final_rate: f64,
}

fn check_pool(pool: &FeaturePool, m: usize) -> Result<()> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(QkcError::InvalidConfig(format!(
            "training size {m} cannot be split evenly"
        )));
    }
    let [c0, c1] = pool.by_class();
    // the test point comes from what is left after drawing the training set
    if c0.len() < m / 2 || c1.len() < m / 2 || pool.len() <= m {
        return Err(QkcError::InvalidDataset(format!(
            "pool with {} + {} samples is too small for {m} training points",
            c0.len(),
            c1.len()
        )));
    }
    Ok(())
}

/// One random draw; returns whether the test point was misclassified.
fn trial<R: Rng>(
    pool: &FeaturePool,
    classes: &[Vec<usize>; 2],
    m: usize,
    flavor: Flavor,
    rng: &mut R,
) -> Result<bool> {
    let mut chosen = Vec::with_capacity(m);
    for group in classes {
        chosen.extend(
            sample(rng, group.len(), m / 2)
                .into_iter()
                .map(|i| group[i]),
        );
    }
    let rest: Vec<usize> = (0..pool.len()).filter(|i| !chosen.contains(i)).collect();
    let test = rest[rng.random_range(0..rest.len())];
    let data = LabeledDataset::uniform(
        chosen.iter().map(|&i| pool.features[i].clone()).collect(),
        chosen.iter().map(|&i| pool.labels[i]).collect(),
        pool.features[test].clone(),
    )?;
    Ok(classify(&data, flavor)?.predicted_label != pool.labels[test])
}

pub fn inherent_error_study(
    pool: &FeaturePool,
    config: &InherentConfig,
) -> Result<Vec<Trajectory>> {
    if config.record_every == 0 {
        return Err(QkcError::InvalidConfig(
            "record interval must be positive".into(),
        ));
    }
    let classes = pool.by_class();
    config
        .train_counts
        .iter()
        .map(|&m| {
            check_pool(pool, m)?;
            let wrong: Vec<bool> = (0..config.iterations as u64)
                .into_par_iter()
                .map(|it| {
                    let mut rng = stream_rng(config.seed, ((m as u64) << 40) | it);
                    trial(pool, &classes, m, config.flavor, &mut rng)
                })
                .collect::<Result<_>>()?;
            let mut errors = 0usize;
            let mut points = Vec::new();
            for (i, w) in wrong.iter().enumerate() {
                errors += *w as usize;
                let done = i + 1;
                if done > config.warmup && done % config.record_every == 0 {
                    points.push((done, errors as f64 / done as f64));
                }
            }
            Ok(Trajectory {
                train_count: m,
                points,
                final_rate: if wrong.is_empty() {
                    0.0
                } else {
                    errors as f64 / wrong.len() as f64
                },
            })
        })
        .collect()
}

/// Long-format rows `train_count,iteration,error_rate`.
pub fn write_trajectories_csv<W: Write>(trajectories: &[Trajectory], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["train_count", "iteration", "error_rate"])?;
    for tr in trajectories {
        for (it, rate) in &tr.points {
            w.write_record(&[
                tr.train_count.to_string(),
                it.to_string(),
                format!("{rate:?}"),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
