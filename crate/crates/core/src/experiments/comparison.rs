//! Error scaling of an amplitude-estimation arm against direct sampling.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{fit_log2, percentile_81, Fit};
use crate::amplitude_estimation::{
    mle_postprocess, mlqae_from_probabilities, mlqae_round_probabilities, qae_error_bound,
    qae_outcome_distribution, sample_qae, MleSearch, MlqaeConfig, QaeConfig, StatePrepOracle,
    Target,
};
use crate::classifiers::sqkc_oracle;
use crate::encoding::{LabeledDataset, SqkcFlavor};
use crate::error::{QkcError, Result};
use crate::rng::{stream_rng, task_stream};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Qae,
    QaeMle,
    Mlqae,
    Baseline,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Qae => "qae",
            Estimator::QaeMle => "qae-mle",
            Estimator::Mlqae => "mlqae",
            Estimator::Baseline => "baseline",
        }
    }

    /// Shots per quantum estimate when not overridden.
    pub fn default_shots(self) -> u64 {
        match self {
            Estimator::Qae | Estimator::Baseline => 1,
            Estimator::QaeMle | Estimator::Mlqae => 100,
        }
    }

    pub fn default_repetitions(self) -> usize {
        match self {
            Estimator::Qae | Estimator::Baseline => 2000,
            Estimator::QaeMle | Estimator::Mlqae => 1000,
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = QkcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qae" => Ok(Estimator::Qae),
            "qae-mle" | "qae_mle" => Ok(Estimator::QaeMle),
            "mlqae" => Ok(Estimator::Mlqae),
            "baseline" => Ok(Estimator::Baseline),
            other => Err(QkcError::Parse(format!("unknown estimator '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComparisonConfig {
    pub flavor: SqkcFlavor,
    pub t_range: Vec<u32>,
    pub repetitions: usize,
    pub seed: u64,
    pub estimator: Estimator,
    pub dataset: LabeledDataset<f64>,
    pub dataset_id: String,
    pub target: Target,
    pub shots: u64,
    pub grid_points: usize,
}

impl ComparisonConfig {
    /// Defaults: `t ∈ 1..=10`, the estimator's usual repetitions and shots.
    pub fn new(
        flavor: SqkcFlavor,
        estimator: Estimator,
        dataset: LabeledDataset<f64>,
        dataset_id: impl Into<String>,
        target: Target,
    ) -> Self {
        Self {
            flavor,
            t_range: (1..=10).collect(),
            repetitions: estimator.default_repetitions(),
            seed: 42,
            estimator,
            dataset,
            dataset_id: dataset_id.into(),
            target,
            shots: estimator.default_shots(),
            grid_points: MleSearch::default().grid_points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 100 {
            return Err(QkcError::InvalidConfig(format!(
                "at least 100 repetitions are needed, got {}",
                self.repetitions
            )));
        }
        if self.t_range.is_empty() || self.t_range.windows(2).any(|w| w[1] <= w[0]) {
            return Err(QkcError::InvalidConfig(
                "t range must be nonempty and strictly ascending".into(),
            ));
        }
        if self.t_range[0] == 0 {
            return Err(QkcError::InvalidConfig("t starts at 1".into()));
        }
        if self.shots == 0 {
            return Err(QkcError::ZeroShots);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: u32,
    pub samples: u64,
    pub err_p81: f64,
    pub err_min: f64,
    /// Error bound at `N_q = 2^t`.
    pub bound: f64,
    /// Fraction of repetitions whose error is within `bound`.
    pub within_bound: f64,
}

pub type ErrorCurve = Vec<CurvePoint>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub dataset_id: String,
    pub flavor: SqkcFlavor,
    pub estimator: Estimator,
    pub target: Target,
    pub seed: u64,
    pub repetitions: usize,
    pub true_a: f64,
    /// Absent when the estimator is the baseline itself.
    pub quantum: Option<ErrorCurve>,
    pub baseline: ErrorCurve,
    pub quantum_fit: Option<Fit>,
    pub baseline_fit: Fit,
    pub slope_ratio: Option<f64>,
}

impl ExperimentReport {
    fn finish(mut self) -> Self {
        self.baseline_fit = fit_curve(&self.baseline);
        self.quantum_fit = self.quantum.as_ref().map(|c| fit_curve(c));
        self.slope_ratio = match (
            self.quantum_fit.and_then(|f| f.slope()),
            self.baseline_fit.slope(),
        ) {
            (Some(q), Some(b)) if b != 0.0 => Some(q / b),
            _ => None,
        };
        self
    }

    /// Rows `samples,err_p81_qae,err_min_qae,err_p81_baseline,bound`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "samples",
            "err_p81_qae",
            "err_min_qae",
            "err_p81_baseline",
            "bound",
        ])?;
        for (i, b) in self.baseline.iter().enumerate() {
            let q = self.quantum.as_ref().map(|c| c[i]);
            let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
            w.write_record(&[
                b.samples.to_string(),
                opt(q.map(|p| p.err_p81)),
                opt(q.map(|p| p.err_min)),
                format!("{:?}", b.err_p81),
                format!("{:?}", b.bound),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Slopes, intercepts, ratio and run metadata.
    pub fn fit_summary(&self) -> serde_json::Value {
        serde_json::json!({
            "dataset": self.dataset_id,
            "flavor": self.flavor,
            "estimator": self.estimator,
            "target": self.target,
            "seed": self.seed,
            "repetitions": self.repetitions,
            "true_a": self.true_a,
            "quantum_fit": self.quantum_fit,
            "baseline_fit": self.baseline_fit,
            "slope_ratio": self.slope_ratio,
        })
    }
}

fn fit_curve(curve: &[CurvePoint]) -> Fit {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .map(|p| (p.samples as f64, p.err_p81))
        .collect();
    fit_log2(&pts)
}

const QUANTUM_ARM: u8 = 0;
const BASELINE_ARM: u8 = 1;

fn summarize(t: u32, samples: u64, errors: &[f64], a: f64) -> Result<CurvePoint> {
    let bound = qae_error_bound(a, 1 << t);
    let within = errors.iter().filter(|e| **e <= bound).count() as f64 / errors.len() as f64;
    Ok(CurvePoint {
        t,
        samples,
        err_p81: percentile_81(errors)?,
        err_min: errors.iter().copied().fold(f64::INFINITY, f64::min),
        bound,
        within_bound: within,
    })
}

/// Runs `reps` independent tasks keyed by `(seed, t, arm, rep)`; the output
/// order is the repetition order whatever the thread count.
fn run_reps<F>(seed: u64, t: u32, arm: u8, reps: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&mut crate::rng::TaskRng) -> Result<f64> + Sync,
{
    (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, task_stream(t, arm, rep));
            f(&mut rng)
        })
        .collect()
}

/// Shots needed by the quantum arm, which the baseline then receives.
fn quantum_samples(estimator: Estimator, t: u32, shots: u64) -> Result<u64> {
    Ok(match estimator {
        Estimator::Mlqae => MlqaeConfig::exponential(t, shots)?.total_queries(),
        _ => QaeConfig::new(t, shots)?.samples_used(),
    })
}

pub fn run_comparison(config: &ComparisonConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let oracle = sqkc_oracle(&config.dataset, config.flavor, config.target)?;
    let a = oracle.probability()?;
    let mut quantum = Vec::new();
    let mut baseline = Vec::new();
    for &t in &config.t_range {
        let samples = quantum_samples(config.estimator, t, config.shots)?;
        if config.estimator != Estimator::Baseline {
            let errors = quantum_errors(config, &oracle, a, t)?;
            quantum.push(summarize(t, samples, &errors, a)?);
        }
        let errors = run_reps(config.seed, t, BASELINE_ARM, config.repetitions, |rng| {
            let hits = Binomial::new(samples, a.clamp(0.0, 1.0))
                .expect("valid binomial")
                .sample(rng);
            Ok((a - hits as f64 / samples as f64).abs())
        })?;
        baseline.push(summarize(t, samples, &errors, a)?);
    }
    let report = ExperimentReport {
        dataset_id: config.dataset_id.clone(),
        flavor: config.flavor,
        estimator: config.estimator,
        target: config.target,
        seed: config.seed,
        repetitions: config.repetitions,
        true_a: a,
        quantum: (config.estimator != Estimator::Baseline).then_some(quantum),
        baseline,
        quantum_fit: None,
        baseline_fit: Fit::Degenerate { usable_points: 0 },
        slope_ratio: None,
    };
    Ok(report.finish())
}

fn quantum_errors(
    config: &ComparisonConfig,
    oracle: &StatePrepOracle<f64>,
    a: f64,
    t: u32,
) -> Result<Vec<f64>> {
    let reps = config.repetitions;
    let search = MleSearch {
        grid_points: config.grid_points,
        ..MleSearch::default()
    };
    match config.estimator {
        Estimator::Qae | Estimator::QaeMle => {
            let qc = QaeConfig::new(t, config.shots)?;
            let pmf: Vec<f64> = qae_outcome_distribution(oracle, t)?
                .into_iter()
                .map(Real::as_f64)
                .collect();
            let mle = config.estimator == Estimator::QaeMle;
            run_reps(config.seed, t, QUANTUM_ARM, reps, |rng| {
                let (est, counts) = sample_qae(&pmf, &qc, rng)?;
                let a_hat = if mle {
                    mle_postprocess(&counts, t, &search)?
                } else {
                    est.a_hat
                };
                Ok((a - a_hat).abs())
            })
        }
        Estimator::Mlqae => {
            let mut mc = MlqaeConfig::exponential(t, config.shots)?;
            mc.grid_points = config.grid_points;
            let probs = mlqae_round_probabilities(oracle, &mc.schedule)?;
            run_reps(config.seed, t, QUANTUM_ARM, reps, |rng| {
                Ok((a - mlqae_from_probabilities(&probs, &mc, rng)?.a_hat).abs())
            })
        }
        Estimator::Baseline => unreachable!("baseline has no quantum arm"),
    }
}

fn mean_curve(curves: &[&ErrorCurve]) -> ErrorCurve {
    let n = curves.len() as f64;
    (0..curves[0].len())
        .map(|i| {
            let avg = |f: fn(&CurvePoint) -> f64| curves.iter().map(|c| f(&c[i])).sum::<f64>() / n;
            CurvePoint {
                t: curves[0][i].t,
                samples: curves[0][i].samples,
                err_p81: avg(|p| p.err_p81),
                err_min: avg(|p| p.err_min),
                bound: avg(|p| p.bound),
                within_bound: avg(|p| p.within_bound),
            }
        })
        .collect()
}

/// Pointwise mean of several reports sharing the same sample axis, refitted.
pub fn average_reports(reports: &[ExperimentReport]) -> Result<ExperimentReport> {
    let first = reports.first().ok_or(QkcError::Empty("report list"))?;
    let axis = |r: &ExperimentReport| {
        r.baseline
            .iter()
            .map(|p| (p.t, p.samples))
            .collect::<Vec<_>>()
    };
    for r in &reports[1..] {
        if axis(r) != axis(first) || r.quantum.is_some() != first.quantum.is_some() {
            return Err(QkcError::InvalidConfig(
                "reports have different sample axes".into(),
            ));
        }
    }
    let baselines: Vec<&ErrorCurve> = reports.iter().map(|r| &r.baseline).collect();
    let quantum = first.quantum.as_ref().map(|_| {
        let qs: Vec<&ErrorCurve> = reports.iter().filter_map(|r| r.quantum.as_ref()).collect();
        mean_curve(&qs)
    });
    let dataset_id = if reports.len() == 1 {
        first.dataset_id.clone()
    } else {
        format!(
            "mean({})",
            reports
                .iter()
                .map(|r| r.dataset_id.as_str())
                .collect::<Vec<_>>()
                .join(",")
        )
    };
    let report = ExperimentReport {
        dataset_id,
        true_a: reports.iter().map(|r| r.true_a).sum::<f64>() / reports.len() as f64,
        quantum,
        baseline: mean_curve(&baselines),
        ..first.clone()
    };
    Ok(report.finish())
}
