//! Phase-estimation based amplitude estimation.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mle::qpe_outcome_probability;
use super::{build_grover, StatePrepOracle};
use crate::error::{QkcError, Result};
use crate::rng::stream_rng;
use crate::scalar::Real;
use crate::sim::{circuit_unitary, sample_distribution, GateSpec, ShotCounts, StateVector};
use crate::tolerance::{MAX_FUSED_QUBITS, MAX_QUBITS};

/// `ã = sin²(π y / 2^t)`.
pub fn a_of_y(y: u64, t: u32) -> f64 {
    (PI * y as f64 / (1u64 << t) as f64).sin().powi(2)
}

/// Error bound holding with probability at least `8/π²`.
pub fn qae_error_bound(a: f64, n_queries: u64) -> f64 {
    let n = n_queries as f64;
    2.0 * (a * (1.0 - a)).max(0.0).sqrt() * PI / n + PI * PI / (n * n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaeConfig {
    pub t: u32,
    pub shots: u64,
}

impl QaeConfig {
    pub fn new(t: u32, shots: u64) -> Result<Self> {
        let c = Self { t, shots };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0 || self.t as usize > MAX_QUBITS {
            return Err(QkcError::InvalidConfig(format!(
                "phase register size {} outside [1, {MAX_QUBITS}]",
                self.t
            )));
        }
        if self.shots == 0 {
            return Err(QkcError::ZeroShots);
        }
        Ok(())
    }

    /// Grover queries per shot, `2^t`.
    pub fn n_queries(&self) -> u64 {
        1 << self.t
    }

    /// Classical-equivalent sample count `2^{t+1} · shots`.
    pub fn samples_used(&self) -> u64 {
        (1u64 << (self.t + 1)) * self.shots
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaeEstimate {
    pub y: u64,
    pub a_hat: f64,
    pub theta_hat: f64,
    pub n_queries: u64,
    pub samples_used: u64,
}

impl QaeEstimate {
    pub fn from_y(y: u64, config: &QaeConfig) -> Self {
        let theta_hat = PI * y as f64 / config.n_queries() as f64;
        Self {
            y,
            a_hat: theta_hat.sin().powi(2),
            theta_hat,
            n_queries: config.n_queries(),
            samples_used: config.samples_used(),
        }
    }
}

/// How controlled powers of `Q` are realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpeMode {
    /// `Q` fused into a dense matrix and raised by repeated squaring.
    Fused,
    /// `2^j` literal copies of the Grover gate list per control qubit.
    GateByGate,
}

/// Phase-estimation circuit: ancillas `0..t` (ancilla `j` controls
/// `Q^{2^j}`), followed by the oracle's qubits.
pub fn qpe_circuit<T: Real>(
    oracle: &StatePrepOracle<T>,
    t: u32,
    mode: QpeMode,
) -> Result<(Vec<GateSpec<T>>, usize)> {
    let t = t as usize;
    let l = oracle.n_qubits();
    let n_total = t + l;
    if t == 0 || n_total > MAX_QUBITS {
        return Err(QkcError::Capacity {
            requested: n_total,
            limit: MAX_QUBITS,
        });
    }
    let system: Vec<usize> = (t..n_total).collect();
    let grover = build_grover(oracle);
    let mut gates: Vec<GateSpec<T>> = (0..t).map(GateSpec::h).collect();
    gates.extend(oracle.circuit().iter().map(|g| g.shifted(t)));
    match mode {
        QpeMode::Fused => {
            let mut power = circuit_unitary(&grover, l)?;
            for j in 0..t {
                if j > 0 {
                    power = power.matmul(&power)?.reunitarize();
                }
                gates.push(GateSpec::unitary(power.clone(), system.clone())?.controlled(j));
            }
        }
        QpeMode::GateByGate => {
            for j in 0..t {
                for _ in 0..(1u64 << j) {
                    gates.extend(grover.iter().map(|g| g.shifted(t).controlled(j)));
                }
            }
        }
    }
    gates.push(GateSpec::qft_inverse((0..t).collect()));
    Ok((gates, n_total))
}

/// Exact pmf of the phase register, read from the simulated statevector.
pub fn qae_outcome_distribution<T: Real>(oracle: &StatePrepOracle<T>, t: u32) -> Result<Vec<T>> {
    let mode = if oracle.n_qubits() <= MAX_FUSED_QUBITS {
        QpeMode::Fused
    } else {
        QpeMode::GateByGate
    };
    qae_outcome_distribution_with(oracle, t, mode)
}

pub(crate) fn qae_outcome_distribution_with<T: Real>(
    oracle: &StatePrepOracle<T>,
    t: u32,
    mode: QpeMode,
) -> Result<Vec<T>> {
    let (gates, n_total) = qpe_circuit(oracle, t, mode)?;
    let mut state = StateVector::new(n_total)?;
    state.apply_all(&gates)?;
    let ancillas: Vec<usize> = (0..t as usize).collect();
    state.marginal(&ancillas)
}

/// Closed-form phase-estimation pmf for a rotation angle `θ`.
pub fn qpe_pmf_closed_form(theta: f64, t: u32) -> Vec<f64> {
    (0..1u64 << t)
        .map(|y| qpe_outcome_probability(theta, y, t))
        .collect()
}

/// Exact QAE outcome distribution with derived statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaeDistribution {
    pub t: u32,
    pub probabilities: Vec<f64>,
}

impl QaeDistribution {
    pub fn a_of_y(&self, y: u64) -> f64 {
        a_of_y(y, self.t)
    }

    /// `E[ã]` under the pmf.
    pub fn expectation(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(y, p)| p * self.a_of_y(y as u64))
            .sum()
    }

    /// Total probability of outcomes whose estimate is within `tol` of `a`.
    pub fn probability_of_estimate(&self, a: f64, tol: f64) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(y, _)| (self.a_of_y(*y as u64) - a).abs() <= tol)
            .map(|(_, p)| *p)
            .sum()
    }

    /// Most likely `y`; ties go to the smaller value.
    pub fn mode(&self) -> u64 {
        let mut best = 0;
        for (y, p) in self.probabilities.iter().enumerate() {
            if *p > self.probabilities[best] {
                best = y;
            }
        }
        best as u64
    }

    /// Writes `y,a_of_y,probability` rows, omitting outcomes below `min_prob`.
    pub fn write_csv<W: Write>(&self, writer: W, min_prob: f64) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["y", "a_of_y", "probability"])?;
        for (y, p) in self.probabilities.iter().enumerate() {
            if *p < min_prob {
                continue;
            }
            w.write_record(&[
                y.to_string(),
                format!("{:?}", self.a_of_y(y as u64)),
                format!("{p:?}"),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn qae_exact_distribution<T: Real>(
    oracle: &StatePrepOracle<T>,
    t: u32,
) -> Result<QaeDistribution> {
    let probabilities = qae_outcome_distribution(oracle, t)?
        .into_iter()
        .map(Real::as_f64)
        .collect();
    Ok(QaeDistribution { t, probabilities })
}

/// Most frequent outcome turned into an estimate.
pub fn estimate_from_counts(counts: &ShotCounts, config: &QaeConfig) -> Result<QaeEstimate> {
    let y = counts.mode().ok_or(QkcError::Empty("shot counts"))?;
    Ok(QaeEstimate::from_y(y, config))
}

/// Samples the phase register from a precomputed pmf.
pub fn sample_qae<R: Rng + ?Sized>(
    pmf: &[f64],
    config: &QaeConfig,
    rng: &mut R,
) -> Result<(QaeEstimate, ShotCounts)> {
    config.validate()?;
    if pmf.len() != 1 << config.t {
        return Err(QkcError::DimensionMismatch {
            expected: 1 << config.t,
            found: pmf.len(),
        });
    }
    let counts = sample_distribution(pmf, config.shots, rng)?;
    let counts = ShotCounts::from_counts(
        config.t as usize,
        counts.into_iter().enumerate().map(|(y, c)| (y as u64, c)),
    )?;
    Ok((estimate_from_counts(&counts, config)?, counts))
}

pub fn run_qae<T: Real>(
    oracle: &StatePrepOracle<T>,
    config: &QaeConfig,
    rng_seed: u64,
) -> Result<QaeEstimate> {
    config.validate()?;
    let pmf: Vec<f64> = qae_outcome_distribution(oracle, config.t)?
        .into_iter()
        .map(Real::as_f64)
        .collect();
    let mut rng = stream_rng(rng_seed, 0);
    Ok(sample_qae(&pmf, config, &mut rng)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn error_bound_examples() {
        assert_abs_diff_eq!(qae_error_bound(0.6541, 4), 1.36402, epsilon = 1e-4);
        assert_abs_diff_eq!(qae_error_bound(0.5, 1024), 0.0030774, epsilon = 1e-6);
        assert_abs_diff_eq!(qae_error_bound(0.0, 8), PI * PI / 64.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_amplitude_is_point_mass() {
        let oracle = StatePrepOracle::synthetic(0.0f64).unwrap();
        let pmf = qae_outcome_distribution(&oracle, 3).unwrap();
        assert_abs_diff_eq!(pmf[0], 1.0, epsilon = 1e-12);
        let est = run_qae(&oracle, &QaeConfig::new(3, 10).unwrap(), 1).unwrap();
        assert_eq!(est.y, 0);
        assert_eq!(est.a_hat, 0.0);
    }

    #[test]
    fn half_amplitude_is_exact() {
        let oracle = StatePrepOracle::synthetic(0.5f64).unwrap();
        for t in 2..6 {
            let est = run_qae(&oracle, &QaeConfig::new(t, 5).unwrap(), 3).unwrap();
            assert_abs_diff_eq!(est.a_hat, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn fused_and_gate_by_gate_agree() {
        let oracle = StatePrepOracle::synthetic(0.3f64).unwrap();
        for t in 1..5 {
            let a = qae_outcome_distribution_with(&oracle, t, QpeMode::Fused).unwrap();
            let b = qae_outcome_distribution_with(&oracle, t, QpeMode::GateByGate).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn statevector_matches_closed_form() {
        let a = 0.37f64;
        let oracle = StatePrepOracle::synthetic(a).unwrap();
        let theta = a.sqrt().asin();
        for t in 1..7 {
            let sim = qae_outcome_distribution(&oracle, t).unwrap();
            let cf = qpe_pmf_closed_form(theta, t);
            for (x, y) in sim.iter().zip(&cf) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn budget_accounting() {
        let c = QaeConfig::new(4, 100).unwrap();
        assert_eq!(c.n_queries(), 16);
        assert_eq!(c.samples_used(), 3200);
        assert!(QaeConfig::new(0, 1).is_err());
        assert!(matches!(QaeConfig::new(2, 0), Err(QkcError::ZeroShots)));
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let oracle = StatePrepOracle::synthetic(0.0f64).unwrap();
        let d = qae_exact_distribution(&oracle, 2).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf, 1e-15).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0], "y,a_of_y,probability");
        let p: f64 = rows[1].strip_prefix("0,0.0,").unwrap().parse().unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
    }
}
