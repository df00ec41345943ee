//! Exact marginals, Pauli-Z expectations and shot sampling.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{QkcError, Result};
use crate::rng::stream_rng;
use crate::scalar::Real;
use crate::sim::StateVector;

/// Histogram of measured values over a declared set of qubits.
///
/// Keys are register values with the first declared qubit as the least
/// significant bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotCounts {
    width: usize,
    counts: BTreeMap<u64, u64>,
    total_shots: u64,
}

impl ShotCounts {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            counts: BTreeMap::new(),
            total_shots: 0,
        }
    }

    pub fn from_counts(width: usize, counts: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut out = Self::new(width);
        for (value, count) in counts {
            out.record(value, count)?;
        }
        Ok(out)
    }

    pub fn record(&mut self, value: u64, count: u64) -> Result<()> {
        if self.width < 64 && value >> self.width != 0 {
            return Err(QkcError::InvalidConfig(format!(
                "outcome {value} does not fit in {} bits",
                self.width
            )));
        }
        if count > 0 {
            *self.counts.entry(value).or_insert(0) += count;
            self.total_shots += count;
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    pub fn get(&self, value: u64) -> u64 {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&v, &c)| (v, c))
    }

    pub fn frequency(&self, value: u64) -> f64 {
        if self.total_shots == 0 {
            return 0.0;
        }
        self.get(value) as f64 / self.total_shots as f64
    }

    /// Most frequent value; ties go to the smallest value.
    pub fn mode(&self) -> Option<u64> {
        let mut best: Option<(u64, u64)> = None;
        for (&v, &c) in &self.counts {
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((v, c));
            }
        }
        best.map(|(v, _)| v)
    }

    /// Bitstring with the most significant declared qubit first.
    pub fn bitstring(&self, value: u64) -> String {
        (0..self.width)
            .rev()
            .map(|b| if (value >> b) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

impl<T: Real> StateVector<T> {
    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        if qubits.is_empty() {
            return Err(QkcError::Empty("qubit list"));
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits() {
                return Err(QkcError::IndexOutOfRange {
                    index: q,
                    n_qubits: self.n_qubits(),
                });
            }
            if qubits[..i].contains(&q) {
                return Err(QkcError::InvalidConfig(format!("qubit {q} listed twice")));
            }
        }
        Ok(())
    }

    /// Exact probability that `qubit` reads `outcome`.
    pub fn probability(&self, qubit: usize, outcome: bool) -> Result<T> {
        self.check_qubits(&[qubit])?;
        let bit = 1usize << qubit;
        let p1: T = self
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let p1 = p1.max(T::zero()).min(T::one());
        Ok(if outcome { p1 } else { T::one() - p1 })
    }

    /// Exact distribution of the register formed by `qubits` (first = LSB).
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<T>> {
        self.check_qubits(qubits)?;
        let mut out = vec![T::zero(); 1 << qubits.len()];
        for (i, a) in self.amplitudes().iter().enumerate() {
            let v = qubits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (b, &q)| acc | (((i >> q) & 1) << b));
            out[v] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Exact `⟨Z ⊗ … ⊗ Z⟩` over `qubits`.
    pub fn expectation_z(&self, qubits: &[usize]) -> Result<T> {
        self.check_qubits(qubits)?;
        let mask = qubits.iter().fold(0usize, |acc, q| acc | (1 << q));
        let e: T = self
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if (i & mask).count_ones() % 2 == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum();
        Ok(e.max(-T::one()).min(T::one()))
    }

    /// `shots` i.i.d. measurements of `qubits`, reproducible for a fixed seed.
    pub fn sample(&self, qubits: &[usize], shots: u64, rng_seed: u64) -> Result<ShotCounts> {
        let mut rng = stream_rng(rng_seed, 0);
        self.sample_with(qubits, shots, &mut rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        shots: u64,
        rng: &mut R,
    ) -> Result<ShotCounts> {
        let probs = self.marginal(qubits)?;
        let probs: Vec<f64> = probs.into_iter().map(Real::as_f64).collect();
        let counts = sample_distribution(&probs, shots, rng)?;
        ShotCounts::from_counts(
            qubits.len(),
            counts.into_iter().enumerate().map(|(v, c)| (v as u64, c)),
        )
    }
}

/// Outcome counts of `shots` i.i.d. draws from `probs`.
///
/// Draws the multinomial count vector through successive conditional
/// binomials, which has exactly the law of per-shot sampling.
pub fn sample_distribution<R: Rng + ?Sized>(
    probs: &[f64],
    shots: u64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(QkcError::ZeroShots);
    }
    if probs.is_empty() {
        return Err(QkcError::Empty("probability vector"));
    }
    let total: f64 = probs.iter().sum();
    if total.is_nan() || total <= 0.0 || probs.iter().any(|p| *p < -1e-12 || !p.is_finite()) {
        return Err(QkcError::InvalidConfig("invalid probability vector".into()));
    }
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass_left = total;
    let last_nonzero = probs.iter().rposition(|p| *p > 0.0).unwrap_or(0);
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i == last_nonzero {
            counts[i] = remaining;
            break;
        }
        let p = p.max(0.0);
        let q = (p / mass_left).clamp(0.0, 1.0);
        let c = if q <= 0.0 {
            0
        } else if q >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, q)
                .expect("valid binomial")
                .sample(rng)
        };
        counts[i] = c;
        remaining -= c;
        mass_left -= p;
        if mass_left <= 0.0 {
            counts[i] += remaining;
            break;
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::GateSpec;
    use approx::assert_abs_diff_eq;

    fn plus() -> StateVector<f64> {
        let mut s = StateVector::new(1).unwrap();
        s.apply(&GateSpec::h(0)).unwrap();
        s
    }

    #[test]
    fn probability_examples() {
        let zero = StateVector::<f64>::new(1).unwrap();
        assert_eq!(zero.probability(0, false).unwrap(), 1.0);
        assert_abs_diff_eq!(plus().probability(0, true).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(
            zero.probability(1, true),
            Err(QkcError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn expectation_examples() {
        let zero = StateVector::<f64>::new(1).unwrap();
        assert_eq!(zero.expectation_z(&[0]).unwrap(), 1.0);
        assert_abs_diff_eq!(plus().expectation_z(&[0]).unwrap(), 0.0, epsilon = 1e-15);
        assert!(zero.expectation_z(&[]).is_err());
    }

    #[test]
    fn sampling_plus_state_converges() {
        let counts = plus().sample(&[0], 1_000_000, 11).unwrap();
        assert_eq!(counts.total_shots(), 1_000_000);
        assert!((counts.frequency(1) - 0.5).abs() < 0.002);
    }

    #[test]
    fn sampling_zero_state_is_deterministic() {
        let zero = StateVector::<f64>::new(2).unwrap();
        let counts = zero.sample(&[0, 1], 500, 3).unwrap();
        assert_eq!(counts.get(0), 500);
        assert_eq!(counts.bitstring(0), "00");
        assert!(matches!(zero.sample(&[0], 0, 1), Err(QkcError::ZeroShots)));
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = plus();
        assert_eq!(
            s.sample(&[0], 1000, 5).unwrap(),
            s.sample(&[0], 1000, 5).unwrap()
        );
    }

    #[test]
    fn mode_prefers_smallest_on_ties() {
        let c = ShotCounts::from_counts(2, [(3, 4), (1, 4), (2, 1)]).unwrap();
        assert_eq!(c.mode(), Some(1));
        assert!(ShotCounts::new(1).mode().is_none());
        assert!(ShotCounts::from_counts(1, [(2, 1)]).is_err());
    }

    #[test]
    fn multinomial_frequencies_within_four_sigma() {
        let probs = [0.1, 0.0, 0.35, 0.05, 0.5];
        let mut rng = stream_rng(99, 1);
        let n = 200_000u64;
        let counts = sample_distribution(&probs, n, &mut rng).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), n);
        assert_eq!(counts[1], 0);
        for (p, c) in probs.iter().zip(&counts) {
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() <= 4.0 * sigma + 1e-12);
        }
    }
}
