//! Likelihood maximization over the rotation angle `θ ∈ [0, π/2]`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{QkcError, Result};
use crate::sim::ShotCounts;

/// Grid search followed by golden-section refinement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleSearch {
    pub grid_points: usize,
    pub tol: f64,
}

impl Default for MleSearch {
    fn default() -> Self {
        Self {
            grid_points: 10_000,
            tol: 1e-10,
        }
    }
}

/// Fejér kernel `|Σ_k e^{2πikδ}|² / N²`, periodic in `δ` with period 1.
fn fejer(delta: f64, n: f64) -> f64 {
    let d = delta - delta.round();
    if d.abs() < 1e-13 {
        return 1.0;
    }
    let r = (PI * n * d).sin() / (n * (PI * d).sin());
    r * r
}

/// `Pr(y | θ)` for phase estimation on `t` qubits.
pub fn qpe_outcome_probability(theta: f64, y: u64, t: u32) -> f64 {
    let n = (1u64 << t) as f64;
    let phase = theta / PI;
    let frac = y as f64 / n;
    0.5 * fejer(phase - frac, n) + 0.5 * fejer(-phase - frac, n)
}

fn safe_ln(p: f64) -> f64 {
    p.max(1e-300).ln()
}

/// Maximizer of `f` on `[0, π/2]`.
pub fn maximize_on_quarter_turn<F: Fn(f64) -> f64>(f: F, search: &MleSearch) -> f64 {
    let points = search.grid_points.max(2);
    let step = FRAC_PI_2 / (points - 1) as f64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..points {
        let v = f(i as f64 * step);
        if v > best_v {
            best_i = i;
            best_v = v;
        }
    }
    let grid_best = best_i as f64 * step;
    let lo = (grid_best - step).max(0.0);
    let hi = (grid_best + step).min(FRAC_PI_2);
    let refined = golden_section(&f, lo, hi, search.tol);
    if f(refined) >= best_v {
        refined
    } else {
        grid_best
    }
}

fn golden_section<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Maximum-likelihood `ã` from phase-register counts.
pub fn mle_postprocess(counts: &ShotCounts, t: u32, search: &MleSearch) -> Result<f64> {
    if counts.total_shots() == 0 {
        return Err(QkcError::Empty("shot counts"));
    }
    let obs: Vec<(u64, f64)> = counts.iter().map(|(y, c)| (y, c as f64)).collect();
    Ok(mle_from_observations(&obs, t, search))
}

/// Same as [`mle_postprocess`] with real-valued weights, such as an exact pmf.
pub fn mle_postprocess_weights(weights: &[f64], t: u32, search: &MleSearch) -> Result<f64> {
    if weights.len() != 1 << t {
        return Err(QkcError::DimensionMismatch {
            expected: 1 << t,
            found: weights.len(),
        });
    }
    let obs: Vec<(u64, f64)> = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(y, w)| (y as u64, *w))
        .collect();
    if obs.is_empty() {
        return Err(QkcError::Empty("likelihood weights"));
    }
    Ok(mle_from_observations(&obs, t, search))
}

fn mle_from_observations(obs: &[(u64, f64)], t: u32, search: &MleSearch) -> f64 {
    let loglik = |theta: f64| {
        obs.iter()
            .map(|&(y, w)| w * safe_ln(qpe_outcome_probability(theta, y, t)))
            .sum::<f64>()
    };
    maximize_on_quarter_turn(loglik, search).sin().powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pmf_sums_to_one() {
        for t in 1..8 {
            for theta in [0.0, 0.1, 0.5, 0.9425, 1.2, FRAC_PI_2] {
                let s: f64 = (0..1u64 << t)
                    .map(|y| qpe_outcome_probability(theta, y, t))
                    .sum();
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn representable_peak_is_recovered() {
        let counts = ShotCounts::from_counts(3, [(2, 50), (6, 50)]).unwrap();
        let a = mle_postprocess(&counts, 3, &MleSearch::default()).unwrap();
        assert_abs_diff_eq!(a, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn empty_counts_are_rejected() {
        let counts = ShotCounts::new(3);
        assert!(mle_postprocess(&counts, 3, &MleSearch::default()).is_err());
    }

    #[test]
    fn matches_dense_grid_argmax() {
        let counts = ShotCounts::from_counts(4, [(3, 40), (4, 35), (12, 20), (13, 5)]).unwrap();
        let t = 4;
        let ll = |theta: f64| {
            counts
                .iter()
                .map(|(y, c)| c as f64 * safe_ln(qpe_outcome_probability(theta, y, t)))
                .sum::<f64>()
        };
        let dense = MleSearch {
            grid_points: 100_000,
            tol: 1e-12,
        };
        let fast = mle_postprocess(&counts, t, &MleSearch::default()).unwrap();
        let slow = maximize_on_quarter_turn(ll, &dense).sin().powi(2);
        assert_abs_diff_eq!(fast, slow, epsilon = 1e-8);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let x = maximize_on_quarter_turn(|x| -(x - 0.3).powi(2), &MleSearch::default());
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-9);
    }
}
