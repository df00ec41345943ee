use serde::{Deserialize, Serialize};

use crate::error::{QkcError, Result};

/// The error at sorted position `⌊0.81 I⌋` (0-based), i.e. the 1621st of
/// 2000 values.
pub fn percentile_81(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(QkcError::Empty("error list"));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let idx = (81 * sorted.len() / 100).min(sorted.len() - 1);
    Ok(sorted[idx])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Fit {
    Line(FitResult),
    /// Fewer than two points with a positive error.
    Degenerate {
        usable_points: usize,
    },
}

impl Fit {
    pub fn line(&self) -> Option<&FitResult> {
        match self {
            Fit::Line(f) => Some(f),
            Fit::Degenerate { .. } => None,
        }
    }

    pub fn slope(&self) -> Option<f64> {
        self.line().map(|f| f.slope)
    }
}

/// Errors at or below this are round-off of an exact estimate.
pub const ZERO_ERROR: f64 = 1e-12;

/// Least squares through `(log₂ samples, log₂ error)`.
pub fn fit_log2(points: &[(f64, f64)]) -> Fit {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(s, e)| {
            let ok = *e > ZERO_ERROR && *s > 0.0;
            if !ok {
                log::warn!("dropping point (samples {s}, error {e}) from the log fit");
            }
            ok
        })
        .map(|(s, e)| (s.log2(), e.log2()))
        .collect();
    let n = usable.len();
    if n < 2 {
        return Fit::Degenerate { usable_points: n };
    }
    let nf = n as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Fit::Degenerate { usable_points: n };
    }
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_rms = (usable
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    Fit::Line(FitResult {
        slope,
        intercept,
        residual_rms,
        points: n,
    })
}
