//! Error-scaling comparisons and the classifier inherent-error study.

mod comparison;
mod inherent;
mod stats;

pub use comparison::{
    average_reports, run_comparison, ComparisonConfig, CurvePoint, ErrorCurve, Estimator,
    ExperimentReport,
};
pub use inherent::{inherent_error_study, write_trajectories_csv, InherentConfig, Trajectory};
pub use stats::{fit_log2, percentile_81, Fit, FitResult, ZERO_ERROR};
