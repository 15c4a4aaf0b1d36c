//! Experiment orchestration: configuration, Monte Carlo tail estimation
//! with confidence intervals, and bound-versus-empirical reports.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{ConvexModel, ConvexSet, CwSampler, ExperimentConfig, ModelConfig, MotifSpec, PointsSpec, TourSolver};
pub use experiments::{coupling_statistics, curie_weiss_certified_matrix, run_experiment};
pub use report::{normal_quantile, wilson_interval, ExperimentReport, ReportRow};
