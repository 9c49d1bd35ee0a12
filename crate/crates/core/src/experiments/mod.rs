//! Simulation designs, replicate studies and timing comparisons.

pub mod bench;
pub mod design;
pub mod metrics;
pub mod replicate;

pub use bench::{run_bench, BenchResult, BenchRow, Method, SlopeFit};
pub use design::{gen_design, CovKind, SignalSet, SimData, SimDesign};
pub use metrics::{compute_metrics, Coverage, PointErrors, ReplicateMetrics};
pub use replicate::{run_replicates, Aggregate, ReplicateOutcome, ReplicateReport, METRIC_NAMES};
