//! Synthetic workloads, metrics and the benchmark runner.

pub mod metrics;
pub mod runner;
pub mod space;
pub mod synth;

pub use metrics::{
    approx_bound, approx_bound_in, avg_approx_ratio, empirical_distributions, pruning_ratio,
    pruning_ratio_at_width, AarReport, EmpiricalDistributions, PruningReport,
};
pub use runner::{
    run_benchmark, write_bound_csv, write_csv, BenchCell, BenchPlan, BenchReport, BenchRow, BoundCell,
    BoundRow, Truth,
};
pub use space::{space_ratio, space_report, SpaceFormula, SpaceParams, SpaceReport};
pub use synth::{gen_queries, gen_synthetic, SyntheticSpec};
