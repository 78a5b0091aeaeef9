//! Experiments that check the kernel, means and counterexample estimates
//! numerically and emit [`ExperimentReport`]s.

mod kernels;
mod lemmas;
pub mod report;
mod strong;
mod theorem2;

pub use kernels::{check_kernel_l1_bounds, transform_selftest, DIRECT_TRANSFORM_LIMIT, PLATEAU_TOLERANCE};
pub use lemmas::{check_lemma1, check_lemma2, lemma_constants, lemma_orders, CONSTANT_STABILITY};
pub use report::{Check, ExperimentReport, OutputFormat, PlotPoint, Record, Relation, Summary, SCHEMA_VERSION};
pub use strong::{
    atom_series, fejer_comparison, fejer_strong_sum, remark1_report, remark1_sum, strong_sum_curves,
    strong_weight, theorem1_depths, theorem1_ratio, trial_parameters, AtomSeries, StrongSums,
    DEPTH_GROWTH_TOLERANCE,
};
pub use theorem2::{direct_divergence_report, theorem2_growth};
