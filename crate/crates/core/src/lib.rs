//! Latency-sampling analysis for in-band telemetry.
//!
//! The crate models per-link M/M/1 delays over a metro topology, evaluates the
//! exact path-delay distribution, plans sample budgets with Cochran's formula
//! and scores control-plane decisions taken from finite samples.

pub mod decision;
pub mod delay;
mod error;
pub mod experiments;
pub mod sampling;
pub mod seed;
pub mod topology;

pub use decision::{
    classify, confusion, ground_truth, select_best_path, ComplianceRule, ComplianceVerdict,
    ConfusionRecord, ConfusionReport, ErrorClass, TieBreak, TieBreakMode,
};
pub use delay::{
    build_path_model, build_path_model_with, calibrate_path, calibrate_path_with_tolerance,
    Calibration, PathDelayModel, DEFAULT_CALIBRATION_TOLERANCE, DEFAULT_SERVICE_TIME_US,
    PROPAGATION_US_PER_KM,
};
pub use error::{Error, Result};
pub use experiments::{
    run_error_table, run_heatmap, run_selection, ErrorRow, ExperimentConfig, HeatCell,
    HeatmapResult, SelectionResult,
};
pub use sampling::{
    cochran_error, cochran_n, collect_samples, empirical_fraction_below, CochranPlan, SampleSet,
};
pub use topology::{all_pairs, load_topology, route, LinkSpec, NodeSpec, PathSpec, Role, Topology};
