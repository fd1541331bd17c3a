//! Synthetic process-curve datasets with controllable drift, a zoo of drift
//! detectors, and segment-aware evaluation metrics.
//!
//! The crate is organised around one workflow:
//!
//! 1. [`generator`] solves support-point conditions per execution and
//!    samples noisy curves, producing a dataset with exact drift ground
//!    truth.
//! 2. [`detectors`] scores each execution's curve for drift suspicion,
//!    without ever seeing the ground truth.
//! 3. [`metrics`] sweeps score thresholds to segment-aware overlap curves
//!    (TAUC/sTAUC) alongside classical ROC AUC.
//! 4. [`benchmark`] runs presets × seeds × detectors and writes CSV/SVG
//!    reports.
//!
//! Everything is deterministic given the seeds embedded in the specs.

pub mod benchmark;
pub mod detectors;
pub mod error;
pub mod family;
pub mod generator;
pub mod io;
pub mod metrics;
pub mod plot;
pub mod rng;
pub mod schedule;
pub mod solver;

pub use benchmark::{
    correlate, emit_report, run_bench, BenchDataset, BenchResult, BenchRow, BenchSpec, SummaryRow,
};
pub use detectors::autoencoder::AeTrainSpec;
pub use detectors::{score, DetectorSpec};
pub use error::{Error, Result};
pub use family::{FunctionFamily, SupportCondition};
pub use generator::{
    generate, preset, DatasetSpec, GridSpec, NoiseSpec, ProcessCurveDataset, PRESET_NAMES,
};
pub use metrics::{
    auc, decompose_segments, fpr, ols, sols, stauc, tauc, threshold_curve, tpr, CurveKind,
    GroundTruth, IntegrationRule, ScoreSeries, ThresholdCurve,
};
pub use schedule::{DriftCoordinate, DriftSpec, SupportSchedule};
pub use solver::{solve_support, SolverSettings};
