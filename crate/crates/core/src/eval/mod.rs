//! Accuracy of generated call graphs against hand-traced ground truth.

mod report;
mod truth;

pub use report::{
    compare, compare_sets, ratio, run_benchmark, AccuracyReport, EntryRecord, FixedTimer, Timer, Timing, WallClock,
};
pub use truth::{load_suite, match_key, GroundTruthGraph, TRUTH_EXTENSION};
