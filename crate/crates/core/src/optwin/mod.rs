//! The OPTWIN detector: a sliding window split at a precomputed optimal cut
//! and checked with a Welch t-test and an F-test at every step.

mod config;
mod detector;
mod format;
mod table;

pub use config::{OptwinConfig, DEFAULT_ETA, DEFAULT_W_MIN};
pub use detector::{drift_decision, split_statistics, Optwin, SplitTest};
pub use format::{CSV_HEADER, FORMAT_VERSION, HEADER_LEN, MAGIC, ROW_LEN};
pub use table::{
    evaluate_cut, cut_rhs, solve_optimal_cut, solve_optimal_cut_exhaustive, CutEval, CutRow,
    CutTable,
};
