//! Streaming concept-drift detection.
//!
//! The crate provides the OPTWIN detector (an optimal-split sliding window
//! checked with a Welch t-test and an F-test), five baseline detectors behind
//! the same [`DriftDetector`] interface, synthetic drift-stream generators with
//! a prequential Naive Bayes pipeline, and precision/recall/delay scoring.

pub mod baselines;
pub mod detection;
pub mod error;
pub mod eval;
pub mod optwin;
pub mod stats;
pub mod streams;

pub use baselines::{Adwin, Ddm, Ecdd, Eddm, Stepd};
pub use detection::{Detection, DriftDetail, DriftDetector, Verdict};
pub use error::{Error, Result};
pub use eval::{aggregate, match_detections, EvalReport, MatchConfig};
pub use optwin::{CutTable, Optwin, OptwinConfig};
pub use streams::{GroundTruth, SplitMix64, StreamSpec};
