use std::fmt;

use crate::error::Result;

/// Outcome of feeding one element to a detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    NoChange,
    Warning,
    Drift,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NoChange => "no_change",
            Verdict::Warning => "warning",
            Verdict::Drift => "drift",
        })
    }
}

/// Test statistics that triggered a window-based drift flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftDetail {
    pub t_stat: f64,
    pub f_ratio: f64,
    pub nu_split: usize,
    pub window_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub verdict: Verdict,
    pub detail: Option<DriftDetail>,
}

impl Detection {
    pub const NO_CHANGE: Detection = Detection { verdict: Verdict::NoChange, detail: None };
    pub const WARNING: Detection = Detection { verdict: Verdict::Warning, detail: None };
    pub const DRIFT: Detection = Detection { verdict: Verdict::Drift, detail: None };

    pub fn is_drift(&self) -> bool {
        self.verdict == Verdict::Drift
    }

    pub fn is_warning(&self) -> bool {
        self.verdict == Verdict::Warning
    }
}

/// A streaming change detector fed one value at a time.
///
/// Implementations own all of their state and are single-writer; independent
/// instances can live on different threads.
pub trait DriftDetector: Send {
    /// Consume the next stream element. Detectors that only accept binary
    /// error indicators reject anything other than 0 or 1.
    fn add_element(&mut self, x: f64) -> Result<Detection>;

    /// Forget everything seen so far.
    fn reset(&mut self);

    /// Short human-readable label used in reports.
    fn name(&self) -> String;
}

impl<D: DriftDetector + ?Sized> DriftDetector for Box<D> {
    fn add_element(&mut self, x: f64) -> Result<Detection> {
        (**self).add_element(x)
    }

    fn reset(&mut self) {
        (**self).reset()
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

pub(crate) fn binary_input(x: f64, detector: &str) -> Result<bool> {
    if x == 0.0 {
        Ok(false)
    } else if x == 1.0 {
        Ok(true)
    } else {
        crate::error::domain(format!("{detector} accepts only 0/1 error indicators, got {x}"))
    }
}
