//! Drift Detection Method: tracks the running error rate `p` and its standard
//! deviation `s = sqrt(p(1-p)/n)`, remembers the point where `p + s` was
//! smallest, and flags a warning or drift once `p + s` rises past that
//! minimum by a multiple of `s_min`.

use crate::detection::{binary_input, Detection, DriftDetector};
use crate::error::{Error, Result};

/// Samples required before any warning or drift can be signalled.
pub const MIN_INSTANCES: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdmConfig {
    pub warning_factor: f64,
    pub drift_factor: f64,
    pub min_instances: u64,
}

impl Default for DdmConfig {
    fn default() -> Self {
        Self { warning_factor: 2.0, drift_factor: 3.0, min_instances: MIN_INSTANCES }
    }
}

#[derive(Debug, Clone)]
pub struct Ddm {
    cfg: DdmConfig,
    n: u64,
    p: f64,
    s: f64,
    p_min: f64,
    s_min: f64,
}

impl Ddm {
    pub fn new(cfg: DdmConfig) -> Result<Self> {
        if !(cfg.warning_factor > 0.0 && cfg.drift_factor >= cfg.warning_factor) {
            return Err(Error::Config(format!(
                "DDM needs 0 < warning factor <= drift factor, got {} and {}",
                cfg.warning_factor, cfg.drift_factor
            )));
        }
        let mut d = Self { cfg, n: 0, p: 0.0, s: 0.0, p_min: 0.0, s_min: 0.0 };
        d.reset();
        Ok(d)
    }

    pub fn samples(&self) -> u64 {
        self.n
    }

    pub fn error_rate(&self) -> f64 {
        self.p
    }

    pub fn std(&self) -> f64 {
        self.s
    }

    pub fn minimum(&self) -> (f64, f64) {
        (self.p_min, self.s_min)
    }
}

impl DriftDetector for Ddm {
    fn add_element(&mut self, x: f64) -> Result<Detection> {
        let err = binary_input(x, "DDM")? as u8 as f64;
        self.n += 1;
        let n = self.n as f64;
        self.p += (err - self.p) / n;
        self.s = (self.p * (1.0 - self.p) / n).sqrt();
        if self.n < self.cfg.min_instances {
            return Ok(Detection::NO_CHANGE);
        }
        if self.p + self.s <= self.p_min + self.s_min {
            self.p_min = self.p;
            self.s_min = self.s;
        }
        // strict comparisons: with an all-correct stream p = s = p_min = s_min = 0
        let level = self.p + self.s;
        if level > self.p_min + self.cfg.drift_factor * self.s_min {
            self.reset();
            Ok(Detection::DRIFT)
        } else if level > self.p_min + self.cfg.warning_factor * self.s_min {
            Ok(Detection::WARNING)
        } else {
            Ok(Detection::NO_CHANGE)
        }
    }

    fn reset(&mut self) {
        self.n = 0;
        self.p = 0.0;
        self.s = 0.0;
        self.p_min = f64::INFINITY;
        self.s_min = f64::INFINITY;
    }

    fn name(&self) -> String {
        "DDM".into()
    }
}
