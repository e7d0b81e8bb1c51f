//! Statistical Test of Equal Proportions: compares the error proportion of the
//! most recent `w` outcomes against the proportion of everything older since
//! the last reset with a continuity-corrected two-proportion z test.

use std::collections::VecDeque;

use crate::detection::{binary_input, Detection, DriftDetector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepdConfig {
    pub window: usize,
    pub alpha_drift: f64,
    pub alpha_warning: f64,
}

impl Default for StepdConfig {
    fn default() -> Self {
        Self { window: 30, alpha_drift: 0.003, alpha_warning: 0.05 }
    }
}

#[derive(Debug, Clone)]
pub struct Stepd {
    cfg: StepdConfig,
    recent: VecDeque<bool>,
    recent_errors: u64,
    older_n: u64,
    older_errors: u64,
}

/// Continuity-corrected z statistic for two proportions `e0/n0` and `e1/n1`.
/// Zero when the corrected difference vanishes or the pooled rate is 0 or 1.
pub fn proportion_z(e0: u64, n0: u64, e1: u64, n1: u64) -> f64 {
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let (n0f, n1f) = (n0 as f64, n1 as f64);
    let pooled = (e0 + e1) as f64 / (n0f + n1f);
    let inv = 1.0 / n0f + 1.0 / n1f;
    let diff = (e0 as f64 / n0f - e1 as f64 / n1f).abs() - 0.5 * inv;
    let var = pooled * (1.0 - pooled) * inv;
    if diff <= 0.0 || var <= 0.0 {
        0.0
    } else {
        diff / var.sqrt()
    }
}

/// Upper-tail probability of the standard normal.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

impl Stepd {
    pub fn new(cfg: StepdConfig) -> Result<Self> {
        if cfg.window == 0 {
            return Err(Error::Config("STEPD window must be positive".into()));
        }
        let ok = |a: f64| a > 0.0 && a < 1.0;
        if !(ok(cfg.alpha_drift) && ok(cfg.alpha_warning) && cfg.alpha_drift <= cfg.alpha_warning) {
            return Err(Error::Config(format!(
                "STEPD needs 0 < alpha_drift <= alpha_warning < 1, got {} and {}",
                cfg.alpha_drift, cfg.alpha_warning
            )));
        }
        Ok(Self {
            cfg,
            recent: VecDeque::with_capacity(cfg.window),
            recent_errors: 0,
            older_n: 0,
            older_errors: 0,
        })
    }

    /// Statistic comparing the older and recent proportions; 0 until enough
    /// data has been seen.
    pub fn statistic(&self) -> f64 {
        if !self.ready() {
            return 0.0;
        }
        proportion_z(self.older_errors, self.older_n, self.recent_errors, self.recent.len() as u64)
    }

    pub fn observations(&self) -> u64 {
        self.older_n + self.recent.len() as u64
    }

    fn ready(&self) -> bool {
        self.recent.len() == self.cfg.window && self.older_n >= self.cfg.window as u64
    }
}

impl DriftDetector for Stepd {
    fn add_element(&mut self, x: f64) -> Result<Detection> {
        let err = binary_input(x, "STEPD")?;
        if self.recent.len() == self.cfg.window {
            let old = self.recent.pop_front().expect("window is full");
            self.older_n += 1;
            self.older_errors += old as u64;
            self.recent_errors -= old as u64;
        }
        self.recent.push_back(err);
        self.recent_errors += err as u64;
        if !self.ready() {
            return Ok(Detection::NO_CHANGE);
        }
        let p = normal_sf(self.statistic());
        if p < self.cfg.alpha_drift {
            self.reset();
            Ok(Detection::DRIFT)
        } else if p < self.cfg.alpha_warning {
            Ok(Detection::WARNING)
        } else {
            Ok(Detection::NO_CHANGE)
        }
    }

    fn reset(&mut self) {
        self.recent.clear();
        self.recent_errors = 0;
        self.older_n = 0;
        self.older_errors = 0;
    }

    fn name(&self) -> String {
        "STEPD".into()
    }
}
