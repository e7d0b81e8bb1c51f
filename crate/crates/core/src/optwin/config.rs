use crate::error::{Error, Result};

pub const DEFAULT_W_MIN: usize = 30;
pub const DEFAULT_ETA: f64 = 1e-5;

/// Parameters of an OPTWIN detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptwinConfig {
    /// Overall confidence level; each of the four tests uses `delta^(1/4)`.
    pub delta: f64,
    /// Minimum mean shift, in units of the historical std, that must be caught.
    pub rho: f64,
    pub w_max: usize,
    pub w_min: usize,
    /// Added to both standard deviations before any division.
    pub eta: f64,
    /// Only flag changes where the recent mean is at least the historical one.
    pub one_sided: bool,
    /// On drift, keep the recent sub-window instead of clearing everything.
    pub keep_new_window_on_reset: bool,
}

impl OptwinConfig {
    pub fn new(delta: f64, rho: f64, w_max: usize) -> Result<Self> {
        let cfg = Self {
            delta,
            rho,
            w_max,
            w_min: DEFAULT_W_MIN,
            eta: DEFAULT_ETA,
            one_sided: true,
            keep_new_window_on_reset: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_one_sided(mut self, one_sided: bool) -> Self {
        self.one_sided = one_sided;
        self
    }

    pub fn with_keep_new_window(mut self, keep: bool) -> Self {
        self.keep_new_window_on_reset = keep;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::Config(format!("rho must be positive, got {}", self.rho)));
        }
        if self.w_min < DEFAULT_W_MIN {
            return Err(Error::Config(format!("w_min must be at least 30, got {}", self.w_min)));
        }
        if self.w_max < self.w_min {
            return Err(Error::Config(format!(
                "w_max ({}) must be at least w_min ({})",
                self.w_max, self.w_min
            )));
        }
        if self.w_max > u32::MAX as usize || self.w_min > u16::MAX as usize {
            return Err(Error::Config("window bounds exceed the table format".into()));
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::Config(format!("eta must be non-negative, got {}", self.eta)));
        }
        Ok(())
    }

    /// Per-test confidence `delta^(1/4)`.
    pub fn delta_prime(&self) -> f64 {
        self.delta.powf(0.25)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(OptwinConfig::new(0.99, 0.5, 1000).is_ok());
        assert!(OptwinConfig::new(1.0, 0.5, 1000).is_err());
        assert!(OptwinConfig::new(0.0, 0.5, 1000).is_err());
        assert!(OptwinConfig::new(0.99, 0.0, 1000).is_err());
        assert!(OptwinConfig::new(0.99, -1.0, 1000).is_err());
        assert!(OptwinConfig::new(0.99, 0.5, 29).is_err());
        let mut cfg = OptwinConfig::new(0.99, 0.5, 100).unwrap();
        cfg.w_min = 20;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn delta_prime_is_fourth_root() {
        let cfg = OptwinConfig::new(0.99, 0.1, 100).unwrap();
        assert!((cfg.delta_prime().powi(4) - 0.99).abs() < 1e-15);
    }
}
