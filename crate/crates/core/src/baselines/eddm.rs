//! Early Drift Detection Method: monitors the distance (in samples) between
//! consecutive errors. With `p'` the running mean distance and `s'` its
//! standard deviation, the ratio `(p' + 2s') / (p'_max + 2s'_max)` falls when
//! errors start arriving closer together.

use crate::detection::{binary_input, Detection, DriftDetector};
use crate::error::{Error, Result};

pub const MIN_ERRORS: u64 = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EddmConfig {
    /// Warning when the ratio drops below this.
    pub alpha: f64,
    /// Drift when the ratio drops below this.
    pub beta: f64,
    pub min_errors: u64,
}

impl Default for EddmConfig {
    fn default() -> Self {
        Self { alpha: 0.95, beta: 0.90, min_errors: MIN_ERRORS }
    }
}

#[derive(Debug, Clone)]
pub struct Eddm {
    cfg: EddmConfig,
    n: u64,
    errors: u64,
    last_error: u64,
    mean: f64,
    m2: f64,
    p_max: f64,
    s_max: f64,
}

impl Eddm {
    pub fn new(cfg: EddmConfig) -> Result<Self> {
        if !(0.0 < cfg.beta && cfg.beta <= cfg.alpha && cfg.alpha <= 1.0) {
            return Err(Error::Config(format!(
                "EDDM needs 0 < beta <= alpha <= 1, got alpha={} beta={}",
                cfg.alpha, cfg.beta
            )));
        }
        Ok(Self { cfg, n: 0, errors: 0, last_error: 0, mean: 0.0, m2: 0.0, p_max: 0.0, s_max: 0.0 })
    }

    pub fn errors(&self) -> u64 {
        self.errors
    }

    /// Running mean and standard deviation of the inter-error distance.
    pub fn distance_stats(&self) -> (f64, f64) {
        if self.errors == 0 {
            (0.0, 0.0)
        } else {
            (self.mean, (self.m2 / self.errors as f64).sqrt())
        }
    }

    pub fn maxima(&self) -> (f64, f64) {
        (self.p_max, self.s_max)
    }

    /// Current value of the monitored ratio, if defined.
    pub fn ratio(&self) -> Option<f64> {
        let (p, s) = self.distance_stats();
        let max = self.p_max + 2.0 * self.s_max;
        (self.errors > 0 && max > 0.0).then(|| (p + 2.0 * s) / max)
    }
}

impl DriftDetector for Eddm {
    fn add_element(&mut self, x: f64) -> Result<Detection> {
        let err = binary_input(x, "EDDM")?;
        self.n += 1;
        if !err {
            return Ok(Detection::NO_CHANGE);
        }
        self.errors += 1;
        let distance = (self.n - self.last_error) as f64;
        self.last_error = self.n;
        let old = self.mean;
        self.mean += (distance - self.mean) / self.errors as f64;
        self.m2 += (distance - self.mean) * (distance - old);
        let (p, s) = self.distance_stats();
        if p + 2.0 * s > self.p_max + 2.0 * self.s_max {
            self.p_max = p;
            self.s_max = s;
            return Ok(Detection::NO_CHANGE);
        }
        if self.errors < self.cfg.min_errors {
            return Ok(Detection::NO_CHANGE);
        }
        let ratio = self.ratio().expect("errors > 0 and maximum positive");
        if ratio < self.cfg.beta {
            self.reset();
            Ok(Detection::DRIFT)
        } else if ratio < self.cfg.alpha {
            Ok(Detection::WARNING)
        } else {
            Ok(Detection::NO_CHANGE)
        }
    }

    fn reset(&mut self) {
        *self = Self::new(self.cfg).expect("config was validated");
    }

    fn name(&self) -> String {
        "EDDM".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::SplitMix64;

    fn eddm() -> Eddm {
        Eddm::new(EddmConfig::default()).unwrap()
    }

    #[test]
    fn distance_statistics() {
        let mut d = eddm();
        // errors at steps 2, 5, 6, 10 -> distances 2, 3, 1, 4
        for x in [0, 1, 0, 0, 1, 1, 0, 0, 0, 1] {
            d.add_element(x as f64).unwrap();
        }
        let (p, s) = d.distance_stats();
        assert!((p - 2.5).abs() < 1e-12);
        assert!((s - 1.25f64.sqrt()).abs() < 1e-12);
        assert_eq!(d.errors(), 4);
    }

    #[test]
    fn silent_before_thirty_errors() {
        let mut d = eddm();
        // widely spaced errors, then a dense burst: only 29 errors in total
        for i in 0..1000 {
            d.add_element((i % 50 == 49) as u8 as f64).unwrap();
        }
        for _ in 0..9 {
            assert_eq!(d.add_element(1.0).unwrap(), Detection::NO_CHANGE);
        }
        assert_eq!(d.errors(), 29);
    }

    #[test]
    fn constant_spacing_is_stable() {
        let mut d = eddm();
        for i in 0..20_000 {
            let det = d.add_element((i % 7 == 6) as u8 as f64).unwrap();
            assert_eq!(det, Detection::NO_CHANGE);
        }
        assert!((d.ratio().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn maxima_never_decrease() {
        let mut d = eddm();
        let mut rng = SplitMix64::new(2);
        let mut last = 0.0;
        for _ in 0..5000 {
            if d.add_element(rng.bernoulli(0.05) as u8 as f64).unwrap().is_drift() {
                last = 0.0;
                continue;
            }
            let (p, s) = d.maxima();
            assert!(p + 2.0 * s >= last);
            last = p + 2.0 * s;
        }
    }

    #[test]
    fn rejects_non_binary() {
        assert!(eddm().add_element(2.0).is_err());
    }
}
