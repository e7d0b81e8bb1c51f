//! ADWIN with an exponential-histogram window.
//!
//! Bucket rows hold buckets of `2^row` elements; a row with more than `M`
//! buckets merges its two oldest into one bucket of the next row. Every
//! insertion scans the bucket boundaries as candidate cuts and drops the
//! oldest bucket while some cut separates two sub-windows whose means differ
//! by more than
//!
//! ```text
//! ε_cut = sqrt(2/m · σ²_W · ln(2/δ')) + 2/(3m) · ln(2/δ'),
//! m = 1 / (1/n0 + 1/n1),  δ' = δ / |W|
//! ```

use std::collections::VecDeque;

use crate::detection::{Detection, DriftDetector};
use crate::error::{domain, Error, Result};

pub const DEFAULT_DELTA: f64 = 0.002;
pub const DEFAULT_MAX_BUCKETS: usize = 5;
/// Minimum number of elements on each side of a candidate cut.
pub const MIN_SUBWINDOW: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdwinConfig {
    pub delta: f64,
    pub max_buckets: usize,
}

impl Default for AdwinConfig {
    fn default() -> Self {
        Self { delta: DEFAULT_DELTA, max_buckets: DEFAULT_MAX_BUCKETS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Bucket {
    n: u64,
    sum: f64,
    /// Sum of squared deviations from the bucket mean.
    m2: f64,
}

impl Bucket {
    fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    fn merge(a: &Bucket, b: &Bucket) -> Bucket {
        let n = a.n + b.n;
        let d = a.mean() - b.mean();
        Bucket {
            n,
            sum: a.sum + b.sum,
            m2: a.m2 + b.m2 + d * d * (a.n as f64) * (b.n as f64) / n as f64,
        }
    }
}

/// ADWIN state. `rows[i]` holds buckets of size `2^i`, oldest at the front.
#[derive(Debug, Clone)]
pub struct Adwin {
    cfg: AdwinConfig,
    rows: Vec<VecDeque<Bucket>>,
    total: Bucket,
    cuts_examined: u64,
    last_scan: u64,
}

impl Adwin {
    pub fn new(cfg: AdwinConfig) -> Result<Self> {
        if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
            return Err(Error::Config(format!("ADWIN delta must lie in (0, 1), got {}", cfg.delta)));
        }
        if cfg.max_buckets < 2 {
            return Err(Error::Config("ADWIN needs at least 2 buckets per row".into()));
        }
        Ok(Self {
            cfg,
            rows: Vec::new(),
            total: Bucket { n: 0, sum: 0.0, m2: 0.0 },
            cuts_examined: 0,
            last_scan: 0,
        })
    }

    pub fn width(&self) -> u64 {
        self.total.n
    }

    pub fn mean(&self) -> f64 {
        if self.total.n == 0 {
            0.0
        } else {
            self.total.mean()
        }
    }

    pub fn variance(&self) -> f64 {
        if self.total.n == 0 {
            0.0
        } else {
            self.total.m2 / self.total.n as f64
        }
    }

    pub fn bucket_count(&self) -> usize {
        self.rows.iter().map(VecDeque::len).sum()
    }

    /// Candidate cuts evaluated since construction.
    pub fn cuts_examined(&self) -> u64 {
        self.cuts_examined
    }

    /// Candidate cuts evaluated during the most recent insertion.
    pub fn last_scan(&self) -> u64 {
        self.last_scan
    }

    fn insert(&mut self, x: f64) {
        let b = Bucket { n: 1, sum: x, m2: 0.0 };
        self.total = if self.total.n == 0 { b } else { Bucket::merge(&self.total, &b) };
        if self.rows.is_empty() {
            self.rows.push(VecDeque::new());
        }
        self.rows[0].push_back(b);
        let mut row = 0;
        while self.rows[row].len() > self.cfg.max_buckets {
            let a = self.rows[row].pop_front().expect("row over capacity");
            let b = self.rows[row].pop_front().expect("row over capacity");
            if self.rows.len() == row + 1 {
                self.rows.push(VecDeque::new());
            }
            self.rows[row + 1].push_back(Bucket::merge(&a, &b));
            row += 1;
        }
    }

    fn drop_oldest(&mut self) {
        let Some(row) = self.rows.iter().rposition(|r| !r.is_empty()) else {
            return;
        };
        let b = self.rows[row].pop_front().expect("non-empty row");
        let n = self.total.n - b.n;
        if n == 0 {
            self.total = Bucket { n: 0, sum: 0.0, m2: 0.0 };
        } else {
            let rest_sum = self.total.sum - b.sum;
            let rest_mean = rest_sum / n as f64;
            let d = b.mean() - rest_mean;
            let m2 = self.total.m2 - b.m2 - d * d * (b.n as f64) * (n as f64) / self.total.n as f64;
            self.total = Bucket { n, sum: rest_sum, m2: m2.max(0.0) };
        }
        while self.rows.last().is_some_and(VecDeque::is_empty) {
            self.rows.pop();
        }
    }

    /// Scan the bucket boundaries from the oldest end; true if some cut fails.
    fn find_cut(&mut self) -> bool {
        let n = self.total.n;
        if n < 2 * MIN_SUBWINDOW {
            return false;
        }
        let variance = self.variance();
        let ln_term = (2.0 * n as f64 / self.cfg.delta).ln();
        let mut n0 = 0u64;
        let mut sum0 = 0.0;
        for row in self.rows.iter().rev() {
            for b in row {
                n0 += b.n;
                sum0 += b.sum;
                let n1 = n - n0;
                if n1 < MIN_SUBWINDOW {
                    return false;
                }
                if n0 < MIN_SUBWINDOW {
                    continue;
                }
                self.cuts_examined += 1;
                self.last_scan += 1;
                let mean0 = sum0 / n0 as f64;
                let mean1 = (self.total.sum - sum0) / n1 as f64;
                let m = 1.0 / (1.0 / n0 as f64 + 1.0 / n1 as f64);
                let eps = (2.0 / m * variance * ln_term).sqrt() + 2.0 / (3.0 * m) * ln_term;
                if (mean0 - mean1).abs() > eps {
                    return true;
                }
            }
        }
        false
    }
}

impl DriftDetector for Adwin {
    fn add_element(&mut self, x: f64) -> Result<Detection> {
        if !(0.0..=1.0).contains(&x) {
            return domain(format!("ADWIN expects values in [0, 1], got {x}"));
        }
        self.insert(x);
        self.last_scan = 0;
        let mut drift = false;
        while self.find_cut() {
            self.drop_oldest();
            drift = true;
        }
        Ok(if drift { Detection::DRIFT } else { Detection::NO_CHANGE })
    }

    fn reset(&mut self) {
        self.rows.clear();
        self.total = Bucket { n: 0, sum: 0.0, m2: 0.0 };
    }

    fn name(&self) -> String {
        "ADWIN".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams::SplitMix64;

    #[test]
    fn constant_stream_never_drifts() {
        let mut a = Adwin::new(AdwinConfig::default()).unwrap();
        for _ in 0..10_000 {
            assert!(!a.add_element(0.4).unwrap().is_drift());
        }
        assert_eq!(a.width(), 10_000);
        assert!((a.mean() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn step_change_shrinks_window() {
        let mut a = Adwin::new(AdwinConfig::default()).unwrap();
        let mut flagged = false;
        for i in 0..2000 {
            let x = if i < 1000 { 0.0 } else { 1.0 };
            flagged |= a.add_element(x).unwrap().is_drift();
        }
        assert!(flagged);
        assert!(a.mean() >= 0.9, "mean {}", a.mean());
        assert!(a.width() < 2000);
    }

    #[test]
    fn bucket_invariants() {
        let mut a = Adwin::new(AdwinConfig::default()).unwrap();
        let mut rng = SplitMix64::new(5);
        for i in 1..=5000u64 {
            a.add_element(rng.next_f64()).unwrap();
            let counted: u64 = a.rows.iter().flatten().map(|b| b.n).sum();
            assert_eq!(counted, a.width());
            assert!(a.width() <= i);
            for (r, row) in a.rows.iter().enumerate() {
                assert!(row.len() <= a.cfg.max_buckets);
                assert!(row.iter().all(|b| b.n == 1 << r));
            }
        }
    }

    #[test]
    fn totals_match_recomputation() {
        let mut a = Adwin::new(AdwinConfig::default()).unwrap();
        let mut rng = SplitMix64::new(8);
        let mut kept = Vec::new();
        for _ in 0..3000 {
            let x = rng.next_f64();
            kept.push(x);
            a.add_element(x).unwrap();
        }
        let tail = &kept[kept.len() - a.width() as usize..];
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        let var = tail.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / tail.len() as f64;
        assert!((a.mean() - mean).abs() < 1e-9);
        assert!((a.variance() - var).abs() < 1e-9);
    }

    #[test]
    fn scan_is_logarithmic() {
        let mut a = Adwin::new(AdwinConfig::default()).unwrap();
        for i in 0..100_000u64 {
            a.add_element((i % 2) as f64).unwrap();
            let w = a.width().max(2) as f64;
            assert!(a.last_scan() as f64 <= 12.0 * w.log2());
        }
    }

    #[test]
    fn rejects_out_of_range() {
        let mut a = Adwin::new(AdwinConfig::default()).unwrap();
        assert!(a.add_element(1.5).is_err());
        assert!(a.add_element(-0.1).is_err());
        assert!(Adwin::new(AdwinConfig { delta: 0.0, max_buckets: 5 }).is_err());
    }
}
