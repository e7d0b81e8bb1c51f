use std::sync::Arc;

use super::config::OptwinConfig;
use super::table::CutTable;
use crate::detection::{Detection, DriftDetail, DriftDetector, Verdict};
use crate::error::{domain, Error, Result};
use crate::stats::{RollingWindow, SubWindowMoments};

/// Statistics of one window split, as evaluated by the drift tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitTest {
    pub t_stat: f64,
    pub f_ratio: f64,
    pub mean_increased: bool,
}

/// η-regularised Welch t statistic and variance ratio of two sub-windows.
pub fn split_statistics(hist: &SubWindowMoments, new: &SubWindowMoments, eta: f64) -> SplitTest {
    let sh = hist.std + eta;
    let sn = new.std + eta;
    let se = (sh * sh / hist.count as f64 + sn * sn / new.count as f64).sqrt();
    SplitTest {
        t_stat: (hist.mean - new.mean) / se,
        f_ratio: (sn * sn) / (sh * sh),
        mean_increased: new.mean >= hist.mean,
    }
}

/// Which test, if any, flags a drift for the given statistics.
pub fn drift_decision(stats: &SplitTest, t_crit: f64, f_crit: f64, one_sided: bool) -> bool {
    let gate = !one_sided || stats.mean_increased;
    gate && (stats.f_ratio > f_crit || stats.t_stat.abs() > t_crit)
}

/// The OPTWIN detector.
#[derive(Debug, Clone)]
pub struct Optwin {
    cfg: OptwinConfig,
    table: Arc<CutTable>,
    window: RollingWindow,
    seen: u64,
}

impl Optwin {
    /// Build the cut table and a detector around it.
    pub fn new(cfg: OptwinConfig) -> Result<Self> {
        let table = Arc::new(CutTable::build(&cfg)?);
        Self::with_table(cfg, table)
    }

    /// Share an already built table between detectors.
    pub fn with_table(cfg: OptwinConfig, table: Arc<CutTable>) -> Result<Self> {
        cfg.validate()?;
        if !table.matches(&cfg) {
            return Err(Error::Config(format!(
                "cut table (delta={}, rho={}, w={}..={}) does not match the detector config \
                 (delta={}, rho={}, w={}..={})",
                table.delta(),
                table.rho(),
                table.w_min(),
                table.w_max(),
                cfg.delta,
                cfg.rho,
                cfg.w_min,
                cfg.w_max
            )));
        }
        let window = RollingWindow::new(cfg.w_max)?;
        Ok(Self { cfg, table, window, seen: 0 })
    }

    pub fn config(&self) -> &OptwinConfig {
        &self.cfg
    }

    pub fn table(&self) -> &Arc<CutTable> {
        &self.table
    }

    pub fn window_len(&self) -> usize {
        self.window.len()
    }

    pub fn window(&self) -> &RollingWindow {
        &self.window
    }

    /// Elements consumed since construction.
    pub fn seen(&self) -> u64 {
        self.seen
    }

    fn push(&mut self, x: f64) {
        if self.window.is_full() {
            self.window.evict_oldest();
        }
        self.window.push(x).expect("room was made above");
    }

    fn reset_after_drift(&mut self, nu_split: usize) {
        if self.cfg.keep_new_window_on_reset {
            self.window.set_split(0).expect("0 is always valid");
            for _ in 0..nu_split {
                self.window.evict_oldest();
            }
        } else {
            self.window.clear();
        }
    }
}

impl DriftDetector for Optwin {
    fn add_element(&mut self, x: f64) -> Result<Detection> {
        if !x.is_finite() {
            return domain(format!("OPTWIN accepts finite values only, got {x}"));
        }
        self.seen += 1;
        self.push(x);
        let len = self.window.len();
        if len < self.cfg.w_min {
            return Ok(Detection::NO_CHANGE);
        }
        let row = *self.table.row(len).expect("table covers [w_min, w_max]");
        let split = row.nu_split as usize;
        self.window.set_split(split).expect("split lies inside the window");
        let (hist, new) = self.window.split_moments();
        let (hist, new) = (hist.expect("hist non-empty"), new.expect("new non-empty"));
        let stats = split_statistics(&hist, &new, self.cfg.eta);
        if drift_decision(&stats, row.t_crit, row.f_crit, self.cfg.one_sided) {
            self.reset_after_drift(split);
            return Ok(Detection {
                verdict: Verdict::Drift,
                detail: Some(DriftDetail {
                    t_stat: stats.t_stat,
                    f_ratio: stats.f_ratio,
                    nu_split: split,
                    window_len: len,
                }),
            });
        }
        Ok(Detection::NO_CHANGE)
    }

    fn reset(&mut self) {
        self.window.clear();
    }

    fn name(&self) -> String {
        format!("OPTWIN(rho={})", self.cfg.rho)
    }
}
