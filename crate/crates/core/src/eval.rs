//! Scoring detections against known drift positions.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::detection::Verdict;
use crate::error::{Error, Result};

pub const DEFAULT_SUDDEN_WINDOW: usize = 1000;
pub const REPORT_HEADER: &str = "experiment,detector,delay,fp_per_run,precision,recall,f1";
pub const TRACE_HEADER: &str = "step,verdict";

/// A detection at most `window` steps after a true drift counts as a hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub window: usize,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self { window: DEFAULT_SUDDEN_WINDOW }
    }
}

impl MatchConfig {
    pub fn new(window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::Config("match window must be positive".into()));
        }
        Ok(Self { window })
    }

    /// Window for a gradual drift of the given width.
    pub fn gradual(width: usize) -> Self {
        Self { window: width + DEFAULT_SUDDEN_WINDOW }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub delays: Vec<u64>,
    /// Number of runs folded into this report.
    pub runs: u64,
}

impl EvalReport {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    /// Mean delay over true positives; NaN when there are none.
    pub fn mean_delay(&self) -> f64 {
        if self.delays.is_empty() {
            f64::NAN
        } else {
            self.delays.iter().sum::<u64>() as f64 / self.delays.len() as f64
        }
    }

    pub fn fp_per_run(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.fp as f64 / self.runs as f64
        }
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn check_sorted(name: &str, xs: &[usize]) -> Result<()> {
    match xs.windows(2).position(|w| w[0] > w[1]) {
        Some(i) => Err(Error::Domain(format!("{name} are not sorted at position {}", i + 1))),
        None => Ok(()),
    }
}

/// Greedy one-to-one matching: each true drift `g` takes the earliest unused
/// detection in `[g, g + window]`.
pub fn match_detections(truth: &[usize], detections: &[usize], cfg: MatchConfig) -> Result<EvalReport> {
    check_sorted("true drift positions", truth)?;
    check_sorted("detections", detections)?;
    let mut used = vec![false; detections.len()];
    let mut report = EvalReport { runs: 1, ..Default::default() };
    let mut start = 0;
    for &g in truth {
        while start < detections.len() && detections[start] < g {
            start += 1;
        }
        let hit = (start..detections.len())
            .take_while(|&j| detections[j] <= g + cfg.window)
            .find(|&j| !used[j]);
        match hit {
            Some(j) => {
                used[j] = true;
                report.tp += 1;
                report.delays.push((detections[j] - g) as u64);
            }
            None => report.fn_ += 1,
        }
    }
    report.fp = used.iter().filter(|&&u| !u).count() as u64;
    Ok(report)
}

/// Micro-average: sum the counts, concatenate the delays.
pub fn aggregate(reports: &[EvalReport]) -> Result<EvalReport> {
    if reports.is_empty() {
        return Err(Error::Domain("cannot aggregate zero reports".into()));
    }
    Ok(reports.iter().fold(EvalReport::default(), |mut acc, r| {
        acc.tp += r.tp;
        acc.fp += r.fp;
        acc.fn_ += r.fn_;
        acc.delays.extend_from_slice(&r.delays);
        acc.runs += r.runs;
        acc
    }))
}

/// One CSV row per `(experiment, detector)`, sorted by key.
pub fn write_report<W: Write>(reports: &BTreeMap<(String, String), EvalReport>, mut w: W) -> Result<()> {
    writeln!(w, "{REPORT_HEADER}")?;
    for ((experiment, detector), r) in reports {
        writeln!(
            w,
            "{},{},{:.4},{:.4},{:.4},{:.4},{:.4}",
            csv_field(experiment),
            csv_field(detector),
            r.mean_delay(),
            r.fp_per_run(),
            r.precision(),
            r.recall(),
            r.f1()
        )?;
    }
    Ok(())
}

/// Per-step verdicts of one run, skipping `no_change` steps.
pub fn write_trace<W: Write>(verdicts: &[(usize, Verdict)], mut w: W) -> Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for (step, v) in verdicts {
        writeln!(w, "{step},{v}")?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
