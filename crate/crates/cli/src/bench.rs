//! Throughput measurement for the `bench` subcommand.

use std::hint::black_box;
use std::sync::Arc;
use std::time::Instant;

use optwin_core::baselines::AdwinConfig;
use optwin_core::{Adwin, CutTable, DriftDetector, Optwin, OptwinConfig, SplitMix64};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BenchDetector {
    Optwin,
    Adwin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub detector: String,
    pub n: usize,
    pub secs_n: f64,
    pub secs_2n: f64,
    /// Elapsed time on 2n elements over elapsed time on n.
    pub ratio: f64,
    /// Drift flags raised on a constant stream of n elements.
    pub constant_flags: usize,
    /// ADWIN only: largest per-element candidate-cut count divided by log2|W|.
    pub max_cuts_per_log_width: Option<f64>,
    /// ADWIN only: mean candidate cuts per element.
    pub mean_cuts: Option<f64>,
}

impl BenchSummary {
    pub fn ns_per_element_n(&self) -> f64 {
        self.secs_n * 1e9 / self.n as f64
    }

    pub fn ns_per_element_2n(&self) -> f64 {
        self.secs_2n * 1e9 / (2 * self.n) as f64
    }
}

impl std::fmt::Display for BenchSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "detector        {}", self.detector)?;
        writeln!(f, "n               {}", self.n)?;
        writeln!(f, "time(n)         {:.4} s  ({:.1} ns/element)", self.secs_n, self.ns_per_element_n())?;
        writeln!(f, "time(2n)        {:.4} s  ({:.1} ns/element)", self.secs_2n, self.ns_per_element_2n())?;
        writeln!(f, "ratio 2n/n      {:.3}", self.ratio)?;
        write!(f, "constant flags  {}", self.constant_flags)?;
        if let (Some(c), Some(m)) = (self.max_cuts_per_log_width, self.mean_cuts) {
            write!(f, "\ncuts/element    {m:.2} mean, {c:.2} max per log2|W|")?;
        }
        Ok(())
    }
}

pub struct BenchParams {
    pub detector: BenchDetector,
    pub n: usize,
    pub rho: f64,
    pub w_max: usize,
    pub reps: usize,
    pub seed: u64,
}

/// Time `n` and `2n` elements of a Bernoulli(0.2) error stream, keeping the
/// fastest of `reps` repetitions of each.
pub fn run_bench(p: &BenchParams) -> Result<BenchSummary> {
    let mut rng = SplitMix64::new(p.seed);
    let xs: Vec<f64> = (0..2 * p.n).map(|_| f64::from(u8::from(rng.bernoulli(0.2)))).collect();
    let table = match p.detector {
        BenchDetector::Optwin => {
            let cfg = OptwinConfig::new(0.99, p.rho, p.w_max)?;
            Some((cfg, Arc::new(CutTable::build(&cfg)?)))
        }
        BenchDetector::Adwin => None,
    };
    let make = || -> Result<Box<dyn DriftDetector>> {
        Ok(match &table {
            Some((cfg, t)) => Box::new(Optwin::with_table(*cfg, t.clone())?),
            None => Box::new(Adwin::new(AdwinConfig::default())?),
        })
    };
    let time = |len: usize| -> Result<f64> {
        let mut best = f64::INFINITY;
        for _ in 0..p.reps.max(1) {
            let mut d = make()?;
            let start = Instant::now();
            let mut flags = 0usize;
            for &x in &xs[..len] {
                flags += usize::from(d.add_element(black_box(x))?.is_drift());
            }
            black_box(flags);
            best = best.min(start.elapsed().as_secs_f64());
        }
        Ok(best)
    };
    let secs_n = time(p.n)?;
    let secs_2n = time(2 * p.n)?;

    let mut constant = make()?;
    let mut constant_flags = 0;
    for _ in 0..p.n {
        constant_flags += usize::from(constant.add_element(0.3)?.is_drift());
    }

    let (max_cuts_per_log_width, mean_cuts) = match p.detector {
        BenchDetector::Adwin => {
            let (worst, mean) = adwin_cut_profile(&xs[..p.n])?;
            (Some(worst), Some(mean))
        }
        BenchDetector::Optwin => (None, None),
    };
    let name = make()?.name();
    Ok(BenchSummary {
        detector: name,
        n: p.n,
        secs_n,
        secs_2n,
        ratio: secs_2n / secs_n,
        constant_flags,
        max_cuts_per_log_width,
        mean_cuts,
    })
}

/// Largest `cuts / log2|W|` over all steps and the mean cut count.
pub fn adwin_cut_profile(xs: &[f64]) -> Result<(f64, f64)> {
    let mut d = Adwin::new(AdwinConfig::default())?;
    let mut worst = 0.0f64;
    for &x in xs {
        d.add_element(x)?;
        let log_w = (d.width().max(2) as f64).log2();
        worst = worst.max(d.last_scan() as f64 / log_w);
    }
    Ok((worst, d.cuts_examined() as f64 / xs.len().max(1) as f64))
}
