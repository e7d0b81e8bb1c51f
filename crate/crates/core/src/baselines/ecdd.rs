//! EWMA for Concept Drift Detection.
//!
//! The detector keeps the running error rate `p̂` since the last reset and an
//! exponentially weighted average `Z_t = (1-λ) Z_{t-1} + λ x_t`. Under a
//! stationary Bernoulli(p̂) stream `Z_t` has standard deviation
//!
//! ```text
//! σ_Z = sqrt(p̂(1-p̂) · λ/(2-λ) · (1 - (1-λ)^{2t}))
//! ```
//!
//! and a drift is flagged when `Z_t > p̂ + L·σ_Z`. The control limit `L` is
//! chosen so that the mean run length between false alarms equals a target
//! `ARL0`; it is calibrated here by Monte Carlo simulation of the detector
//! itself over a grid of error rates and interpolated in `p̂`.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use crate::detection::{binary_input, Detection, DriftDetector};
use crate::error::{Error, Result};
use crate::streams::SplitMix64;

pub const DEFAULT_LAMBDA: f64 = 0.2;
pub const DEFAULT_ARL0: f64 = 400.0;
pub const WARM_UP: u64 = 30;
/// Error rates at which the control limit is calibrated.
pub const P_GRID: [f64; 10] = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50];
pub const GRID_CSV_HEADER: &str = "p_hat,lambda,arl0,L";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcddConfig {
    pub lambda: f64,
    pub arl0: f64,
    /// Warnings fire at this fraction of the drift limit.
    pub warning_fraction: f64,
    pub warm_up: u64,
}

impl Default for EcddConfig {
    fn default() -> Self {
        Self { lambda: DEFAULT_LAMBDA, arl0: DEFAULT_ARL0, warning_fraction: 0.5, warm_up: WARM_UP }
    }
}

impl EcddConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::Config(format!("ECDD lambda must lie in (0, 1], got {}", self.lambda)));
        }
        if !(self.arl0 >= 2.0 && self.arl0.is_finite()) {
            return Err(Error::Config(format!("ECDD ARL0 must be at least 2, got {}", self.arl0)));
        }
        if !(self.warning_fraction > 0.0 && self.warning_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "ECDD warning fraction must lie in (0, 1], got {}",
                self.warning_fraction
            )));
        }
        Ok(())
    }
}

/// Monte Carlo settings for control-limit calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub runs: usize,
    pub seed: u64,
    /// Relative tolerance on the simulated mean run length.
    pub tolerance: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self { runs: 1000, seed: 0x0ECD_D5EE_D000_0001, tolerance: 0.05 }
    }
}

/// Control limits `L(p̂)` for one `(λ, ARL0)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlLimitGrid {
    pub lambda: f64,
    pub arl0: f64,
    /// `(p, L)` pairs sorted by `p`.
    pub points: Vec<(f64, f64)>,
}

/// Bare EWMA chart state, shared by the detector and the calibration runs.
#[derive(Debug, Clone, Copy)]
struct Chart {
    n: u64,
    p_hat: f64,
    z: f64,
    /// `(1-λ)^{2n}`
    decay: f64,
}

impl Chart {
    const FRESH: Chart = Chart { n: 0, p_hat: 0.0, z: 0.0, decay: 1.0 };

    #[inline]
    fn update(&mut self, err: bool, lambda: f64) {
        let x = err as u8 as f64;
        self.n += 1;
        self.p_hat += (x - self.p_hat) / self.n as f64;
        self.z += lambda * (x - self.z);
        self.decay *= (1.0 - lambda) * (1.0 - lambda);
    }

    #[inline]
    fn sigma(&self, lambda: f64) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) * lambda / (2.0 - lambda) * (1.0 - self.decay)).sqrt()
    }
}

/// Steps until the first false alarm of a chart with fixed limit `l` on a
/// stationary Bernoulli(`p`) stream, capped at `cap`.
fn run_length(rng: &mut SplitMix64, p: f64, lambda: f64, l: f64, warm_up: u64, cap: u64) -> u64 {
    let mut chart = Chart::FRESH;
    while chart.n < cap {
        chart.update(rng.bernoulli(p), lambda);
        if chart.n >= warm_up && chart.z > chart.p_hat + l * chart.sigma(lambda) {
            return chart.n;
        }
    }
    cap
}

/// Mean run length over `cal.runs` simulated streams. Simulation stops once
/// the total exceeds `budget` steps, in which case the returned (lower-bound)
/// mean is already known to be too large.
fn mean_run_length(p: f64, lambda: f64, l: f64, budget: u64, cal: &Calibration) -> f64 {
    let mut total = 0u64;
    for r in 0..cal.runs {
        if total > budget {
            break;
        }
        // common random numbers across limits keep the estimate monotone in l
        let mut rng = SplitMix64::fork(cal.seed, r as u64);
        total += run_length(&mut rng, p, lambda, l, WARM_UP, budget - total + 1);
    }
    total as f64 / cal.runs as f64
}

impl ControlLimitGrid {
    /// Bisect `L` at every grid rate until the simulated mean run length
    /// matches `arl0` within the calibration tolerance.
    pub fn calibrate(lambda: f64, arl0: f64, cal: &Calibration) -> Result<Self> {
        EcddConfig { lambda, arl0, ..EcddConfig::default() }.validate()?;
        if cal.runs == 0 {
            return Err(Error::Config("calibration needs at least one run".into()));
        }
        let mut points = Vec::with_capacity(P_GRID.len());
        for &p in &P_GRID {
            let (mut lo, mut hi) = (0.0f64, 8.0f64);
            let mut l = 0.5 * (lo + hi);
            for _ in 0..60 {
                l = 0.5 * (lo + hi);
                let budget = ((1.0 + 2.0 * cal.tolerance) * arl0 * cal.runs as f64) as u64;
                let arl = mean_run_length(p, lambda, l, budget, cal);
                if (arl / arl0 - 1.0).abs() <= cal.tolerance || hi - lo < 1e-6 {
                    break;
                }
                if arl < arl0 {
                    lo = l;
                } else {
                    hi = l;
                }
            }
            points.push((p, l));
        }
        Ok(Self { lambda, arl0, points })
    }

    /// Limit for the given error rate, linearly interpolated and clamped to
    /// the grid ends.
    pub fn limit(&self, p_hat: f64) -> f64 {
        let pts = &self.points;
        if p_hat <= pts[0].0 {
            return pts[0].1;
        }
        if p_hat >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let i = pts.partition_point(|&(p, _)| p <= p_hat);
        let ((p0, l0), (p1, l1)) = (pts[i - 1], pts[i]);
        l0 + (l1 - l0) * (p_hat - p0) / (p1 - p0)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{GRID_CSV_HEADER}")?;
        for &(p, l) in &self.points {
            writeln!(w, "{p},{},{},{l}", self.lambda, self.arl0)?;
        }
        Ok(())
    }

    /// Read a grid written by [`write_csv`](Self::write_csv). All rows must
    /// share one `(lambda, arl0)` pair.
    pub fn read_csv<R: BufRead>(r: R, path: &Path) -> Result<Self> {
        let parse_err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
        let mut lines = r.lines();
        let header = lines.next().transpose()?;
        if header.as_deref().map(str::trim) != Some(GRID_CSV_HEADER) {
            return Err(parse_err(1, format!("expected header `{GRID_CSV_HEADER}`")));
        }
        let mut key = None;
        let mut points = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let lineno = i + 2;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(lineno, e.to_string()))?;
            let [p, lambda, arl0, l] = fields[..] else {
                return Err(parse_err(lineno, format!("expected 4 fields, found {}", fields.len())));
            };
            match key {
                None => key = Some((lambda, arl0)),
                Some(k) if k != (lambda, arl0) => {
                    return Err(parse_err(lineno, "mixed lambda/arl0 values".into()))
                }
                _ => {}
            }
            if points.last().is_some_and(|&(q, _)| q >= p) {
                return Err(parse_err(lineno, "p_hat values must increase".into()));
            }
            points.push((p, l));
        }
        let (lambda, arl0) = key.ok_or_else(|| parse_err(1, "no grid rows".into()))?;
        Ok(Self { lambda, arl0, points })
    }
}

type GridCache = Mutex<HashMap<(u64, u64), Arc<ControlLimitGrid>>>;

/// Calibrated grid for `(lambda, arl0)` with default Monte Carlo settings,
/// computed once per process.
pub fn calibrated_grid(lambda: f64, arl0: f64) -> Result<Arc<ControlLimitGrid>> {
    static CACHE: OnceLock<GridCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (lambda.to_bits(), arl0.to_bits());
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(g) = map.get(&key) {
        return Ok(g.clone());
    }
    let grid = Arc::new(ControlLimitGrid::calibrate(lambda, arl0, &Calibration::default())?);
    map.insert(key, grid.clone());
    Ok(grid)
}

#[derive(Debug, Clone)]
pub struct Ecdd {
    cfg: EcddConfig,
    grid: Arc<ControlLimitGrid>,
    chart: Chart,
}

impl Ecdd {
    /// Detector with a lazily calibrated, process-wide shared grid.
    pub fn new(cfg: EcddConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = calibrated_grid(cfg.lambda, cfg.arl0)?;
        Self::with_grid(cfg, grid)
    }

    pub fn with_grid(cfg: EcddConfig, grid: Arc<ControlLimitGrid>) -> Result<Self> {
        cfg.validate()?;
        if grid.lambda != cfg.lambda || grid.arl0 != cfg.arl0 || grid.points.is_empty() {
            return Err(Error::Config(format!(
                "control-limit grid (lambda={}, arl0={}) does not match the detector (lambda={}, arl0={})",
                grid.lambda, grid.arl0, cfg.lambda, cfg.arl0
            )));
        }
        Ok(Self { cfg, grid, chart: Chart::FRESH })
    }

    pub fn grid(&self) -> &Arc<ControlLimitGrid> {
        &self.grid
    }

    pub fn ewma(&self) -> f64 {
        self.chart.z
    }

    pub fn error_rate(&self) -> f64 {
        self.chart.p_hat
    }

    pub fn ewma_std(&self) -> f64 {
        self.chart.sigma(self.cfg.lambda)
    }
}

impl DriftDetector for Ecdd {
    fn add_element(&mut self, x: f64) -> Result<Detection> {
        let err = binary_input(x, "ECDD")?;
        let lambda = self.cfg.lambda;
        self.chart.update(err, lambda);
        if self.chart.n < self.cfg.warm_up {
            return Ok(Detection::NO_CHANGE);
        }
        let l = self.grid.limit(self.chart.p_hat);
        let sigma = self.chart.sigma(lambda);
        if self.chart.z > self.chart.p_hat + l * sigma {
            self.reset();
            Ok(Detection::DRIFT)
        } else if self.chart.z > self.chart.p_hat + self.cfg.warning_fraction * l * sigma {
            Ok(Detection::WARNING)
        } else {
            Ok(Detection::NO_CHANGE)
        }
    }

    fn reset(&mut self) {
        self.chart = Chart::FRESH;
    }

    fn name(&self) -> String {
        format!("ECDD(arl0={})", self.cfg.arl0)
    }
}
