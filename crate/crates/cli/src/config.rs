//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "output": "report.csv",
//!   "experiments": [{
//!     "name": "sudden_binary",
//!     "seeds": 30,
//!     "match_window": 1000,
//!     "stream": {"type": "synthetic", "seed": 1, "segments": [
//!         {"dist": "bernoulli", "p": 0.2, "len": 20000},
//!         {"dist": "bernoulli", "p": 0.5, "len": 20000}]},
//!     "detectors": [{"kind": "optwin", "rho": 0.5}, {"kind": "ddm"}]
//!   }]
//! }
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use optwin_core::baselines::{AdwinConfig, DdmConfig, EcddConfig, EddmConfig, StepdConfig};
use optwin_core::optwin::{DEFAULT_ETA, DEFAULT_W_MIN};
use optwin_core::streams::{Distribution, ResetPolicy, Transition};
use optwin_core::{MatchConfig, OptwinConfig, StreamSpec};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub experiments: Vec<Experiment>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub name: String,
    pub stream: StreamSource,
    pub detectors: Vec<DetectorEntry>,
    pub seeds: usize,
    /// Steps after a true drift within which a flag counts as a hit. Defaults
    /// to 1,000, plus the width of the widest gradual transition.
    #[serde(default)]
    pub match_window: Option<usize>,
    #[serde(default)]
    pub binarize: Binarize,
}

/// How binary-only detectors consume a real-valued stream.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binarize {
    /// Values other than 0 and 1 are an error.
    #[default]
    Strict,
    /// Each value `x` in [0, 1] becomes an error with probability `x`, which
    /// keeps the mean error rate unchanged.
    Bernoulli,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StreamSource {
    /// Run `r` uses `seed + seed_base + r`.
    Synthetic(StreamSpec),
    /// Prequential Naive Bayes on STAGGER; the detector watches the 0/1
    /// prediction errors.
    Stagger {
        seed: u64,
        /// `(concept, length)` pairs, concepts numbered 1 to 3.
        schedule: Vec<(u8, usize)>,
        #[serde(default)]
        policy: ResetPolicy,
    },
    /// A fixed error stream; it is read once regardless of `seeds`.
    Csv {
        path: PathBuf,
        #[serde(default)]
        column: Option<ColumnRef>,
        #[serde(default)]
        drifts: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone, Deserialize)]
pub struct DetectorEntry {
    /// Report label; defaults to the detector's own name.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(flatten)]
    pub spec: DetectorSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetectorSpec {
    Optwin {
        #[serde(default = "default_optwin_delta")]
        delta: f64,
        rho: f64,
        #[serde(default = "default_w_max")]
        w_max: usize,
        #[serde(default = "default_w_min")]
        w_min: usize,
        #[serde(default = "default_true")]
        one_sided: bool,
        #[serde(default)]
        keep_new_window: bool,
        /// Precomputed table file; must match the parameters above.
        #[serde(default)]
        table: Option<PathBuf>,
    },
    Adwin {
        #[serde(default = "default_adwin_delta")]
        delta: f64,
    },
    Ddm {
        #[serde(default = "default_ddm_warning")]
        warning_factor: f64,
        #[serde(default = "default_ddm_drift")]
        drift_factor: f64,
    },
    Eddm {
        #[serde(default = "default_eddm_alpha")]
        alpha: f64,
        #[serde(default = "default_eddm_beta")]
        beta: f64,
    },
    Stepd {
        #[serde(default = "default_stepd_window")]
        window: usize,
        #[serde(default = "default_stepd_drift")]
        alpha_drift: f64,
        #[serde(default = "default_stepd_warning")]
        alpha_warning: f64,
    },
    Ecdd {
        #[serde(default = "default_ecdd_lambda")]
        lambda: f64,
        #[serde(default = "default_ecdd_arl0")]
        arl0: f64,
    },
    /// No detector: useful as the reference row of prequential runs.
    None,
}

fn default_true() -> bool {
    true
}
fn default_optwin_delta() -> f64 {
    0.99
}
fn default_w_max() -> usize {
    25_000
}
fn default_w_min() -> usize {
    DEFAULT_W_MIN
}
fn default_adwin_delta() -> f64 {
    AdwinConfig::default().delta
}
fn default_ddm_warning() -> f64 {
    DdmConfig::default().warning_factor
}
fn default_ddm_drift() -> f64 {
    DdmConfig::default().drift_factor
}
fn default_eddm_alpha() -> f64 {
    EddmConfig::default().alpha
}
fn default_eddm_beta() -> f64 {
    EddmConfig::default().beta
}
fn default_stepd_window() -> usize {
    StepdConfig::default().window
}
fn default_stepd_drift() -> f64 {
    StepdConfig::default().alpha_drift
}
fn default_stepd_warning() -> f64 {
    StepdConfig::default().alpha_warning
}
fn default_ecdd_lambda() -> f64 {
    EcddConfig::default().lambda
}
fn default_ecdd_arl0() -> f64 {
    EcddConfig::default().arl0
}

impl DetectorSpec {
    pub fn optwin_config(&self) -> Option<Result<OptwinConfig>> {
        let DetectorSpec::Optwin { delta, rho, w_max, w_min, one_sided, keep_new_window, .. } = *self else {
            return None;
        };
        let cfg = OptwinConfig {
            delta,
            rho,
            w_max,
            w_min,
            eta: DEFAULT_ETA,
            one_sided,
            keep_new_window_on_reset: keep_new_window,
        };
        Some(cfg.validate().map(|()| cfg).map_err(CliError::from))
    }

    /// Detectors that only accept 0/1 error indicators.
    pub fn binary_only(&self) -> bool {
        matches!(self, DetectorSpec::Ddm { .. } | DetectorSpec::Eddm { .. } | DetectorSpec::Stepd { .. } | DetectorSpec::Ecdd { .. })
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(base) = path.parent() {
            cfg.rebase(base);
        }
        cfg.validate().map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        Ok(cfg)
    }

    /// Interpret relative input paths (CSV streams, table files) against `base`.
    pub fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for exp in &mut self.experiments {
            if let StreamSource::Csv { path, .. } = &mut exp.stream {
                fix(path);
            }
            for det in &mut exp.detectors {
                if let DetectorSpec::Optwin { table: Some(t), .. } = &mut det.spec {
                    fix(t);
                }
            }
        }
    }

    /// Every check that can fail without running anything.
    pub fn validate(&self) -> Result<()> {
        if self.experiments.is_empty() {
            return Err(CliError::Config("no experiments".into()));
        }
        let mut names = BTreeSet::new();
        for exp in &self.experiments {
            if !names.insert(exp.name.as_str()) {
                return Err(CliError::Config(format!("duplicate experiment name {:?}", exp.name)));
            }
            exp.validate().map_err(|e| match e {
                CliError::Config(msg) => CliError::Config(format!("experiment {:?}: {msg}", exp.name)),
                CliError::Core(optwin_core::Error::Config(msg)) => {
                    CliError::Config(format!("experiment {:?}: {msg}", exp.name))
                }
                other => other,
            })?;
        }
        Ok(())
    }
}

impl Experiment {
    fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(CliError::Config("experiment name is empty".into()));
        }
        if self.seeds == 0 {
            return Err(CliError::Config("seeds must be at least 1".into()));
        }
        if self.detectors.is_empty() {
            return Err(CliError::Config("at least one detector is required".into()));
        }
        self.match_config()?;
        let mut labels = BTreeSet::new();
        for det in &self.detectors {
            if let Some(cfg) = det.spec.optwin_config() {
                cfg?;
            }
            if !labels.insert(self.label(det)) {
                return Err(CliError::Config(format!("duplicate detector label {:?}", self.label(det))));
            }
        }
        match &self.stream {
            StreamSource::Synthetic(spec) => {
                spec.validate()?;
                let real_valued = spec.segments.iter().any(|s| !is_binary(&s.dist));
                if real_valued && self.binarize == Binarize::Strict {
                    if let Some(d) = self.detectors.iter().find(|d| d.spec.binary_only()) {
                        return Err(CliError::Config(format!(
                            "{} needs 0/1 input but the stream is real-valued; set \"binarize\": \"bernoulli\"",
                            self.label(d)
                        )));
                    }
                }
                if self.binarize == Binarize::Bernoulli && spec.segments.iter().any(|s| !in_unit_range(&s.dist)) {
                    return Err(CliError::Config("bernoulli binarization needs values in [0, 1]".into()));
                }
            }
            StreamSource::Stagger { schedule, .. } => {
                if schedule.is_empty() {
                    return Err(CliError::Config("STAGGER schedule is empty".into()));
                }
                // surfaces bad concepts or lengths before anything runs
                optwin_core::streams::stagger_stream(&schedule.iter().map(|&(c, _)| (c, 1)).collect::<Vec<_>>(), 0)?;
                if schedule.iter().any(|&(_, len)| len == 0) {
                    return Err(CliError::Config("STAGGER schedule entries need a positive length".into()));
                }
            }
            StreamSource::Csv { path, drifts, .. } => {
                if !path.is_file() {
                    return Err(CliError::Config(format!("stream file {} not found", path.display())));
                }
                if drifts.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(CliError::Config("csv drift positions must be strictly increasing".into()));
                }
            }
        }
        Ok(())
    }

    pub fn label(&self, det: &DetectorEntry) -> String {
        det.label.clone().unwrap_or_else(|| default_label(&det.spec))
    }

    pub fn match_config(&self) -> Result<MatchConfig> {
        let widest = match &self.stream {
            StreamSource::Synthetic(spec) => (0..spec.segments.len().saturating_sub(1))
                .map(|b| match spec.transition(b) {
                    Transition::Gradual(w) => w,
                    Transition::Sudden => 0,
                })
                .max()
                .unwrap_or(0),
            _ => 0,
        };
        match self.match_window {
            Some(w) => Ok(MatchConfig::new(w)?),
            None if widest > 0 => Ok(MatchConfig::gradual(widest)),
            None => Ok(MatchConfig::default()),
        }
    }
}

fn is_binary(d: &Distribution) -> bool {
    match d {
        Distribution::Bernoulli { .. } => true,
        Distribution::Gaussian { .. } => false,
        Distribution::UniformSet { values } => values.iter().all(|&v| v == 0.0 || v == 1.0),
    }
}

fn in_unit_range(d: &Distribution) -> bool {
    match d {
        Distribution::Bernoulli { .. } => true,
        Distribution::Gaussian { .. } => false,
        Distribution::UniformSet { values } => values.iter().all(|v| (0.0..=1.0).contains(v)),
    }
}

pub fn default_label(spec: &DetectorSpec) -> String {
    match spec {
        DetectorSpec::Optwin { rho, .. } => format!("OPTWIN(rho={rho})"),
        DetectorSpec::Adwin { .. } => "ADWIN".into(),
        DetectorSpec::Ddm { .. } => "DDM".into(),
        DetectorSpec::Eddm { .. } => "EDDM".into(),
        DetectorSpec::Stepd { .. } => "STEPD".into(),
        DetectorSpec::Ecdd { .. } => "ECDD".into(),
        DetectorSpec::None => "none".into(),
    }
}
