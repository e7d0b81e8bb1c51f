//! Runs every (experiment, detector, seed) cell and merges the results.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::sync::Arc;

use optwin_core::baselines::{calibrated_grid, AdwinConfig, DdmConfig, EcddConfig, EddmConfig, StepdConfig};
use optwin_core::streams::stagger::CARDINALITIES;
use optwin_core::streams::{prequential_run, read_csv_stream, stagger_stream, Column, NaiveBayes};
use optwin_core::{
    aggregate, match_detections, Adwin, CutTable, Ddm, DriftDetector, Ecdd, Eddm, EvalReport, Optwin,
    OptwinConfig, SplitMix64, Stepd,
};
use rayon::prelude::*;

use crate::config::{Binarize, ColumnRef, DetectorSpec, Experiment, RunConfig, StreamSource};
use crate::error::{CliError, Result};

/// Stream id used to derive the binarization generator from a run's seed.
const BINARIZE_STREAM: u64 = 0xB1A5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 1 runs everything on the calling thread.
    pub jobs: usize,
    pub seed_base: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { jobs: 1, seed_base: 0 }
    }
}

/// Aggregated results keyed by `(experiment, detector label)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunResults {
    pub reports: BTreeMap<(String, String), EvalReport>,
    /// Mean prequential accuracy, for STAGGER experiments only.
    pub accuracy: BTreeMap<(String, String), f64>,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    experiment: usize,
    detector: usize,
    run: usize,
}

struct CellOutcome {
    report: EvalReport,
    accuracy: Option<f64>,
}

/// Shared, read-only resources built before any cell runs.
#[derive(Default)]
struct Resources {
    tables: HashMap<String, Arc<CutTable>>,
    csv: HashMap<usize, Arc<Vec<f64>>>,
}

fn table_key(cfg: &OptwinConfig) -> String {
    format!("{:?}/{:?}/{}/{}", cfg.delta, cfg.rho, cfg.w_min, cfg.w_max)
}

fn prepare(cfg: &RunConfig) -> Result<Resources> {
    let mut res = Resources::default();
    for (ei, exp) in cfg.experiments.iter().enumerate() {
        for det in &exp.detectors {
            match &det.spec {
                DetectorSpec::Optwin { table, .. } => {
                    let ocfg = det.spec.optwin_config().expect("optwin spec")?;
                    let key = table_key(&ocfg);
                    if let Some(path) = table {
                        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
                        let loaded = CutTable::read_binary(std::io::BufReader::new(file))?;
                        if !loaded.matches(&ocfg) {
                            return Err(CliError::Config(format!(
                                "table {} was built for different parameters",
                                path.display()
                            )));
                        }
                        res.tables.insert(key, Arc::new(loaded));
                    } else if !res.tables.contains_key(&key) {
                        res.tables.insert(key, Arc::new(CutTable::build(&ocfg)?));
                    }
                }
                DetectorSpec::Ecdd { lambda, arl0 } => {
                    calibrated_grid(*lambda, *arl0)?;
                }
                _ => {}
            }
        }
        if let StreamSource::Csv { path, column, .. } = &exp.stream {
            let column = match column {
                None => Column::default(),
                Some(ColumnRef::Index(i)) => Column::Index(*i),
                Some(ColumnRef::Name(n)) => Column::Name(n.clone()),
            };
            let xs = read_csv_stream(path, column)?.collect::<optwin_core::Result<Vec<_>>>()?;
            res.csv.insert(ei, Arc::new(xs));
        }
    }
    Ok(res)
}

fn build_detector(spec: &DetectorSpec, res: &Resources) -> Result<Option<Box<dyn DriftDetector>>> {
    Ok(Some(match *spec {
        DetectorSpec::Optwin { .. } => {
            let cfg = spec.optwin_config().expect("optwin spec")?;
            let table = res.tables[&table_key(&cfg)].clone();
            Box::new(Optwin::with_table(cfg, table)?)
        }
        DetectorSpec::Adwin { delta } => Box::new(Adwin::new(AdwinConfig { delta, ..AdwinConfig::default() })?),
        DetectorSpec::Ddm { warning_factor, drift_factor } => {
            Box::new(Ddm::new(DdmConfig { warning_factor, drift_factor, ..DdmConfig::default() })?)
        }
        DetectorSpec::Eddm { alpha, beta } => Box::new(Eddm::new(EddmConfig { alpha, beta, ..EddmConfig::default() })?),
        DetectorSpec::Stepd { window, alpha_drift, alpha_warning } => {
            Box::new(Stepd::new(StepdConfig { window, alpha_drift, alpha_warning })?)
        }
        DetectorSpec::Ecdd { lambda, arl0 } => Box::new(Ecdd::new(EcddConfig { lambda, arl0, ..EcddConfig::default() })?),
        DetectorSpec::None => return Ok(None),
    }))
}

/// Seed of run `run` for a stream whose own seed is `base`.
pub fn run_seed(base: u64, opts: &RunOptions, run: usize) -> u64 {
    base.wrapping_add(opts.seed_base).wrapping_add(run as u64)
}

fn feed(
    det: &mut dyn DriftDetector,
    xs: &[f64],
    binarize: Option<&mut SplitMix64>,
) -> Result<Vec<usize>> {
    let mut flags = Vec::new();
    match binarize {
        None => {
            for (i, &x) in xs.iter().enumerate() {
                if det.add_element(x)?.is_drift() {
                    flags.push(i);
                }
            }
        }
        Some(rng) => {
            for (i, &x) in xs.iter().enumerate() {
                let bit = f64::from(u8::from(rng.bernoulli(x)));
                if det.add_element(bit)?.is_drift() {
                    flags.push(i);
                }
            }
        }
    }
    Ok(flags)
}

fn run_cell(cfg: &RunConfig, cell: Cell, res: &Resources, opts: &RunOptions) -> Result<CellOutcome> {
    let exp: &Experiment = &cfg.experiments[cell.experiment];
    let entry = &exp.detectors[cell.detector];
    let mut detector = build_detector(&entry.spec, res)?;
    let matching = exp.match_config()?;
    let binary_only = entry.spec.binary_only();
    match &exp.stream {
        StreamSource::Synthetic(spec) => {
            let mut spec = spec.clone();
            spec.seed = run_seed(spec.seed, opts, cell.run);
            let (xs, truth) = spec.generate()?;
            let flags = match detector.as_deref_mut() {
                None => Vec::new(),
                Some(d) => {
                    let mut rng = (binary_only && exp.binarize == Binarize::Bernoulli)
                        .then(|| SplitMix64::fork(spec.seed, BINARIZE_STREAM));
                    feed(d, &xs, rng.as_mut())?
                }
            };
            Ok(CellOutcome { report: match_detections(&truth.drifts, &flags, matching)?, accuracy: None })
        }
        StreamSource::Stagger { seed, schedule, policy } => {
            let (instances, truth) = stagger_stream(schedule, run_seed(*seed, opts, cell.run))?;
            let model = NaiveBayes::new(2, &CARDINALITIES)?;
            let stream = instances.iter().map(|s| (s.features(), s.class()));
            let watcher = detector.as_mut().map(|d| &mut **d as &mut dyn DriftDetector);
            let outcome = prequential_run(stream, model, watcher, *policy)?;
            Ok(CellOutcome {
                report: match_detections(&truth.drifts, &outcome.drifts, matching)?,
                accuracy: Some(outcome.accuracy),
            })
        }
        StreamSource::Csv { drifts, .. } => {
            let xs = &res.csv[&cell.experiment];
            let flags = match detector.as_deref_mut() {
                None => Vec::new(),
                Some(d) => {
                    let mut rng = (binary_only && exp.binarize == Binarize::Bernoulli)
                        .then(|| SplitMix64::fork(opts.seed_base, BINARIZE_STREAM));
                    feed(d, xs, rng.as_mut())?
                }
            };
            Ok(CellOutcome { report: match_detections(drifts, &flags, matching)?, accuracy: None })
        }
    }
}

fn cells(cfg: &RunConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for (e, exp) in cfg.experiments.iter().enumerate() {
        // a CSV stream is fixed, so extra seeds would only repeat the same run
        let runs = if matches!(exp.stream, StreamSource::Csv { .. }) { 1 } else { exp.seeds };
        for d in 0..exp.detectors.len() {
            for run in 0..runs {
                out.push(Cell { experiment: e, detector: d, run });
            }
        }
    }
    out
}

/// Run the whole configuration. Results do not depend on `opts.jobs`: cells
/// are independent and merged in a fixed order.
pub fn run_config(cfg: &RunConfig, opts: &RunOptions) -> Result<RunResults> {
    cfg.validate()?;
    if opts.jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let res = prepare(cfg)?;
    let cells = cells(cfg);
    let outcomes: Vec<Result<CellOutcome>> = if opts.jobs == 1 {
        cells.iter().map(|&c| run_cell(cfg, c, &res, opts)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        pool.install(|| cells.par_iter().map(|&c| run_cell(cfg, c, &res, opts)).collect())
    };

    let mut grouped: BTreeMap<(String, String), (Vec<EvalReport>, Vec<f64>)> = BTreeMap::new();
    for (cell, outcome) in cells.iter().zip(outcomes) {
        let outcome = outcome?;
        let exp = &cfg.experiments[cell.experiment];
        let key = (exp.name.clone(), exp.label(&exp.detectors[cell.detector]));
        let slot = grouped.entry(key).or_default();
        slot.0.push(outcome.report);
        slot.1.extend(outcome.accuracy);
    }
    let mut results = RunResults::default();
    for (key, (reports, acc)) in grouped {
        if !acc.is_empty() {
            results.accuracy.insert(key.clone(), acc.iter().sum::<f64>() / acc.len() as f64);
        }
        results.reports.insert(key, aggregate(&reports)?);
    }
    Ok(results)
}
