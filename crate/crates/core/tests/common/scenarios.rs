//! Stream constructions shared by the property and acceptance tests.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use optwin_core::{CutTable, Detection, DriftDetector, Optwin, OptwinConfig, SplitMix64, Verdict};

use super::oracle::NaiveOptwin;

pub const DELTA: f64 = 0.99;

/// Tables are expensive for large windows; build each (rho, w_max) once per process.
pub fn table(rho: f64, w_max: usize) -> Arc<CutTable> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<CutTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (rho.to_bits(), w_max);
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return t.clone();
    }
    let cfg = OptwinConfig::new(DELTA, rho, w_max).unwrap();
    let built = Arc::new(CutTable::build(&cfg).unwrap());
    cache.lock().unwrap().entry(key).or_insert(built).clone()
}

pub fn optwin(rho: f64, w_max: usize) -> Optwin {
    let cfg = OptwinConfig::new(DELTA, rho, w_max).unwrap();
    Optwin::with_table(cfg, table(rho, w_max)).unwrap()
}

pub fn optwin_with(cfg: OptwinConfig) -> Optwin {
    Optwin::with_table(cfg, table(cfg.rho, cfg.w_max)).unwrap()
}

/// Feed `gen` until the window holds `w_max` elements. A (false) flag on the
/// way clears the window, so filling simply continues until it is full.
pub fn fill_window(d: &mut Optwin, mut gen: impl FnMut() -> f64) {
    let w_max = d.config().w_max;
    let mut guard = 0usize;
    while d.window_len() < w_max {
        d.add_element(gen()).unwrap();
        guard += 1;
        assert!(guard < 1000 * w_max, "window never filled");
    }
}

/// Number of elements consumed up to and including the first drift flag.
pub fn steps_to_drift(d: &mut dyn DriftDetector, mut gen: impl FnMut() -> f64, limit: usize) -> Option<usize> {
    (1..=limit).find(|_| d.add_element(gen()).unwrap().is_drift())
}

/// Drift flags raised on an entire stream.
pub fn drift_positions(d: &mut dyn DriftDetector, xs: &[f64]) -> Vec<usize> {
    xs.iter()
        .enumerate()
        .filter(|(_, &x)| d.add_element(x).map(|det: Detection| det.is_drift()).unwrap())
        .map(|(i, _)| i)
        .collect()
}

pub fn gaussian(rng: &mut SplitMix64, n: usize, mean: f64, std: f64) -> Vec<f64> {
    (0..n).map(|_| rng.normal(mean, std)).collect()
}

/// A 5,000-element stream mixing several regimes, so that both tests fire and
/// the window both grows and slides.
pub fn mixed_stream(seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    let mut xs = Vec::with_capacity(5000);
    while xs.len() < 5000 {
        let len = 150 + rng.below(900) as usize;
        let kind = rng.below(4);
        let level = rng.next_f64();
        let spread = 0.02 + 0.3 * rng.next_f64();
        for _ in 0..len.min(5000 - xs.len()) {
            xs.push(match kind {
                0 => f64::from(rng.bernoulli(level)),
                1 => rng.normal(level, spread),
                2 => [0.3, 0.5, 0.7][rng.below(3) as usize] * level,
                _ => level + spread * rng.next_f64(),
            });
        }
    }
    xs
}

/// Feed one stream to the incremental detector and the naive reference;
/// describes the first diverging step, or returns the number of flags.
pub fn compare_with_naive(xs: &[f64], rho: f64, w_max: usize, one_sided: bool) -> Result<usize, String> {
    let cfg = OptwinConfig::new(DELTA, rho, w_max).unwrap().with_one_sided(one_sided);
    let mut fast = optwin_with(cfg);
    let table = table(rho, w_max);
    let mut naive = NaiveOptwin::new(&table);
    naive.one_sided = one_sided;
    let mut flags = 0;
    for (i, &x) in xs.iter().enumerate() {
        let got = fast.add_element(x).unwrap().verdict;
        let want = naive.add(x);
        if got != want || fast.window_len() != naive.window.len() {
            return Err(format!("rho {rho} w_max {w_max}: step {i} gave {got:?}, reference {want:?}"));
        }
        flags += usize::from(want == Verdict::Drift);
    }
    Ok(flags)
}

/// Detection-delay experiment: `hits` of `runs` seeds flagged within `bound`
/// post-change elements.
#[derive(Debug, Clone, Copy)]
pub struct BoundOutcome {
    pub hits: usize,
    pub runs: usize,
    pub bound: usize,
}

pub const BOUND_SLACK: f64 = 1.1;
/// How far past the guaranteed threshold an injected change sits. The
/// guarantee is stated for sample statistics; a population shift right at the
/// threshold leaves the realised shift below it about half the time.
pub const BOUND_MARGIN: f64 = 1.25;

/// Fill a `w_max` window with N(0, 1) data, then shift the mean by
/// `BOUND_MARGIN · rho_eff · σ`, where `rho_eff` is ρ when the window length
/// admits an optimal cut and ρ_temp otherwise. The bound is `|W| - nu_split`
/// steps plus slack.
pub fn mean_shift_runs(rho: f64, w_max: usize, seed0: u64, runs: u64) -> BoundOutcome {
    let probe = optwin(rho, w_max);
    let row = *probe.table().row(w_max).unwrap();
    let solved = probe.table().w_proof().is_some_and(|p| w_max >= p);
    let rho_eff = if solved { rho } else { row.rho_temp };
    let bound = ((w_max - row.nu_split as usize) as f64 * BOUND_SLACK) as usize;
    let shift = BOUND_MARGIN * rho_eff;
    let hits = (0..runs)
        .filter(|seed| {
            let mut rng = SplitMix64::new(seed0 + seed);
            let mut d = optwin(rho, w_max);
            fill_window(&mut d, || rng.normal(0.0, 1.0));
            steps_to_drift(&mut d, || rng.normal(shift, 1.0), bound).is_some()
        })
        .count();
    BoundOutcome { hits, runs: runs as usize, bound }
}

/// Same construction with the variance multiplied by `BOUND_MARGIN · f_crit`
/// at an unchanged mean; the bound is `nu_split` steps plus slack.
pub fn variance_shift_runs(rho: f64, w_max: usize, seed0: u64, runs: u64) -> BoundOutcome {
    let probe = optwin(rho, w_max);
    let row = *probe.table().row(w_max).unwrap();
    let bound = (row.nu_split as f64 * BOUND_SLACK) as usize;
    let std = (BOUND_MARGIN * row.f_crit).sqrt();
    let hits = (0..runs)
        .filter(|seed| {
            let mut rng = SplitMix64::new(seed0 + seed);
            let mut d = optwin(rho, w_max);
            fill_window(&mut d, || rng.normal(0.0, 1.0));
            steps_to_drift(&mut d, || rng.normal(0.0, std), bound).is_some()
        })
        .count();
    BoundOutcome { hits, runs: runs as usize, bound }
}
