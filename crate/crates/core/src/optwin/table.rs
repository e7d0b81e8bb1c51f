//! Precomputed optimal cuts.
//!
//! For a window of length `L` split after `k` elements, the bound
//!
//! ```text
//! rhs(k) = t_ppf(δ', df) · sqrt(1/k + f/(L−k)),   f = f_ppf(δ', k−1, L−k−1)
//! df     = (1/k + f/(L−k))² / ((1/k)²/(k−1) + (f/(L−k))²/(L−k−1))
//! ```
//!
//! is the smallest mean shift (in units of the historical std) that the t-test
//! is guaranteed to see when the recent variance sits at its F-test ceiling.
//! The optimal cut is the largest `k` with `rhs(k) ≤ ρ`; when no split
//! qualifies the window is halved instead.
//!
//! `rhs` diverges at both ends of `[2, L−2]` and is unimodal in between, so the
//! table builder searches the increasing branch instead of scanning every
//! split. [`solve_optimal_cut_exhaustive`] keeps the full scan for checking.

use std::collections::HashMap;

use super::config::OptwinConfig;
use crate::error::{domain, Result};
use crate::stats::{f_ppf_unchecked, t_ppf_unchecked};

/// Critical values of one candidate split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutEval {
    pub rhs: f64,
    pub t_crit: f64,
    pub f_crit: f64,
    pub df: f64,
}

fn eval_sizes(hist: f64, new: f64, delta_prime: f64) -> CutEval {
    let f_crit = f_ppf_unchecked(delta_prime, hist - 1.0, new - 1.0);
    let a = 1.0 / hist;
    let b = f_crit / new;
    let df = (a + b).powi(2) / (a * a / (hist - 1.0) + b * b / (new - 1.0));
    let t_crit = t_ppf_unchecked(delta_prime, df);
    CutEval { rhs: t_crit * (a + b).sqrt(), t_crit, f_crit, df }
}

/// Full evaluation of the bound at split fraction `nu` of a window of `len`.
pub fn evaluate_cut(nu: f64, len: usize, delta_prime: f64) -> Result<CutEval> {
    if !(delta_prime > 0.0 && delta_prime < 1.0) {
        return domain(format!("confidence must lie in (0, 1), got {delta_prime}"));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return domain(format!("split fraction must lie in (0, 1), got {nu}"));
    }
    let l = len as f64;
    let hist = nu * l;
    let new = (1.0 - nu) * l;
    // tolerate k/L round-off
    if hist < 2.0 - 1e-9 || new < 2.0 - 1e-9 {
        return domain(format!(
            "split {nu} of a window of {len} leaves fewer than 2 elements on one side"
        ));
    }
    Ok(eval_sizes(hist, new, delta_prime))
}

/// Right-hand side of the optimal-cut equation.
pub fn cut_rhs(nu: f64, len: usize, delta_prime: f64) -> Result<f64> {
    evaluate_cut(nu, len, delta_prime).map(|e| e.rhs)
}

fn eval_split(k: usize, len: usize, delta_prime: f64) -> CutEval {
    eval_sizes(k as f64, (len - k) as f64, delta_prime)
}

/// Largest `ν = k/L` with `rhs(k/L) ≤ ρ`, by scanning every split in `[2, L−2]`.
pub fn solve_optimal_cut_exhaustive(len: usize, rho: f64, delta_prime: f64) -> Option<f64> {
    if len < 4 {
        return None;
    }
    (2..=len - 2)
        .rev()
        .find(|&k| eval_split(k, len, delta_prime).rhs <= rho)
        .map(|k| k as f64 / len as f64)
}

/// Largest `ν = k/L` with `rhs(k/L) ≤ ρ`, or `None` when no split qualifies.
pub fn solve_optimal_cut(len: usize, rho: f64, delta_prime: f64) -> Option<f64> {
    let mut search = CutSearch::new(len, rho, delta_prime);
    search.full().map(|k| k as f64 / len as f64)
}

/// Memoised search over the splits of one window length.
struct CutSearch {
    len: usize,
    rho: f64,
    delta_prime: f64,
    memo: HashMap<usize, CutEval>,
}

impl CutSearch {
    fn new(len: usize, rho: f64, delta_prime: f64) -> Self {
        Self { len, rho, delta_prime, memo: HashMap::new() }
    }

    fn lo(&self) -> usize {
        2
    }

    fn hi(&self) -> usize {
        self.len - 2
    }

    fn eval(&mut self, k: usize) -> CutEval {
        let (len, dp) = (self.len, self.delta_prime);
        *self.memo.entry(k).or_insert_with(|| eval_split(k, len, dp))
    }

    fn rhs(&mut self, k: usize) -> f64 {
        self.eval(k).rhs
    }

    /// Golden-section search for the minimum, then bisection on the right branch.
    fn full(&mut self) -> Option<usize> {
        if self.len < 4 {
            return None;
        }
        let kmin = self.argmin();
        if self.rhs(kmin) > self.rho {
            return None;
        }
        Some(self.right_edge(kmin))
    }

    fn argmin(&mut self) -> usize {
        let (mut a, mut b) = (self.lo(), self.hi());
        while b - a > 3 {
            let third = (b - a) / 3;
            let m1 = a + third;
            let m2 = b - third;
            if self.rhs(m1) <= self.rhs(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        (a..=b)
            .min_by(|&x, &y| self.rhs(x).total_cmp(&self.rhs(y)))
            .expect("non-empty range")
    }

    /// Largest `k ≥ start` with `rhs(k) ≤ ρ`, given `rhs(start) ≤ ρ`.
    fn right_edge(&mut self, start: usize) -> usize {
        let hi_limit = self.hi();
        let mut ok = start;
        let mut step = 1;
        let bad = loop {
            if ok == hi_limit {
                return ok;
            }
            let probe = (ok + step).min(hi_limit);
            if self.rhs(probe) <= self.rho {
                ok = probe;
                step *= 2;
            } else {
                break probe;
            }
        };
        // rhs(ok) ≤ ρ < rhs(bad); any point in between that exceeds ρ lies on
        // the increasing branch
        let (mut ok, mut bad) = (ok, bad);
        while bad - ok > 1 {
            let mid = ok + (bad - ok) / 2;
            if self.rhs(mid) <= self.rho {
                ok = mid;
            } else {
                bad = mid;
            }
        }
        ok
    }

    /// Start from a guess (typically the previous length's answer).
    fn from_hint(&mut self, hint: usize) -> Option<usize> {
        if self.len < 4 {
            return None;
        }
        let k = hint.clamp(self.lo(), self.hi());
        if self.rhs(k) <= self.rho {
            return Some(self.right_edge(k));
        }
        // rhs(k) > ρ: walk down only while the function is visibly increasing
        let mut bad = k;
        let mut step = 1;
        loop {
            if bad == self.lo() {
                return self.full();
            }
            let probe = bad.saturating_sub(step).max(self.lo());
            let (rp, rb) = (self.rhs(probe), self.rhs(bad));
            if rp <= self.rho {
                return Some(self.right_edge(probe));
            }
            if rp >= rb {
                // passed the minimum without reaching ρ; settle it properly
                return self.full();
            }
            bad = probe;
            step *= 2;
        }
    }
}

/// One row of the table, for window length `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutRow {
    pub nu: f64,
    pub nu_split: u32,
    pub t_crit: f64,
    pub f_crit: f64,
    pub df: f64,
    pub rho_temp: f64,
}

/// Precomputed critical values for every window length in `[w_min, w_max]`.
///
/// Critical values are stored at single precision, which is what the binary
/// format keeps; a table read back from disk is identical to the one built.
#[derive(Debug, Clone, PartialEq)]
pub struct CutTable {
    pub(crate) delta: f64,
    pub(crate) rho: f64,
    pub(crate) w_min: usize,
    pub(crate) w_max: usize,
    pub(crate) w_proof: Option<usize>,
    pub(crate) rows: Vec<CutRow>,
}

#[inline]
fn single(x: f64) -> f64 {
    x as f32 as f64
}

impl CutTable {
    pub fn build(cfg: &OptwinConfig) -> Result<Self> {
        cfg.validate()?;
        let dp = cfg.delta_prime();
        let mut rows = Vec::with_capacity(cfg.w_max - cfg.w_min + 1);
        let mut w_proof = None;
        let mut prev: Option<usize> = None;
        for len in cfg.w_min..=cfg.w_max {
            let mut search = CutSearch::new(len, cfg.rho, dp);
            let k = match prev {
                Some(p) => search.from_hint(p + 1),
                None => search.full(),
            };
            let half = eval_sizes(0.5 * len as f64, 0.5 * len as f64, dp);
            let row = match k {
                Some(k) => {
                    w_proof.get_or_insert(len);
                    let e = search.eval(k);
                    CutRow {
                        nu: k as f64 / len as f64,
                        nu_split: k as u32,
                        t_crit: single(e.t_crit),
                        f_crit: single(e.f_crit),
                        df: single(e.df),
                        rho_temp: single(half.rhs),
                    }
                }
                None => CutRow {
                    nu: 0.5,
                    nu_split: (len / 2) as u32,
                    t_crit: single(half.t_crit),
                    f_crit: single(half.f_crit),
                    df: single(half.df),
                    rho_temp: single(half.rhs),
                },
            };
            prev = k;
            rows.push(row);
        }
        Ok(Self { delta: cfg.delta, rho: cfg.rho, w_min: cfg.w_min, w_max: cfg.w_max, w_proof, rows })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn w_min(&self) -> usize {
        self.w_min
    }

    pub fn w_max(&self) -> usize {
        self.w_max
    }

    /// Smallest window length with a solved optimal cut.
    pub fn w_proof(&self) -> Option<usize> {
        self.w_proof
    }

    pub fn rows(&self) -> &[CutRow] {
        &self.rows
    }

    /// Row for window length `len`, if covered.
    #[inline]
    pub fn row(&self, len: usize) -> Option<&CutRow> {
        len.checked_sub(self.w_min).and_then(|i| self.rows.get(i))
    }

    /// Whether this table was built for the given detector parameters.
    pub fn matches(&self, cfg: &OptwinConfig) -> bool {
        self.delta == cfg.delta
            && self.rho == cfg.rho
            && self.w_min == cfg.w_min
            && self.w_max == cfg.w_max
    }

    /// Heap footprint of the rows.
    pub fn memory_bytes(&self) -> usize {
        self.rows.len() * std::mem::size_of::<CutRow>()
    }
}
