//! Reference implementations used only by tests.
//!
//! * Student-t and F distribution functions evaluated by adaptive
//!   Gauss–Kronrod quadrature of the incomplete-beta integral, with a
//!   Lanczos log-gamma. Nothing here shares code with the library's
//!   continued-fraction evaluation.
//! * A naive OPTWIN that recomputes every moment from the stored window.

#![allow(dead_code)]

use optwin_core::optwin::CutTable;
use optwin_core::Verdict;

/// Probability levels of the quantile round-trip grid.
pub const CONFIDENCES: [f64; 10] = [0.5, 0.6, 0.75, 0.9, 0.95, 0.975, 0.99, 0.995, 0.9975, 0.999];
pub const T_DFS: [f64; 10] = [1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1000.0, 1e4, 1e5];
pub const F_DFS: [(f64, f64); 10] = [
    (1.0, 1.0),
    (2.0, 5.0),
    (5.0, 2.0),
    (10.0, 10.0),
    (3.0, 60.0),
    (60.0, 3.0),
    (29.0, 31.0),
    (200.0, 50.0),
    (1000.0, 2000.0),
    (24000.0, 900.0),
];

/// Distance of a quantile's CDF from its target, measured on whichever tail
/// is small so that upper quantiles are not judged through `1 - p`.
pub fn round_trip_error(p: f64, lower: f64, upper: f64) -> f64 {
    if p > 0.5 {
        (upper - (1.0 - p)).abs()
    } else {
        (lower - p).abs()
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn lanczos_ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - lanczos_ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod integral of `f` over `[a, b]`, refined until the
/// error estimate of every panel is below `tol` or 1e-11 of its value (the Gauss–Kronrod difference overstates the true error by orders of magnitude on smooth panels).
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, whole: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, el) = gk15(f, a, m);
        let (r, er) = gk15(f, m, b);
        let err = (el + er).max((l + r - whole).abs() / 10.0);
        if depth == 0 || err <= tol.max(1e-11 * (l + r).abs()).max(1e-290) {
            l + r
        } else {
            rec(f, a, m, 0.5 * tol, l, depth - 1) + rec(f, m, b, 0.5 * tol, r, depth - 1)
        }
    }
    let (whole, _) = gk15(f, a, b);
    rec(f, a, b, tol, whole, 20)
}

/// `∫_0^x t^{a-1} (1-t)^{b-1} dt / B(a, b)` by quadrature in `s = -ln t`,
/// where the integrand `exp(-a s) (1 - e^{-s})^{b-1}` is smooth for `s > 0`.
/// Panels grow geometrically away from `s0 = -ln x` and cluster around the
/// interior mode so no sharp peak is stepped over.
fn lower_beta_integral(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln_b = lanczos_ln_gamma(a) + lanczos_ln_gamma(b) - lanczos_ln_gamma(a + b);
    let h = |s: f64| (-a * s + (b - 1.0) * (-(-s).exp_m1()).ln() - ln_b).exp();
    let s0 = -x.ln();
    let mut cuts = vec![s0];
    let mut far = s0 + 60.0 / a;
    if b > 1.0 {
        // mode of the integrand: t/(1-t) = a/(b-1)
        let t_star = a / (a + b - 1.0);
        let s_star = -t_star.ln();
        let w = ((1.0 - t_star).powi(2) / ((b - 1.0) * t_star)).sqrt();
        for j in -12..=12 {
            let c = s_star + j as f64 * w;
            if c > s0 {
                cuts.push(c);
            }
        }
        far = far.max(s_star + 60.0 * w + 60.0 / a);
    }
    let mut step = 1e-9 * s0.max(1e-3);
    while s0 + step < far {
        cuts.push(s0 + step);
        step *= 2.0;
    }
    cuts.push(far);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2).map(|w| integrate(&h, w[0], w[1], 0.0)).sum()
}

/// Regularized incomplete beta `I_x(a, b)` and its complement, each from
/// its own integral so both tails keep full relative precision.
pub fn beta_cdf_pair(x: f64, a: f64, b: f64) -> (f64, f64) {
    let lower = lower_beta_integral(x, a, b);
    let upper = lower_beta_integral(1.0 - x, b, a);
    (lower, upper)
}

/// `P(T <= t)` for Student's t with `df` degrees of freedom.
pub fn t_cdf(t: f64, df: f64) -> f64 {
    // P(|T| > |t|) = I_{df/(df+t²)}(df/2, 1/2)
    let x = df / (df + t * t);
    let (tail2, _) = beta_cdf_pair(x, 0.5 * df, 0.5);
    if t >= 0.0 {
        1.0 - 0.5 * tail2
    } else {
        0.5 * tail2
    }
}

/// `P(F <= x)` and `P(F > x)` for the F distribution.
pub fn f_cdf_pair(x: f64, d1: f64, d2: f64) -> (f64, f64) {
    let z = d1 * x / (d1 * x + d2);
    beta_cdf_pair(z, 0.5 * d1, 0.5 * d2)
}

// ---------------------------------------------------------------------------

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

/// OPTWIN re-derived from its decision rule with a plain `Vec` window.
pub struct NaiveOptwin<'a> {
    pub table: &'a CutTable,
    pub w_min: usize,
    pub w_max: usize,
    pub eta: f64,
    pub one_sided: bool,
    pub window: Vec<f64>,
}

impl<'a> NaiveOptwin<'a> {
    pub fn new(table: &'a CutTable) -> Self {
        Self { table, w_min: table.w_min(), w_max: table.w_max(), eta: 1e-5, one_sided: true, window: Vec::new() }
    }

    pub fn add(&mut self, x: f64) -> Verdict {
        if self.window.len() == self.w_max {
            self.window.remove(0);
        }
        self.window.push(x);
        let len = self.window.len();
        if len < self.w_min {
            return Verdict::NoChange;
        }
        let row = self.table.row(len).unwrap();
        let (hist, new) = self.window.split_at(row.nu_split as usize);
        let (mh, sh) = mean_std(hist);
        let (mn, sn) = mean_std(new);
        let (sh, sn) = (sh + self.eta, sn + self.eta);
        let t = (mh - mn) / (sh * sh / hist.len() as f64 + sn * sn / new.len() as f64).sqrt();
        let f = (sn * sn) / (sh * sh);
        let gate = !self.one_sided || mn >= mh;
        if gate && (t.abs() > row.t_crit || f > row.f_crit) {
            self.window.clear();
            Verdict::Drift
        } else {
            Verdict::NoChange
        }
    }
}
