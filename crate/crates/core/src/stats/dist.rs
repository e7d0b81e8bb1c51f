//! Student-t and Fisher-F distributions: densities, CDFs and quantiles.
//!
//! Quantiles are found by safeguarded Newton iteration in log space. The
//! bracket is tightened on every CDF evaluation and the iteration falls back
//! to bisection whenever a Newton step leaves it.

use super::special::{betainc_pair, ln_beta, normal_quantile_approx};
use crate::error::{domain, Result};

const CDF_TOL: f64 = 1e-14;
const MAX_ITER: usize = 200;

fn check_df(name: &str, df: f64) -> Result<()> {
    if !(df > 0.0) || !df.is_finite() {
        return domain(format!("{name} must be a finite positive number, got {df}"));
    }
    Ok(())
}

fn check_confidence(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return domain(format!("confidence must lie in (0, 1), got {c}"));
    }
    Ok(())
}

pub fn t_pdf(t: f64, df: f64) -> f64 {
    let ln = -0.5 * df.ln() - ln_beta(0.5 * df, 0.5) - 0.5 * (df + 1.0) * (t * t / df).ln_1p();
    ln.exp()
}

pub fn t_cdf(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    let t2 = t * t;
    // P(|T| > |t|) = I_{df/(df+t²)}(df/2, 1/2) = 1 - I_{t²/(df+t²)}(1/2, df/2)
    let (x, y) = (df / (df + t2), t2 / (df + t2));
    let two_tail = if t2 > df {
        betainc_pair(0.5 * df, 0.5, x, y)
    } else {
        1.0 - betainc_pair(0.5, 0.5 * df, y, x)
    };
    if t > 0.0 {
        1.0 - 0.5 * two_tail
    } else {
        0.5 * two_tail
    }
}

pub fn f_pdf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln = 0.5 * d1 * (d1 / d2).ln() + (0.5 * d1 - 1.0) * x.ln()
        - 0.5 * (d1 + d2) * (d1 * x / d2).ln_1p()
        - ln_beta(0.5 * d1, 0.5 * d2);
    ln.exp()
}

pub fn f_cdf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let dx = d1 * x;
    let (u, v) = (dx / (dx + d2), d2 / (dx + d2));
    if dx > d2 {
        // complement is better conditioned in the upper tail
        1.0 - betainc_pair(0.5 * d2, 0.5 * d1, v, u)
    } else {
        betainc_pair(0.5 * d1, 0.5 * d2, u, v)
    }
}

/// Quantile of the t distribution: the `q` with `P(T <= q) = confidence`.
pub fn t_ppf(confidence: f64, df: f64) -> Result<f64> {
    check_confidence(confidence)?;
    check_df("df", df)?;
    Ok(t_ppf_unchecked(confidence, df))
}

pub(crate) fn t_ppf_unchecked(confidence: f64, df: f64) -> f64 {
    if confidence == 0.5 {
        return 0.0;
    }
    if confidence < 0.5 {
        return -t_ppf_unchecked(1.0 - confidence, df);
    }
    let seed = t_seed(confidence, df);
    solve_log_space(
        confidence,
        seed.max(f64::MIN_POSITIVE).ln(),
        |t| t_cdf(t, df),
        |t| t_pdf(t, df),
    )
}

/// Quantile of the F distribution with `d1` numerator and `d2` denominator
/// degrees of freedom.
pub fn f_ppf(confidence: f64, d1: f64, d2: f64) -> Result<f64> {
    check_confidence(confidence)?;
    check_df("d1", d1)?;
    check_df("d2", d2)?;
    Ok(f_ppf_unchecked(confidence, d1, d2))
}

pub(crate) fn f_ppf_unchecked(confidence: f64, d1: f64, d2: f64) -> f64 {
    // Fisher's z: ½ ln F is roughly normal with mean ½(1/d2 − 1/d1) and
    // variance ½(1/d1 + 1/d2)
    let z = normal_quantile_approx(confidence);
    let mut u0 = (1.0 / d2 - 1.0 / d1) + 2.0 * z * (0.5 * (1.0 / d1 + 1.0 / d2)).sqrt();
    if !u0.is_finite() {
        u0 = 0.0;
    }
    solve_log_space(
        confidence,
        u0.clamp(-700.0, 700.0),
        |x| f_cdf(x, d1, d2),
        |x| f_pdf(x, d1, d2),
    )
}

fn t_seed(p: f64, df: f64) -> f64 {
    if df == 1.0 {
        return (std::f64::consts::PI * (p - 0.5)).tan();
    }
    if df == 2.0 {
        return (2.0 * p - 1.0) / (2.0 * p * (1.0 - p)).sqrt();
    }
    // Cornish-Fisher expansion around the normal quantile
    let z = normal_quantile_approx(p);
    let z2 = z * z;
    let g1 = (z2 + 1.0) * z / 4.0;
    let g2 = ((5.0 * z2 + 16.0) * z2 + 3.0) * z / 96.0;
    let g3 = (((3.0 * z2 + 19.0) * z2 + 17.0) * z2 - 15.0) * z / 384.0;
    let seed = z + g1 / df + g2 / (df * df) + g3 / (df * df * df);
    if seed.is_finite() && seed > 0.0 {
        seed
    } else {
        z.max(1e-3)
    }
}

/// Solve `cdf(e^u) = target` for a positive root.
fn solve_log_space(
    target: f64,
    u0: f64,
    cdf: impl Fn(f64) -> f64,
    pdf: impl Fn(f64) -> f64,
) -> f64 {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut u = u0;
    let mut best = (f64::INFINITY, u0);
    for _ in 0..MAX_ITER {
        let x = u.exp();
        let c = cdf(x);
        let err = c - target;
        if err.abs() < best.0 {
            best = (err.abs(), u);
        }
        if err.abs() <= CDF_TOL {
            return x;
        }
        if err < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        if hi - lo <= 4.0 * f64::EPSILON * u.abs().max(1.0) {
            break;
        }
        let slope = pdf(x) * x;
        let mut next = u - err / slope;
        let inside = next.is_finite() && next > lo && next < hi;
        if !inside {
            next = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo + (u - lo).abs().max(1.0) * 2.0,
                (false, true) => hi - (hi - u).abs().max(1.0) * 2.0,
                (false, false) => u,
            };
        }
        if next == u {
            break;
        }
        u = next;
    }
    best.1.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_median_is_zero() {
        for &df in &[0.3, 1.0, 2.5, 30.0, 1e5] {
            assert_eq!(t_ppf(0.5, df).unwrap(), 0.0);
        }
    }

    #[test]
    fn t_known_quantiles() {
        assert!((t_ppf(0.975, 10.0).unwrap() - 2.228_138_851_964_938_5).abs() < 1e-9);
        assert!((t_ppf(0.975, 1e6).unwrap() - 1.959_966).abs() < 1e-4);
        // Cauchy: tan(π (p − ½))
        let want = (std::f64::consts::PI * 0.45).tan();
        assert!((t_ppf(0.95, 1.0).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn f_known_quantiles() {
        assert!((f_ppf(0.95, 10.0, 10.0).unwrap() - 2.978_237_016_082_321).abs() < 1e-9);
        for &d in &[1.0, 3.0, 17.5, 400.0] {
            assert!((f_ppf(0.5, d, d).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn quantile_domain_errors() {
        assert!(t_ppf(0.0, 3.0).is_err());
        assert!(t_ppf(1.0, 3.0).is_err());
        assert!(t_ppf(0.9, 0.0).is_err());
        assert!(f_ppf(0.9, -1.0, 2.0).is_err());
        assert!(f_ppf(0.9, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn extreme_cases_round_trip() {
        for &(c, d1, d2) in &[
            (0.9975, 24_000.0, 900.0),
            (0.9975, 900.0, 24_000.0),
            (0.9975, 1.0, 1.0),
            (0.001, 2.0, 50.0),
            (0.999, 0.5, 0.5),
        ] {
            let q = f_ppf(c, d1, d2).unwrap();
            assert!((f_cdf(q, d1, d2) - c).abs() < 1e-12, "{c} {d1} {d2} -> {q}");
        }
        for &(c, df) in &[(0.9975, 0.2), (0.999, 1.0), (0.5000001, 3.0), (0.9975, 2e6)] {
            let q = t_ppf(c, df).unwrap();
            assert!((t_cdf(q, df) - c).abs() < 1e-12, "{c} {df} -> {q}");
        }
    }
}
