//! Inputs shared by the benchmarks.

use optwin_core::SplitMix64;

/// Stationary Bernoulli(`p`) error indicators.
pub fn error_stream(n: usize, p: f64, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    (0..n).map(|_| f64::from(u8::from(rng.bernoulli(p)))).collect()
}

/// Bernoulli errors whose rate jumps from 0.2 to 0.5 every `period` elements
/// and back, so detectors keep resetting.
pub fn drifting_stream(n: usize, period: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|i| {
            let p = if (i / period) % 2 == 0 { 0.2 } else { 0.5 };
            f64::from(u8::from(rng.bernoulli(p)))
        })
        .collect()
}
