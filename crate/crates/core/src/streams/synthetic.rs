//! Piecewise-stationary streams with sudden or gradual concept changes.

use serde::{Deserialize, Serialize};

use super::SplitMix64;
use crate::error::{Error, Result};

/// Distribution of one stationary segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum Distribution {
    Bernoulli { p: f64 },
    Gaussian { mean: f64, std: f64 },
    /// Uniform over a finite set of values.
    UniformSet { values: Vec<f64> },
}

impl Distribution {
    pub fn sample(&self, rng: &mut SplitMix64) -> f64 {
        match self {
            Distribution::Bernoulli { p } => rng.bernoulli(*p) as u8 as f64,
            Distribution::Gaussian { mean, std } => rng.normal(*mean, *std),
            Distribution::UniformSet { values } => values[rng.below(values.len() as u64) as usize],
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Bernoulli { p } => *p,
            Distribution::Gaussian { mean, .. } => *mean,
            Distribution::UniformSet { values } => values.iter().sum::<f64>() / values.len() as f64,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Distribution::Bernoulli { p } => (0.0..=1.0).contains(p),
            Distribution::Gaussian { mean, std } => mean.is_finite() && std.is_finite() && *std >= 0.0,
            Distribution::UniformSet { values } => !values.is_empty() && values.iter().all(|v| v.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid distribution {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(flatten)]
    pub dist: Distribution,
    pub len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transition {
    Sudden,
    /// The new concept replaces the old one over this many steps.
    Gradual(usize),
}

/// A sequence of stationary segments joined by transitions.
///
/// `transitions` holds one entry per segment boundary; when omitted every
/// boundary is sudden.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub seed: u64,
    pub segments: Vec<Segment>,
    #[serde(default)]
    pub transitions: Vec<Transition>,
}

/// Start index of every new concept.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub drifts: Vec<usize>,
}

impl StreamSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("stream spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Two segments joined by a sudden change.
    pub fn sudden(seed: u64, before: (Distribution, usize), after: (Distribution, usize)) -> Self {
        Self {
            seed,
            segments: vec![
                Segment { dist: before.0, len: before.1 },
                Segment { dist: after.0, len: after.1 },
            ],
            transitions: vec![Transition::Sudden],
        }
    }

    pub fn total_len(&self) -> usize {
        self.segments.iter().map(|s| s.len).sum()
    }

    pub fn transition(&self, boundary: usize) -> Transition {
        self.transitions.get(boundary).copied().unwrap_or(Transition::Sudden)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::Config("stream has no segments".into()));
        }
        let boundaries = self.segments.len() - 1;
        if !self.transitions.is_empty() && self.transitions.len() != boundaries {
            return Err(Error::Config(format!(
                "{} transitions given for {boundaries} segment boundaries",
                self.transitions.len()
            )));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.len == 0 {
                return Err(Error::Config(format!("segment {i} has zero length")));
            }
            seg.dist.validate()?;
        }
        for b in 0..boundaries {
            if let Transition::Gradual(w) = self.transition(b) {
                let limit = self.segments[b].len.min(self.segments[b + 1].len);
                if w == 0 || w >= limit {
                    return Err(Error::Config(format!(
                        "gradual width {w} at boundary {b} must lie in 1..{limit}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn ground_truth(&self) -> GroundTruth {
        let mut at = 0;
        let drifts = self.segments[..self.segments.len() - 1]
            .iter()
            .map(|s| {
                at += s.len;
                at
            })
            .collect();
        GroundTruth { drifts }
    }

    /// Draw the stream. Inside a gradual zone of width `w` starting at a
    /// boundary, element `j` comes from the new concept with probability
    /// `(j + 1) / (w + 1)`.
    pub fn generate(&self) -> Result<(Vec<f64>, GroundTruth)> {
        self.validate()?;
        let mut rng = SplitMix64::new(self.seed);
        let mut out = Vec::with_capacity(self.total_len());
        for (i, seg) in self.segments.iter().enumerate() {
            let ramp = match i.checked_sub(1).map(|b| self.transition(b)) {
                Some(Transition::Gradual(w)) => w,
                _ => 0,
            };
            for j in 0..seg.len {
                let dist = if j < ramp && !rng.bernoulli((j + 1) as f64 / (ramp + 1) as f64) {
                    &self.segments[i - 1].dist
                } else {
                    &seg.dist
                };
                out.push(dist.sample(&mut rng));
            }
        }
        Ok((out, self.ground_truth()))
    }
}
