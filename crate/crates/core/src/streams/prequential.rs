//! Test-then-train evaluation of a classifier whose errors feed a detector.

use serde::{Deserialize, Serialize};

use super::NaiveBayes;
use crate::detection::{DriftDetector, Verdict};
use crate::error::Result;

/// What the pipeline does with the model when the detector reacts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResetPolicy {
    /// Never touch the model.
    Keep,
    /// Start from an empty model after every drift.
    #[default]
    ResetOnDrift,
    /// Train a fresh model alongside the current one while the detector is in
    /// its warning zone and switch to it on drift.
    BackgroundOnWarning,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrequentialOutcome {
    /// `true` where the prediction was wrong.
    pub errors: Vec<bool>,
    pub drifts: Vec<usize>,
    pub warnings: Vec<usize>,
    pub accuracy: f64,
}

impl PrequentialOutcome {
    /// Accuracy over the first `i + 1` instances, for every `i`.
    pub fn running_accuracy(&self) -> Vec<f64> {
        let mut correct = 0u64;
        self.errors
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                correct += !e as u64;
                correct as f64 / (i + 1) as f64
            })
            .collect()
    }
}

/// Predict, score, feed the 0/1 error to `detector`, then train on the
/// instance. The model used for a prediction has never seen that instance.
pub fn prequential_run<I, F>(
    stream: I,
    mut model: NaiveBayes,
    mut detector: Option<&mut dyn DriftDetector>,
    policy: ResetPolicy,
) -> Result<PrequentialOutcome>
where
    I: IntoIterator<Item = (F, usize)>,
    F: AsRef<[usize]>,
{
    let mut out = PrequentialOutcome::default();
    let mut background: Option<NaiveBayes> = None;
    for (i, (features, class)) in stream.into_iter().enumerate() {
        let features = features.as_ref();
        let wrong = model.predict(features)? != class;
        out.errors.push(wrong);
        let verdict = match detector.as_deref_mut() {
            Some(d) => d.add_element(wrong as u8 as f64)?.verdict,
            None => Verdict::NoChange,
        };
        match verdict {
            Verdict::Drift => {
                out.drifts.push(i);
                match policy {
                    ResetPolicy::Keep => {}
                    ResetPolicy::ResetOnDrift => model.reset(),
                    ResetPolicy::BackgroundOnWarning => match background.take() {
                        Some(bg) => model = bg,
                        None => model.reset(),
                    },
                }
            }
            Verdict::Warning => {
                out.warnings.push(i);
                if policy == ResetPolicy::BackgroundOnWarning && background.is_none() {
                    let mut fresh = model.clone();
                    fresh.reset();
                    background = Some(fresh);
                }
            }
            Verdict::NoChange => background = None,
        }
        model.train(features, class)?;
        if let Some(bg) = background.as_mut() {
            bg.train(features, class)?;
        }
    }
    let n = out.errors.len();
    out.accuracy = if n == 0 { 0.0 } else { out.errors.iter().filter(|&&e| !e).count() as f64 / n as f64 };
    Ok(out)
}
