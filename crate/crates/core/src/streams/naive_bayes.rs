//! Categorical Naive Bayes with Laplace smoothing.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayes {
    classes: usize,
    cardinalities: Vec<usize>,
    class_counts: Vec<u64>,
    /// `value_counts[class][attr][value]`
    value_counts: Vec<Vec<Vec<u64>>>,
    seen: u64,
}

impl NaiveBayes {
    pub fn new(classes: usize, cardinalities: &[usize]) -> Result<Self> {
        if classes < 2 || cardinalities.iter().any(|&c| c == 0) {
            return Err(Error::Config(format!(
                "Naive Bayes needs >= 2 classes and non-empty attributes, got {classes} and {cardinalities:?}"
            )));
        }
        let per_class = cardinalities.iter().map(|&c| vec![0; c]).collect::<Vec<_>>();
        Ok(Self {
            classes,
            cardinalities: cardinalities.to_vec(),
            class_counts: vec![0; classes],
            value_counts: vec![per_class; classes],
            seen: 0,
        })
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    fn check(&self, features: &[usize]) -> Result<()> {
        if features.len() != self.cardinalities.len()
            || features.iter().zip(&self.cardinalities).any(|(&v, &c)| v >= c)
        {
            return Err(Error::Domain(format!(
                "features {features:?} do not fit attribute cardinalities {:?}",
                self.cardinalities
            )));
        }
        Ok(())
    }

    pub fn train(&mut self, features: &[usize], class: usize) -> Result<()> {
        self.check(features)?;
        if class >= self.classes {
            return Err(Error::Domain(format!("class {class} out of range 0..{}", self.classes)));
        }
        self.class_counts[class] += 1;
        for (a, &v) in features.iter().enumerate() {
            self.value_counts[class][a][v] += 1;
        }
        self.seen += 1;
        Ok(())
    }

    /// Posterior class probabilities (pseudo-count 1 for priors and
    /// likelihoods). An untrained model returns the uniform distribution.
    pub fn predict_proba(&self, features: &[usize]) -> Result<Vec<f64>> {
        self.check(features)?;
        let n = self.seen as f64;
        let log_post: Vec<f64> = (0..self.classes)
            .map(|c| {
                let nc = self.class_counts[c] as f64;
                let prior = ((nc + 1.0) / (n + self.classes as f64)).ln();
                features.iter().enumerate().fold(prior, |acc, (a, &v)| {
                    let k = self.cardinalities[a] as f64;
                    acc + ((self.value_counts[c][a][v] as f64 + 1.0) / (nc + k)).ln()
                })
            })
            .collect();
        let max = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = log_post.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = exp.iter().sum();
        Ok(exp.into_iter().map(|e| e / z).collect())
    }

    /// Most probable class; ties go to the lowest index.
    pub fn predict(&self, features: &[usize]) -> Result<usize> {
        let p = self.predict_proba(features)?;
        Ok(p.iter().enumerate().fold(0, |best, (i, &v)| if v > p[best] { i } else { best }))
    }

    pub fn reset(&mut self) {
        self.class_counts.iter_mut().for_each(|c| *c = 0);
        self.value_counts.iter_mut().flatten().flatten().for_each(|c| *c = 0);
        self.seen = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_posterior() {
        let mut nb = NaiveBayes::new(2, &[2]).unwrap();
        nb.train(&[0], 0).unwrap();
        nb.train(&[0], 0).unwrap();
        nb.train(&[1], 1).unwrap();
        // class 0: prior 3/5, P(v=0|0) = 3/4; class 1: prior 2/5, P(v=0|1) = 1/3
        let p = nb.predict_proba(&[0]).unwrap();
        let (a, b) = (0.6 * 0.75, 0.4 / 3.0);
        assert!((p[0] - a / (a + b)).abs() < 1e-12);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(nb.predict(&[0]).unwrap(), 0);
    }

    #[test]
    fn untrained_is_uniform_and_reset_forgets() {
        let mut nb = NaiveBayes::new(3, &[2, 2]).unwrap();
        assert_eq!(nb.predict_proba(&[1, 0]).unwrap(), vec![1.0 / 3.0; 3]);
        nb.train(&[1, 0], 2).unwrap();
        nb.reset();
        assert_eq!(nb, NaiveBayes::new(3, &[2, 2]).unwrap());
    }

    #[test]
    fn bad_inputs() {
        let mut nb = NaiveBayes::new(2, &[3]).unwrap();
        assert!(nb.train(&[3], 0).is_err());
        assert!(nb.train(&[0], 2).is_err());
        assert!(nb.predict(&[0, 0]).is_err());
        assert!(NaiveBayes::new(1, &[3]).is_err());
    }
}
