use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};

/// F1 of the positive class; 0 when there are no true positives.
pub fn f1(labels: &[u8], predictions: &[u8]) -> Result<f64> {
    if labels.is_empty() {
        return Err(EvalError::Empty("f1 needs at least one instance".into()));
    }
    if labels.len() != predictions.len() {
        return Err(EvalError::Length(labels.len(), predictions.len()));
    }
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (&y, &p) in labels.iter().zip(predictions) {
        if y > 1 {
            return Err(EvalError::NonBinary(y));
        }
        if p > 1 {
            return Err(EvalError::NonBinary(p));
        }
        match (y, p) {
            (1, 1) => tp += 1,
            (0, 1) => fp += 1,
            (1, 0) => fneg += 1,
            _ => {}
        }
    }
    if tp == 0 {
        return Ok(0.0);
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fneg) as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

/// Predicts 1 independently with probability `positive_rate`.
pub fn random_predictions(n: usize, positive_rate: f64, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| u8::from(rng.random::<f64>() < positive_rate)).collect()
}

/// Per-fold F1 of one model on one group ("mixed" for pooled splits).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldScores {
    pub group: String,
    pub folds: Vec<f64>,
}

impl FoldScores {
    pub fn mu(&self) -> f64 {
        self.folds.iter().sum::<f64>() / self.folds.len() as f64
    }

    /// Population standard deviation over folds.
    pub fn sigma(&self) -> f64 {
        let mu = self.mu();
        (self.folds.iter().map(|f| (f - mu).powi(2)).sum::<f64>() / self.folds.len() as f64).sqrt()
    }
}

/// Mixture of equally weighted components: the mean of means, and the square
/// root of mean within-group variance plus variance of the group means.
/// Empty input yields NaN.
pub fn aggregate(groups: &[(f64, f64)]) -> (f64, f64) {
    let k = groups.len() as f64;
    let mu = groups.iter().map(|g| g.0).sum::<f64>() / k;
    let within = groups.iter().map(|g| g.1 * g.1).sum::<f64>() / k;
    let between = groups.iter().map(|g| (g.0 - mu).powi(2)).sum::<f64>() / k;
    (mu, (within + between).sqrt())
}
