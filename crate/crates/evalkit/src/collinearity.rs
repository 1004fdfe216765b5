use rayon::prelude::*;
use repostlab_learners::Matrix;
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollinearityReport {
    pub threshold: f64,
    /// Unordered feature pairs considered.
    pub pairs: usize,
    /// Pairs whose correlation is undefined (a constant side, or fewer than 3 shared finite rows).
    pub undefined: usize,
    pub above: usize,
    /// `above / (pairs - undefined)`; 0 when no pair is defined.
    pub fraction: f64,
    /// Pairs above the threshold, as (i, j, r) with i < j.
    pub flagged: Vec<(usize, usize, f64)>,
}

/// Pearson correlation over rows where both values are finite; `None` when
/// fewer than 3 such rows remain or either side is constant on them.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = x.iter().zip(y).filter(|(a, b)| a.is_finite() && b.is_finite()).map(|(a, b)| (*a, *b)).collect();
    if pairs.len() < 3 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in &pairs {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Fraction of feature pairs with |r| strictly above `threshold`.
pub fn collinearity_screen(x: &Matrix, threshold: f64) -> Result<CollinearityReport> {
    if x.cols() < 2 || x.rows() < 3 {
        return Err(EvalError::Arguments(format!(
            "collinearity screen needs at least 2 features and 3 rows, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let columns: Vec<Vec<f64>> = (0..x.cols()).map(|j| x.column(j)).collect();
    let results: Vec<Vec<(usize, usize, Option<f64>)>> = (0..columns.len())
        .into_par_iter()
        .map(|i| ((i + 1)..columns.len()).map(|j| (i, j, pearson(&columns[i], &columns[j]))).collect())
        .collect();
    let mut report = CollinearityReport {
        threshold,
        pairs: 0,
        undefined: 0,
        above: 0,
        fraction: 0.0,
        flagged: Vec::new(),
    };
    for (i, j, r) in results.into_iter().flatten() {
        report.pairs += 1;
        match r {
            None => report.undefined += 1,
            Some(r) if r.abs() > threshold => {
                report.above += 1;
                report.flagged.push((i, j, r));
            }
            Some(_) => {}
        }
    }
    let defined = report.pairs - report.undefined;
    if defined > 0 {
        report.fraction = report.above as f64 / defined as f64;
    }
    Ok(report)
}
