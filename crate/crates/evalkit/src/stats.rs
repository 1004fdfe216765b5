//! Two-sided paired tests on matched score vectors.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc;

use crate::error::{EvalError, Result};

/// Differences within this distance are treated as equal (ties) and as zero.
const TIE_EPS: f64 = 1e-12;

/// Largest number of non-zero differences handled by the exact null distribution.
pub const EXACT_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: usize,
    pub p: f64,
}

fn differences(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(EvalError::Length(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x - y).collect())
}

/// Paired t-test; p = I_{ν/(ν+t²)}(ν/2, 1/2) with ν = n − 1.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    let d = differences(a, b)?;
    let n = d.len();
    if n < 2 {
        return Err(EvalError::Arguments(format!("paired t-test needs at least 2 pairs, got {n}")));
    }
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var <= TIE_EPS * TIE_EPS {
        return Err(EvalError::ZeroVariance);
    }
    let t = mean / (var / n as f64).sqrt();
    let df = n - 1;
    let nu = df as f64;
    let p = beta_reg(nu / 2.0, 0.5, nu / (nu + t * t));
    Ok(TTest { t, df, p: p.clamp(0.0, 1.0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WilcoxonMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wilcoxon {
    /// Sum of ranks of the positive differences.
    pub w_plus: f64,
    /// Non-zero differences used.
    pub n: usize,
    pub p: f64,
    pub method: WilcoxonMethod,
}

/// Non-zero differences with their average ranks by absolute value.
fn signed_ranks(a: &[f64], b: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut d: Vec<f64> = differences(a, b)?.into_iter().filter(|x| x.abs() > TIE_EPS).collect();
    if d.is_empty() {
        return Err(EvalError::AllZero);
    }
    d.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    let mut ranks = vec![0.0; d.len()];
    let mut i = 0;
    while i < d.len() {
        let mut j = i + 1;
        while j < d.len() && (d[j].abs() - d[i].abs()).abs() <= TIE_EPS {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        ranks[i..j].fill(avg);
        i = j;
    }
    Ok((d, ranks))
}

fn w_plus(d: &[f64], ranks: &[f64]) -> f64 {
    d.iter().zip(ranks).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum()
}

/// Exact two-sided p from the sign-flip null distribution of W+ over all 2ⁿ
/// assignments, counted by dynamic programming over doubled (integer) ranks.
pub fn wilcoxon_exact(a: &[f64], b: &[f64]) -> Result<Wilcoxon> {
    let (d, ranks) = signed_ranks(a, b)?;
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] > 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let w = w_plus(&d, &ranks);
    let w2 = (2.0 * w).round() as usize;
    let all = 2f64.powi(d.len() as i32);
    let lower: f64 = counts[..=w2].iter().sum::<f64>() / all;
    let upper: f64 = counts[w2..].iter().sum::<f64>() / all;
    Ok(Wilcoxon {
        w_plus: w,
        n: d.len(),
        p: (2.0 * lower.min(upper)).min(1.0),
        method: WilcoxonMethod::Exact,
    })
}

/// Normal approximation with tie-corrected variance, no continuity correction.
pub fn wilcoxon_normal(a: &[f64], b: &[f64]) -> Result<Wilcoxon> {
    let (d, ranks) = signed_ranks(a, b)?;
    let n = d.len() as f64;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < ranks.len() {
        let j = ranks[i..].iter().take_while(|&&r| r == ranks[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let mean = n * (n + 1.0) / 4.0;
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    let w = w_plus(&d, &ranks);
    let z = (w - mean) / var.sqrt();
    Ok(Wilcoxon {
        w_plus: w,
        n: d.len(),
        p: erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0),
        method: WilcoxonMethod::Normal,
    })
}

/// Exact up to [`EXACT_MAX_N`] non-zero differences, normal approximation above.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<Wilcoxon> {
    let nonzero = differences(a, b)?.iter().filter(|x| x.abs() > TIE_EPS).count();
    if nonzero <= EXACT_MAX_N {
        wilcoxon_exact(a, b)
    } else {
        wilcoxon_normal(a, b)
    }
}
