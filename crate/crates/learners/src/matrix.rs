use repostlab_core::FeatureTable;

use crate::error::{LearnError, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LearnError::Shape(format!("{} values for a {rows}×{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// All rows must have equal length; zero rows yields a 0×`cols` matrix only via [`Matrix::zeros`].
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(LearnError::Shape(format!("row {i} has {} values, expected {cols}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_table(table: &FeatureTable) -> Self {
        let cols = table.names.len();
        let mut data = Vec::with_capacity(table.len() * cols);
        for r in &table.rows {
            data.extend_from_slice(r);
        }
        Matrix {
            rows: table.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let r = self.row(i);
            data.extend(cols.iter().map(|&j| r[j]));
        }
        Matrix {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Validates binary labels against a row count.
pub(crate) fn check_labels(y: &[u8], rows: usize) -> Result<()> {
    if y.len() != rows {
        return Err(LearnError::Shape(format!("{rows} rows but {} labels", y.len())));
    }
    if let Some(bad) = y.iter().find(|&&v| v > 1) {
        return Err(LearnError::Labels(format!("label {bad} is not 0 or 1")));
    }
    Ok(())
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean binary log loss with optional positive-class weight; probabilities clamped to [1e-15, 1 − 1e-15].
pub(crate) fn log_loss(p: &[f64], y: &[u8], pos_weight: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (&pi, &yi) in p.iter().zip(y) {
        let pi = pi.clamp(1e-15, 1.0 - 1e-15);
        let w = if yi == 1 { pos_weight } else { 1.0 };
        num -= w * if yi == 1 { pi.ln() } else { (1.0 - pi).ln() };
        den += w;
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// F1 of the positive class; 0 when precision + recall is 0.
pub(crate) fn f1_score(y: &[u8], pred: &[u8]) -> f64 {
    let (mut tp, mut fp, mut fneg) = (0.0, 0.0, 0.0);
    for (&a, &b) in y.iter().zip(pred) {
        match (a, b) {
            (1, 1) => tp += 1.0,
            (0, 1) => fp += 1.0,
            (1, 0) => fneg += 1.0,
            _ => {}
        }
    }
    if tp == 0.0 {
        0.0
    } else {
        2.0 * tp / (2.0 * tp + fp + fneg)
    }
}
