use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Per-feature z-score parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct NormStats {
    pub mean: Vec<f64>,
    /// Population standard deviation; constant features get 1.
    pub std: Vec<f64>,
}

impl NormStats {
    pub fn identity(d: usize) -> Self {
        Self {
            mean: vec![0.0; d],
            std: vec![1.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Fits mean and standard deviation on the given rows of `x` only.
    pub fn fit(x: ArrayView2<f64>, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyRowSet);
        }
        let n = rows.len() as f64;
        let d = x.ncols();
        let mut mean = vec![0.0; d];
        for &i in rows {
            for j in 0..d {
                mean[j] += x[[i, j]];
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for &i in rows {
            for j in 0..d {
                let dev = x[[i, j]] - mean[j];
                var[j] += dev * dev;
            }
        }
        let std = var
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 0.0 { s } else { 1.0 }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn apply(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_dim(x.ncols())?;
        let mut out = x.to_owned();
        for mut row in out.rows_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - self.mean[j]) / self.std[j];
            }
        }
        Ok(out)
    }

    pub fn apply_row(&self, x: ArrayView1<f64>) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        Ok(x.iter()
            .enumerate()
            .map(|(j, v)| (v - self.mean[j]) / self.std[j])
            .collect())
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }
}
