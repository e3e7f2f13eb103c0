use std::f64::consts::PI;

use ndarray::{ArrayView1, ArrayView2};

use super::{check_two_classes, class_rows};
use crate::dataio::{Label, NormStats};
use crate::error::{Error, Result};
use crate::textfmt::{exact, join_exact, ModelLines};

pub const VARIANCE_FLOOR: f64 = 1e-9;
const MAGIC: &str = "GNB-MODEL v1";

/// Gaussian naive Bayes with independent per-feature normals per class.
#[derive(Debug, Clone, PartialEq)]
pub struct GnbModel {
    /// Indexed `[Low, High]`.
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
    pub norm: NormStats,
}

impl GnbModel {
    pub fn train(x: ArrayView2<f64>, y: &[Label]) -> Result<Self> {
        Self::train_normalized(x, y, NormStats::identity(x.ncols()))
    }

    pub fn train_normalized(x: ArrayView2<f64>, y: &[Label], norm: NormStats) -> Result<Self> {
        check_two_classes(x, y)?;
        let x = norm.apply(x)?;
        let n = y.len() as f64;
        let d = x.ncols();
        let mut priors = [0.0; 2];
        let mut means = [vec![0.0; d], vec![0.0; d]];
        let mut variances = [vec![0.0; d], vec![0.0; d]];
        for (c, label) in [Label::Low, Label::High].into_iter().enumerate() {
            let rows = class_rows(y, label);
            let m = rows.len() as f64;
            priors[c] = m / n;
            for j in 0..d {
                let mean = rows.iter().map(|&i| x[[i, j]]).sum::<f64>() / m;
                let var = rows.iter().map(|&i| (x[[i, j]] - mean).powi(2)).sum::<f64>() / m;
                means[c][j] = mean;
                variances[c][j] = var.max(VARIANCE_FLOOR);
            }
        }
        Ok(Self { priors, means, variances, norm })
    }

    /// Unnormalized log posterior of each class for a normalized row.
    fn log_posteriors(&self, z: &[f64]) -> [f64; 2] {
        std::array::from_fn(|c| {
            let ll: f64 = z
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let var = self.variances[c][j];
                    -0.5 * (2.0 * PI * var).ln() - (v - self.means[c][j]).powi(2) / (2.0 * var)
                })
                .sum();
            self.priors[c].ln() + ll
        })
    }

    /// Maximum posterior; ties go to `High`.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<Label>> {
        x.rows()
            .into_iter()
            .map(|row| {
                let z = self.norm.apply_row(row)?;
                let [low, high] = self.log_posteriors(&z);
                Ok(if low > high { Label::Low } else { Label::High })
            })
            .collect()
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<Label> {
        let z = self.norm.apply_row(ArrayView1::from(x))?;
        let [low, high] = self.log_posteriors(&z);
        Ok(if low > high { Label::Low } else { Label::High })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{MAGIC}\n");
        for (c, name) in ["low", "high"].into_iter().enumerate() {
            s += &format!("prior_{name}={}\n", exact(self.priors[c]));
            s += &format!("mean_{name}={}\n", join_exact(&self.means[c]));
            s += &format!("var_{name}={}\n", join_exact(&self.variances[c]));
        }
        s += &format!("norm_mean={}\nnorm_std={}\n", join_exact(&self.norm.mean), join_exact(&self.norm.std));
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = ModelLines::new(text, MAGIC)?;
        let mut priors = [0.0; 2];
        let mut means: [Vec<f64>; 2] = Default::default();
        let mut variances: [Vec<f64>; 2] = Default::default();
        for (c, name) in ["low", "high"].into_iter().enumerate() {
            priors[c] = lines.f64(&format!("prior_{name}"))?;
            means[c] = lines.f64_list(&format!("mean_{name}"))?;
            variances[c] = lines.f64_list(&format!("var_{name}"))?;
        }
        let norm = NormStats { mean: lines.f64_list("norm_mean")?, std: lines.f64_list("norm_std")? };
        let d = norm.dim();
        if means.iter().chain(&variances).any(|v| v.len() != d) {
            return Err(Error::ModelFormat("inconsistent feature count".into()));
        }
        Ok(Self { priors, means, variances, norm })
    }
}
