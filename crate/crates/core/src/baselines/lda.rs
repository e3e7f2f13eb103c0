use ndarray::{Array2, ArrayView1, ArrayView2};

use super::{check_two_classes, class_rows};
use crate::dataio::{Label, NormStats};
use crate::error::{Error, Result};
use crate::textfmt::{exact, join_exact, ModelLines};

/// Ridge added to the pooled covariance, relative to its mean diagonal.
pub const RIDGE_FRACTION: f64 = 1e-6;
const MAGIC: &str = "LDA-MODEL v1";

/// Linear discriminant with a shared, ridge-regularized covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    /// Indexed `[Low, High]`.
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    /// Pooled covariance including the ridge.
    pub covariance: Array2<f64>,
    pub norm: NormStats,
    // Σ⁻¹μ_c and −½μ_cᵀΣ⁻¹μ_c + ln π_c, derived from the fields above.
    weights: [Vec<f64>; 2],
    offsets: [f64; 2],
}

impl LdaModel {
    pub fn train(x: ArrayView2<f64>, y: &[Label]) -> Result<Self> {
        Self::train_normalized(x, y, NormStats::identity(x.ncols()))
    }

    pub fn train_normalized(x: ArrayView2<f64>, y: &[Label], norm: NormStats) -> Result<Self> {
        check_two_classes(x, y)?;
        let x = norm.apply(x)?;
        let (n, d) = x.dim();
        let mut priors = [0.0; 2];
        let mut means = [vec![0.0; d], vec![0.0; d]];
        let mut scatter = Array2::<f64>::zeros((d, d));
        for (c, label) in [Label::Low, Label::High].into_iter().enumerate() {
            let rows = class_rows(y, label);
            let m = rows.len() as f64;
            priors[c] = m / n as f64;
            for j in 0..d {
                means[c][j] = rows.iter().map(|&i| x[[i, j]]).sum::<f64>() / m;
            }
            for &i in &rows {
                for a in 0..d {
                    let da = x[[i, a]] - means[c][a];
                    for b in 0..d {
                        scatter[[a, b]] += da * (x[[i, b]] - means[c][b]);
                    }
                }
            }
        }
        let dof = if n > 2 { n - 2 } else { n } as f64;
        let mut covariance = scatter / dof;
        let ridge = RIDGE_FRACTION * covariance.diag().sum() / d as f64;
        for j in 0..d {
            covariance[[j, j]] += ridge;
        }
        Self::from_parts(priors, means, covariance, norm)
    }

    fn from_parts(priors: [f64; 2], means: [Vec<f64>; 2], covariance: Array2<f64>, norm: NormStats) -> Result<Self> {
        let chol = cholesky(&covariance)?;
        let weights: [Vec<f64>; 2] = std::array::from_fn(|c| chol_solve(&chol, &means[c]));
        let offsets: [f64; 2] = std::array::from_fn(|c| {
            let quad: f64 = means[c].iter().zip(&weights[c]).map(|(m, w)| m * w).sum();
            -0.5 * quad + priors[c].ln()
        });
        Ok(Self { priors, means, covariance, norm, weights, offsets })
    }

    /// `δ_c(z) = zᵀΣ⁻¹μ_c − ½μ_cᵀΣ⁻¹μ_c + ln π_c` for a normalized row.
    pub fn scores(&self, x: &[f64]) -> Result<[f64; 2]> {
        let z = self.norm.apply_row(ArrayView1::from(x))?;
        Ok(std::array::from_fn(|c| {
            z.iter().zip(&self.weights[c]).map(|(a, w)| a * w).sum::<f64>() + self.offsets[c]
        }))
    }

    /// Larger discriminant wins; ties go to `High`.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<Label>> {
        x.rows()
            .into_iter()
            .map(|row| {
                let [low, high] = self.scores(&row.to_vec())?;
                Ok(if low > high { Label::Low } else { Label::High })
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{MAGIC}\n");
        for (c, name) in ["low", "high"].into_iter().enumerate() {
            s += &format!("prior_{name}={}\n", exact(self.priors[c]));
            s += &format!("mean_{name}={}\n", join_exact(&self.means[c]));
        }
        let cov: Vec<f64> = self.covariance.iter().copied().collect();
        s += &format!("covariance={}\n", join_exact(&cov));
        s += &format!("norm_mean={}\nnorm_std={}\n", join_exact(&self.norm.mean), join_exact(&self.norm.std));
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = ModelLines::new(text, MAGIC)?;
        let mut priors = [0.0; 2];
        let mut means: [Vec<f64>; 2] = Default::default();
        for (c, name) in ["low", "high"].into_iter().enumerate() {
            priors[c] = lines.f64(&format!("prior_{name}"))?;
            means[c] = lines.f64_list(&format!("mean_{name}"))?;
        }
        let cov = lines.f64_list("covariance")?;
        let norm = NormStats { mean: lines.f64_list("norm_mean")?, std: lines.f64_list("norm_std")? };
        let d = norm.dim();
        if means.iter().any(|m| m.len() != d) || cov.len() != d * d {
            return Err(Error::ModelFormat("inconsistent feature count".into()));
        }
        let covariance = Array2::from_shape_vec((d, d), cov).map_err(|e| Error::ModelFormat(e.to_string()))?;
        Self::from_parts(priors, means, covariance, norm)
    }
}

/// Lower-triangular Cholesky factor.
fn cholesky(a: &Array2<f64>) -> Result<Array2<f64>> {
    let d = a.nrows();
    let mut l = Array2::<f64>::zeros((d, d));
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[[i, k]] * l[[j, k]]).sum();
            if i == j {
                let v = a[[i, i]] - s;
                if v <= 0.0 || !v.is_finite() {
                    return Err(Error::SingularCovariance);
                }
                l[[i, j]] = v.sqrt();
            } else {
                l[[i, j]] = (a[[i, j]] - s) / l[[j, j]];
            }
        }
    }
    Ok(l)
}

fn chol_solve(l: &Array2<f64>, b: &[f64]) -> Vec<f64> {
    let d = b.len();
    let mut y = vec![0.0; d];
    for i in 0..d {
        let s: f64 = (0..i).map(|k| l[[i, k]] * y[k]).sum();
        y[i] = (b[i] - s) / l[[i, i]];
    }
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        let s: f64 = (i + 1..d).map(|k| l[[k, i]] * x[k]).sum();
        x[i] = (y[i] - s) / l[[i, i]];
    }
    x
}
