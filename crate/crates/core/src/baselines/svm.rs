//! Soft-margin kernel SVM trained by SMO with maximal-violating-pair
//! selection. The positive class (+1) is `Low`.
//!
//! The solver minimizes `½βᵀQβ − Σβ` with `Q_ij = y_i y_j K_ij`, subject to
//! `Σ y_i β_i = 0` and `0 <= β_i <= C`.

use ndarray::{Array2, ArrayView1, ArrayView2};

use super::check_two_classes;
use crate::dataio::{Label, NormStats};
use crate::error::{Error, Result};
use crate::kernels::{gram, KernelSpec};
use crate::textfmt::{exact, join_exact, parse_f64, parse_f64_list, ModelLines};

pub const DEFAULT_COST: f64 = 1.0;
pub const KKT_TOL: f64 = 1e-6;
const MAGIC: &str = "SVM-MODEL v1";
const CURVATURE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub kernel: KernelSpec,
    pub cost: f64,
    pub betas: Vec<f64>,
    /// `+1` for `Low`, `-1` for `High`.
    pub signs: Vec<f64>,
    pub bias: f64,
    /// Normalized training vectors.
    pub x_train: Array2<f64>,
    pub norm: NormStats,
}

fn sign_of(label: Label) -> f64 {
    match label {
        Label::Low => 1.0,
        Label::High => -1.0,
    }
}

impl SvmModel {
    pub fn train(x: ArrayView2<f64>, y: &[Label], kernel: KernelSpec, cost: f64) -> Result<Self> {
        Self::train_normalized(x, y, kernel, cost, NormStats::identity(x.ncols()))
    }

    pub fn train_normalized(
        x: ArrayView2<f64>,
        y: &[Label],
        kernel: KernelSpec,
        cost: f64,
        norm: NormStats,
    ) -> Result<Self> {
        check_two_classes(x, y)?;
        let kernel = kernel.validated()?;
        if !(cost > 0.0 && cost.is_finite()) {
            return Err(Error::InvalidConfig(format!("SVM cost must be positive, got {cost}")));
        }
        let x_train = norm.apply(x)?.as_standard_layout().into_owned();
        let signs: Vec<f64> = y.iter().map(|&l| sign_of(l)).collect();
        let k = gram(&kernel, x_train.view());
        let n = y.len();
        let (betas, bias) = solve(&k, &signs, cost, KKT_TOL, 10 * n * n + 10_000)?;
        Ok(Self { kernel, cost, betas, signs, bias, x_train, norm })
    }

    /// `Σ β_i y_i K(x_i, x) + b` for a raw-unit row.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        let z = self.norm.apply_row(ArrayView1::from(x))?;
        let mut f = self.bias;
        for (i, (&b, &s)) in self.betas.iter().zip(&self.signs).enumerate() {
            if b != 0.0 {
                let row = self.x_train.row(i);
                f += b * s * self.kernel.eval_unchecked(row.as_slice().expect("standard layout"), &z);
            }
        }
        Ok(f)
    }

    /// `Low` when the decision value is strictly positive.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<Label>> {
        x.rows()
            .into_iter()
            .map(|row| {
                let f = self.decision_value(&row.to_vec())?;
                Ok(if f > 0.0 { Label::Low } else { Label::High })
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{MAGIC}\n{}\n", self.kernel);
        s += &format!("C={}\nbias={}\n", exact(self.cost), exact(self.bias));
        s += &format!("norm_mean={}\nnorm_std={}\n", join_exact(&self.norm.mean), join_exact(&self.norm.std));
        for ((b, y), row) in self.betas.iter().zip(&self.signs).zip(self.x_train.rows()) {
            s += &format!("beta={} y={} x={}\n", exact(*b), *y as i32, join_exact(&row.to_vec()));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = ModelLines::new(text, MAGIC)?;
        let kernel: KernelSpec = lines
            .next_line()
            .ok_or_else(|| Error::ModelFormat("missing kernel line".into()))?
            .parse()?;
        let cost = lines.f64("C")?;
        let bias = lines.f64("bias")?;
        let norm = NormStats { mean: lines.f64_list("norm_mean")?, std: lines.f64_list("norm_std")? };
        let d = norm.dim();
        let (mut betas, mut signs, mut flat) = (Vec::new(), Vec::new(), Vec::new());
        while let Some(line) = lines.next_line() {
            let bad = || Error::ModelFormat(format!("bad vector line {line:?}"));
            let rest = line.strip_prefix("beta=").ok_or_else(bad)?;
            let (b, rest) = rest.split_once(" y=").ok_or_else(bad)?;
            let (y, x) = rest.split_once(" x=").ok_or_else(bad)?;
            let x = parse_f64_list(x)?;
            if x.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: x.len() });
            }
            betas.push(parse_f64(b)?);
            signs.push(match y.trim() {
                "1" => 1.0,
                "-1" => -1.0,
                _ => return Err(bad()),
            });
            flat.extend(x);
        }
        let x_train = Array2::from_shape_vec((betas.len(), d), flat).map_err(|e| Error::ModelFormat(e.to_string()))?;
        Ok(Self { kernel, cost, betas, signs, bias, x_train, norm })
    }
}

/// Returns `(β, b)`.
fn solve(k: &Array2<f64>, y: &[f64], cost: f64, tol: f64, max_iter: usize) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * k[[i, j]];
    let mut beta = vec![0.0; n];
    // ∇(½βᵀQβ − Σβ) = Qβ − 1.
    let mut grad = vec![-1.0; n];
    let in_up = |b: f64, s: f64| (s > 0.0 && b < cost) || (s < 0.0 && b > 0.0);
    let in_low = |b: f64, s: f64| (s > 0.0 && b > 0.0) || (s < 0.0 && b < cost);

    let mut iterations = 0;
    loop {
        // First index: maximal violation. Partner: largest second-order
        // gain `gap² / curvature` among the violating candidates.
        let mut i = None;
        let mut g_max = f64::NEG_INFINITY;
        let mut g_min = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(beta[t], y[t]) && v > g_max {
                g_max = v;
                i = Some(t);
            }
            if in_low(beta[t], y[t]) {
                g_min = g_min.min(v);
            }
        }
        let Some(i) = i else { break };
        if g_max - g_min <= tol {
            break;
        }
        let mut j = i;
        let mut best_gain = f64::NEG_INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if t == i || !in_low(beta[t], y[t]) || v >= g_max {
                continue;
            }
            let curvature = (k[[i, i]] + k[[t, t]] - 2.0 * k[[i, t]]).max(CURVATURE_FLOOR);
            let gain = (g_max - v) * (g_max - v) / curvature;
            if gain > best_gain {
                best_gain = gain;
                j = t;
            }
        }
        let gap = g_max - (-y[j] * grad[j]);
        if iterations >= max_iter {
            return Err(Error::NonConvergence { iterations, violation: g_max - g_min });
        }
        iterations += 1;

        // Move along y_i Δβ_i = −y_j Δβ_j so Σyβ stays fixed; the step
        // direction u has u_i = y_i, u_j = −y_j.
        let curvature = (k[[i, i]] + k[[j, j]] - 2.0 * k[[i, j]]).max(CURVATURE_FLOOR);
        let mut step = gap / curvature;
        // Box limits along the direction.
        let limit = |b: f64, dir: f64| if dir > 0.0 { cost - b } else { b };
        step = step.min(limit(beta[i], y[i])).min(limit(beta[j], -y[j]));
        let (old_i, old_j) = (beta[i], beta[j]);
        beta[i] = (old_i + y[i] * step).clamp(0.0, cost);
        beta[j] = (old_j - y[j] * step).clamp(0.0, cost);
        let (di, dj) = (beta[i] - old_i, beta[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
    }

    // b = mean over free vectors of −y_t ∇_t = y_t − Σ β_s y_s K_ts.
    let free: Vec<usize> = (0..n).filter(|&t| beta[t] > 0.0 && beta[t] < cost).collect();
    let bias = if free.is_empty() {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(beta[t], y[t]) {
                lo = lo.max(v);
            }
            if in_low(beta[t], y[t]) {
                hi = hi.min(v);
            }
        }
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            (false, true) => hi,
            (false, false) => 0.0,
        }
    } else {
        free.iter().map(|&t| -y[t] * grad[t]).sum::<f64>() / free.len() as f64
    };
    Ok((beta, bias))
}

/// Dual objective in maximization form, `Σβ − ½ΣΣ β_i β_j y_i y_j K_ij`.
pub fn svm_dual_objective(k: &Array2<f64>, y: &[f64], beta: &[f64]) -> f64 {
    let n = beta.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += beta[i] * beta[j] * y[i] * y[j] * k[[i, j]];
        }
    }
    beta.iter().sum::<f64>() - 0.5 * quad
}
